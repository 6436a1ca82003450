"""Finite-volume error against the characteristic solution under grid refinement.

    python scripts/fv_convergence.py [--frac 0.5] [--limiter minmod]
"""
import argparse

from chaplygin_lab import characteristics as ch
from chaplygin_lab import fv_oracle as fv
from chaplygin_lab.gas import ChaplyginParams
from chaplygin_lab.initial_data import canon


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--frac", type=float, default=0.5, help="time as a fraction of t0")
    ap.add_argument("--limiter", default="minmod", choices=("none", "minmod"))
    ap.add_argument("--cells", type=int, nargs="+", default=[500, 1000, 2000, 4000])
    args = ap.parse_args()

    params = ChaplyginParams()
    cm = ch.build_map(canon(), params)
    t = args.frac * cm.t0
    print(f"t = {t:.6f} ({args.frac} t0), limiter={args.limiter}")
    print(f"{'n':>6} {'L1 rho':>12} {'Linf rho':>12} {'L1 u':>12} {'ratio':>7}")
    prev = None
    for n in args.cells:
        f = fv.fv_run(canon(), params, fv.SchemeConfig(n_cells=n, limiter=args.limiter),
                      (-8.0, 8.0), t)
        e = fv.compare(f, cm)
        ratio = f"{prev / e.l1:7.2f}" if prev else ""
        print(f"{n:6d} {e.l1_rho:12.4e} {e.linf_rho:12.4e} {e.l1_u:12.4e} {ratio}")
        prev = e.l1


if __name__ == "__main__":
    main()
