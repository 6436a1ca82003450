"""Sensitivity of the delta-shock trajectory to the initial weight and start offset.

    python scripts/w0_sweep.py [--family canon]
"""
import argparse

from chaplygin_lab import characteristics as ch
from chaplygin_lab import delta_shock as ds
from chaplygin_lab.gas import ChaplyginParams
from chaplygin_lab.initial_data import family


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--family", default="canon")
    ap.add_argument("--T", type=float, default=0.3)
    args = ap.parse_args()
    cm = ch.build_map(family(args.family), ChaplyginParams())
    print(f"{'w0':>8} {'delta':>8} {'final x':>14} {'final u':>14} {'final w':>12}")
    for delta in (1e-2, 5e-3):
        for w0 in (1e-4, 1e-3, 1e-2):
            traj = ds.integrate_delta_shock(cm, w0=w0, delta_start=delta, T=args.T)
            s = traj.samples[-1].state
            print(f"{w0:8.0e} {delta:8.0e} {s.x:+14.6e} {s.u_delta:+14.6e} {s.w:12.6f}")


if __name__ == "__main__":
    main()
