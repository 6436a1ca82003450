"""Smooth solution, blowup, envelopes and the continuing delta shock for one family.

    python scripts/canon_lifecycle.py [--family canon] [--T 0.3]
"""
import argparse

import numpy as np

from chaplygin_lab import characteristics as ch
from chaplygin_lab import delta_shock as ds
from chaplygin_lab.gas import ChaplyginParams
from chaplygin_lab.initial_data import family


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--family", default="canon")
    ap.add_argument("--T", type=float, default=0.3)
    ap.add_argument("--w0", type=float, default=1e-3)
    args = ap.parse_args()

    cm = ch.build_map(family(args.family), ChaplyginParams())
    rep = cm.report
    print(f"cusp parameters  alpha0={rep.alpha0:.12f}  beta0={rep.beta0:.12f}  "
          f"f'(alpha0)={rep.fprime_alpha0:.6f}")
    print(f"blowup point     t0={cm.t0:.12f}  x0={cm.x0:.3e}")

    print("\ndensity at x0 approaching t0")
    for frac in (0.5, 0.9, 0.99, 0.999, 1 - 1e-6):
        r = ch.evaluate_solution(cm, frac * cm.t0, cm.x0)[0]
        print(f"  t/t0={frac:<10.7g} rho={r.state.rho:.6e}  u={r.state.u:+.3e}")

    gl, gr = ch.envelopes(cm, n=16)
    print(f"\nenvelopes  monotone={gl.monotone_ok and gr.monotone_ok}  "
          f"concave={gl.concave_ok and gr.concave_ok}")
    for tl, xl, xr in zip(gl.t[::4], gl.x[::4], gr.x[::4]):
        print(f"  t={tl:.6f}  left={xl:+.6f}  right={xr:+.6f}")

    traj = ds.integrate_delta_shock(cm, w0=args.w0, T=args.T)
    d_mass, d_mom = ds.rh_consistency(traj)
    print(f"\ndelta shock: {traj.stats['accepted']} steps, "
          f"max RH defects {np.max(np.abs(d_mass)):.2e} / {np.max(np.abs(d_mom)):.2e}")
    for s in traj.samples[:: max(1, len(traj.samples) // 8)] + traj.samples[-1:]:
        st = s.state
        print(f"  t={st.t:.6f}  x={st.x:+.3e}  u={st.u_delta:+.3e}  w={st.w:.6e}  "
              f"entropy={'ok' if s.entropy_ok else 'VIOLATED'}")

    # Keep the window inside the region determined by the data domain.
    lo, hi = cm.data.domain
    reach = traj.t_end * max(abs(v) for v in (*cm.plus_range, *cm.minus_range))
    window = (max(-8.0, lo + reach), min(8.0, hi - reach))
    led = ds.conservation_audit(cm, traj, window, boundary="balanced", n_times=9)
    print(f"\naudit on {window}:")
    for k, v in led.summary().items():
        print(f"  {k}: {v}")


if __name__ == "__main__":
    main()
