"""Weak-form residuals of the delta-shock solution versus quadrature density.

    python scripts/weak_residual_study.py
"""
import numpy as np

from chaplygin_lab import characteristics as ch
from chaplygin_lab import delta_shock as ds
from chaplygin_lab.gas import ChaplyginParams
from chaplygin_lab.initial_data import canon


def main():
    cm = ch.build_map(canon(), ChaplyginParams())
    traj = ds.integrate_delta_shock(cm)
    mid = 0.5 * (traj.t_start + traj.t_end)
    print(f"{'bump':>22} {'n':>4} {'mass':>12} {'momentum':>12}")
    for xc in (0.0, 0.08, -0.15):
        phi = ds.BumpTest(mid, xc, 0.12, 0.3)
        for n in (12, 24, 48, 96):
            r = ds.weak_residual(cm, traj, phi, n=n)
            print(f"({mid:.3f}, {xc:+.2f})".rjust(22) + f" {n:4d} {r[0]:12.3e} {r[1]:12.3e}")
    # The same bump with the delta part removed shows what the shock carries.
    bare = ds.DeltaShockTrajectory(
        [ds.ShockSample(ds.DeltaShockState(s.state.t, s.state.x, s.state.u_delta, 1e-300),
                        s.sides, True, s.udot, 0.0) for s in traj.samples],
        traj.t_start, traj.horizon)
    r = ds.weak_residual(cm, bare, ds.BumpTest(mid, 0.0, 0.12, 0.3), n=48)
    print(f"\nwithout the delta weight: mass residual {r[0]:.3e}")
    print(f"max w along the run: {np.max(traj.column('w')):.4f}")


if __name__ == "__main__":
    main()
