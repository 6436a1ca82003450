import numpy as np
import pytest

from chaplygin_lab import characteristics as ch
from chaplygin_lab import delta_shock as ds
from chaplygin_lab.errors import (BoundaryMismatch, EntropyViolated, SideSelectionAmbiguous,
                                  SupportViolation, ZeroWeightError)
from chaplygin_lab.gas import ChaplyginParams, PhysState


# -- side states -------------------------------------------------------------------

def test_side_states_canon_symmetry(canon_map):
    sd = ds.side_states(canon_map, canon_map.t0 + 0.05, 0.0)
    assert sd.left.rho == pytest.approx(sd.right.rho, rel=1e-10)
    assert sd.left.u == pytest.approx(-sd.right.u, rel=1e-10)
    assert sd.left.u > 0
    # Symmetric limits: no density or flux jump, momentum jumps down.
    assert abs(sd.jump_rho) < 1e-8 and abs(sd.jump_flux) < 1e-8 and sd.jump_m < 0
    (al, bl), (ar, br) = sd.roots
    assert al < canon_map.alpha0 < ar and bl < canon_map.beta0 < br


def test_side_states_warm_start_agrees(canon_map):
    t = canon_map.t0 + 0.1
    cold = ds.side_states(canon_map, t, 0.0)
    warm = ds.side_states(canon_map, t + 1e-4, 0.0, guess=cold.roots)
    ref = ds.side_states(canon_map, t + 1e-4, 0.0)
    assert np.allclose(np.ravel(warm.roots), np.ravel(ref.roots), atol=1e-10)


def test_side_states_before_blowup(canon_map):
    with pytest.raises(SideSelectionAmbiguous):
        ds.side_states(canon_map, 0.5 * canon_map.t0, 0.0)


def test_side_states_outside_envelopes(canon_map):
    t = canon_map.t0 + 0.05
    with pytest.raises(SideSelectionAmbiguous):
        ds.side_states(canon_map, t, canon_map.envelope_x("left", t) + 0.5)


# -- right-hand side -----------------------------------------------------------------

def _sides(left, right, params=ChaplyginParams()):
    return ds.SideStates.from_states(PhysState(*left), PhysState(*right), params)


def test_rhs_vanishes_without_jumps():
    sd = _sides((2.0, 0.3), (2.0, 0.3))
    ud, wd = ds.rh_rhs(ds.DeltaShockState(0.0, 0.0, 0.1, 1.0), sd)
    assert ud == 0.0 and wd == 0.0


def test_rhs_symmetric_collision():
    # rho equal, u opposite: the shock stays put and gains weight.
    sd = _sides((3.0, 0.4), (3.0, -0.4))
    ud, wd = ds.rh_rhs(ds.DeltaShockState(0.0, 0.0, 0.0, 0.5), sd)
    assert ud == pytest.approx(0.0, abs=1e-15)
    assert wd == pytest.approx(2 * 3.0 * 0.4)


def test_rhs_matches_hand_formula():
    p = ChaplyginParams()
    left, right = (2.5, 0.7), (1.5, -0.2)
    sd = _sides(left, right, p)
    u, w = 0.1, 0.8
    cons = lambda r, v: np.array([r, r * v, r * v * v + p.p0 - p.mu ** 2 / r])
    jr, jm, jf = cons(*right) - cons(*left)
    s = np.sqrt(1 + u * u)
    # d(w s)/dt and d(w u s)/dt from the generalized relations, solved for (udot, wdot).
    A = u * jr - jm
    B = u * jm - jf
    M = np.array([[u * w / s, s], [w * (s + u * u / s), u * s]])
    wdot_ud = np.linalg.solve(M, [A, B])
    ud, wd = ds.rh_rhs(ds.DeltaShockState(0.0, 0.0, u, w), sd)
    assert ud == pytest.approx(wdot_ud[0], rel=1e-12)
    assert wd == pytest.approx(wdot_ud[1], rel=1e-12)


def test_rhs_rejects_nonpositive_weight():
    sd = _sides((2.0, 0.3), (2.0, -0.3))
    with pytest.raises(ZeroWeightError):
        ds.rh_rhs(ds.DeltaShockState(0.0, 0.0, 0.0, 0.0), sd)


def test_integrator_rejects_zero_w0(canon_map):
    with pytest.raises(ZeroWeightError):
        ds.integrate_delta_shock(canon_map, w0=0.0)


def test_zero_jump_harness(canon_map):
    sd = _sides((2.0, 0.0), (2.0, 0.0))
    traj = ds.integrate_delta_shock(canon_map, w0=0.3, T=0.05, side_fn=lambda t, x: sd,
                                    enforce_entropy=False, check_envelopes=False,
                                    u0=0.0, x_start=0.25)
    assert np.all(traj.column("x") == 0.25)
    assert np.all(traj.column("w") == 0.3)
    assert traj.t_end == pytest.approx(traj.t_start + 0.05, abs=1e-14)


def test_constant_drift_harness(canon_map):
    sd = _sides((2.0, 0.4), (2.0, 0.4))
    traj = ds.integrate_delta_shock(canon_map, w0=0.3, T=0.05, side_fn=lambda t, x: sd,
                                    enforce_entropy=False, check_envelopes=False,
                                    u0=0.4, x_start=0.0)
    t = traj.column("t") - traj.t_start
    assert np.allclose(traj.column("x"), 0.4 * t, atol=1e-14)


def test_entropy_violation_reported(canon_map):
    # Diverging states (rarefaction-like) violate the compressive ordering.
    sd = _sides((2.0, -0.5), (2.0, 0.5))
    with pytest.raises(EntropyViolated) as info:
        ds.integrate_delta_shock(canon_map, side_fn=lambda t, x: sd, check_envelopes=False,
                                 u0=0.0, T=0.01)
    assert info.value.details["margins"][1] < 0 or info.value.details["margins"][2] < 0


# -- the canonical run -----------------------------------------------------------------

def test_canon_trajectory_stays_on_axis(canon_traj):
    assert np.max(np.abs(canon_traj.column("x"))) < 1e-12
    assert np.max(np.abs(canon_traj.column("u_delta"))) < 1e-12
    w = canon_traj.column("w")
    assert np.all(np.diff(w) > 0)
    assert canon_traj.t_end == pytest.approx(canon_traj.t_start + 0.3, abs=1e-13)


def test_canon_entropy_margins(canon_traj):
    for s in canon_traj.samples:
        m = ds.entropy_margins(s.sides, s.state.u_delta)
        assert min(m) >= 1e-6


def test_canon_rh_consistency(canon_traj):
    d_mass, d_mom = ds.rh_consistency(canon_traj)
    assert np.max(np.abs(d_mass)) <= 1e-5 and np.max(np.abs(d_mom)) <= 1e-5


def test_perturbed_trajectory_confined(perturbed_traj):
    x = perturbed_traj.column("x")
    assert np.all(perturbed_traj.column("gamma_r") < x)
    assert np.all(x < perturbed_traj.column("gamma_l"))
    assert perturbed_traj.column("entropy_ok").all()
    d_mass, d_mom = ds.rh_consistency(perturbed_traj)
    assert np.max(np.abs(d_mass)) <= 1e-5 and np.max(np.abs(d_mom)) <= 1e-5


def test_step_halving_converges(perturbed_map, perturbed_traj):
    p = perturbed_map.params
    fine_map = ch.CharacteristicMap(perturbed_map.data,
                                    ChaplyginParams(ode_dt=p.ode_dt / 2),
                                    perturbed_map.report)
    fine = ds.integrate_delta_shock(fine_map, w0=1e-3, delta_start=1e-2, T=0.3)
    a, b = perturbed_traj.samples[-1].state, fine.samples[-1].state
    for f in ("x", "u_delta", "w"):
        assert abs(getattr(a, f) - getattr(b, f)) <= 1e-8 * (1 + abs(getattr(b, f)))


def test_fd_derivative_exact_on_quartics():
    t = np.sort(np.random.default_rng(1).uniform(0, 1, 20))
    y = 3 * t ** 4 - t ** 2 + 2
    assert np.allclose(ds.fd_derivative(t, y), 12 * t ** 3 - 2 * t, atol=1e-9)


# -- classical relations fail at the nascent shock -------------------------------------

def test_classical_rh_residual_nonzero(canon_map):
    res = [ds.classical_rh_residual(canon_map, d) for d in (2.5e-3, 1e-2, 4e-2, 1.6e-1)]
    r1 = np.array([r[0] for r in res])
    assert np.all(r1 > 1e-3)
    # The mass relation cannot hold: [rho] = 0 but [rho u] < 0.
    assert all(r[1] < 1e-8 for r in res)


# -- weak form ------------------------------------------------------------------------

def test_bump_vanishes_outside():
    phi = ds.BumpTest(1.0, 0.0, 0.1, 0.2)
    assert phi(1.2, 0.0) == 0.0 and phi(1.0, 0.3) == 0.0 and phi(1.0, 0.0) == 1.0


def test_bump_derivatives_fd():
    phi = ds.BumpTest(1.0, 0.1, 0.2, 0.3)
    t, x, h = 1.05, 0.17, 1e-6
    _, pt, px = phi.eval(t, x)
    assert pt == pytest.approx((phi(t + h, x) - phi(t - h, x)) / (2 * h), rel=1e-6)
    assert px == pytest.approx((phi(t, x + h) - phi(t, x - h)) / (2 * h), rel=1e-6)


def test_weak_residual_smooth_region(canon_map):
    phi = ds.BumpTest(0.5 * canon_map.t0, 0.4, 0.2, 0.5)
    r = ds.weak_residual(canon_map, None, phi)
    assert abs(r[0]) < 1e-9 and abs(r[1]) < 1e-9


def test_weak_residual_requires_trajectory(canon_map):
    phi = ds.BumpTest(canon_map.t0 + 0.1, 0.0, 0.05, 0.3)
    with pytest.raises(SupportViolation):
        ds.weak_residual(canon_map, None, phi)


def test_weak_residual_bad_region(canon_map):
    phi = ds.BumpTest(0.5, 0.0, 0.2, 0.5)
    with pytest.raises(SupportViolation):
        ds.weak_residual(canon_map, None, phi, region=(0.4, 0.6, -0.5, 0.5))


@pytest.mark.parametrize("xc", [0.0, 0.1])
def test_weak_residual_straddling_shock_converges(canon_map, canon_traj, xc):
    mid = 0.5 * (canon_traj.t_start + canon_traj.t_end)
    phi = ds.BumpTest(mid, xc, 0.12, 0.3)
    tol = 10 * canon_map.params.quad_tol
    res = [ds.weak_residual(canon_map, canon_traj, phi, n=n) for n in (12, 24, 48)]
    for k in (0, 1):
        for a, b in zip(res[:-1], res[1:]):
            assert abs(b[k]) <= abs(a[k]) / 4 or abs(b[k]) <= tol
    assert abs(res[-1][0]) < 1e-6 and abs(res[-1][1]) < 1e-6


def test_weak_residual_detects_wrong_weight(canon_map, canon_traj):
    mid = 0.5 * (canon_traj.t_start + canon_traj.t_end)
    bad = ds.DeltaShockTrajectory(
        [ds.ShockSample(ds.DeltaShockState(s.state.t, s.state.x, s.state.u_delta,
                                           2 * s.state.w), s.sides, True, s.udot,
                        2 * s.wdot) for s in canon_traj.samples],
        canon_traj.t_start, canon_traj.horizon)
    r = ds.weak_residual(canon_map, bad, ds.BumpTest(mid, 0.0, 0.12, 0.3), n=48)
    assert abs(r[0]) > 1e-3


# -- conservation ---------------------------------------------------------------------

def test_audit_strict_rejects_unequal_far_field(canon_map, canon_traj):
    with pytest.raises(BoundaryMismatch):
        ds.conservation_audit(canon_map, canon_traj, (-8.0, 8.0), n_times=3)


def test_audit_balanced_conserves(canon_map, canon_traj):
    led = ds.conservation_audit(canon_map, canon_traj, (-8.0, 8.0), boundary="balanced",
                                n_times=5)
    assert np.max(np.abs(led.mass_drift)) <= 1e-6
    assert np.max(np.abs(led.momentum_drift)) <= 1e-6
    # Independent oracle for the field mass: along a level curve rho dx = 2 d(alpha).
    for t, s_rho in zip(led.t, led.S_rho):
        smp = next(s for s in canon_traj.samples if s.state.t == t)
        (al, _), (ar, _) = smp.sides.roots
        a_lo = ch.evaluate_solution(canon_map, t, -8.0)[0].alpha
        a_hi = ch.evaluate_solution(canon_map, t, 8.0)[0].alpha
        assert s_rho == pytest.approx(2 * (al - a_lo) + 2 * (a_hi - ar), rel=1e-9)


def test_audit_pre_blowup(canon_map):
    times = np.linspace(0.0, 0.9 * canon_map.t0, 5)
    led = ds.conservation_audit(canon_map, None, (-8.0, 8.0), boundary="balanced",
                                times=times)
    assert np.max(np.abs(led.mass_drift)) <= 1e-9
    assert np.all(led.delta_mass == 0)
    with pytest.raises(ValueError):
        ds.conservation_audit(canon_map, None, boundary="raw", times=[canon_map.t0 + 0.1])
