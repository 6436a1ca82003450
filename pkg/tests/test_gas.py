import numpy as np
import pytest
from hypothesis import given, strategies as st

from chaplygin_lab.errors import DegeneratePairError
from chaplygin_lab.gas import (ChaplyginParams, PhysState, RiemannPair, from_invariants,
                               pressure, sound_speed, to_invariants)


def P(**kw):
    return ChaplyginParams(**kw)


@pytest.mark.parametrize("rho,mu,p0,expected,tol", [
    (1.0, 1.0, 1.0, 0.0, 0.0),
    (1e12, 1.0, 1.0, 1.0, 1e-11),
    (2.0, 1.0, 0.0, -0.5, 0.0),
])
def test_pressure(rho, mu, p0, expected, tol):
    assert abs(pressure(PhysState(rho, 0.0), P(mu=mu, p0=p0)) - expected) <= tol


@pytest.mark.parametrize("rho,mu,c", [(2.0, 1.0, 0.5), (1.0, 3.0, 3.0), (0.5, 1.0, 2.0)])
def test_sound_speed(rho, mu, c):
    assert sound_speed(PhysState(rho, 0.3), P(mu=mu)) == c


@pytest.mark.parametrize("rho,u,pair", [(2.0, 0.0, (-0.5, 0.5)), (1.0, 1.0, (0.0, 2.0))])
def test_invariant_examples(rho, u, pair):
    p = to_invariants(PhysState(rho, u), P())
    assert (p.lam_minus, p.lam_plus) == pair
    back = from_invariants(RiemannPair(*pair), P())
    assert (back.rho, back.u) == (rho, u)


def test_collapsed_pair_is_concentration():
    with pytest.raises(DegeneratePairError):
        from_invariants((1.0, 1.0), P())
    # Relative threshold: a tiny gap at large scale is also degenerate.
    with pytest.raises(DegeneratePairError):
        from_invariants((1e6, 1e6 + 1e-5), P())
    from_invariants((1e-6, 1e-6 + 1e-9), P())


def test_type_invariants():
    with pytest.raises(ValueError):
        PhysState(0.0, 1.0)
    with pytest.raises(ValueError):
        RiemannPair(1.0, 1.0)
    with pytest.raises(ValueError):
        ChaplyginParams(mu=0.0)
    with pytest.raises(ValueError):
        ChaplyginParams(quad_tol=-1.0)


states = st.tuples(st.floats(1e-3, 1e3), st.floats(-50, 50), st.floats(0.1, 10))


@given(states)
def test_round_trip(s):
    rho, u, mu = s
    p = P(mu=mu)
    pair = to_invariants(PhysState(rho, u), p)
    assert pair.lam_plus - pair.lam_minus > 0
    back = from_invariants(pair, p)
    # The gap lam_+ - lam_- cancels |u| against mu/rho; the attainable
    # relative accuracy degrades with the ratio |u| rho / mu.
    cond = 1.0 + abs(u) * rho / mu
    assert back.rho == pytest.approx(rho, rel=max(1e-12, 8 * np.finfo(float).eps * cond))
    assert back.u == pytest.approx(u, rel=1e-12, abs=1e-12 * (1 + mu / rho))


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_density_decreases_with_gap(g1, g2):
    if g1 == g2:
        return
    r1 = from_invariants((0.0, g1), P()).rho
    r2 = from_invariants((0.0, g2), P()).rho
    assert (r1 - r2) * (g1 - g2) < 0
