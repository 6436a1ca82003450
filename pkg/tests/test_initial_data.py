import numpy as np
import pytest
from hypothesis import given, strategies as st

from chaplygin_lab.initial_data import (FAMILIES, canon, family, from_expressions,
                                        from_physical, parse_expression, perturbed)

xs = st.floats(-4, 4)


@given(xs)
def test_canon_values(x):
    d = canon()
    assert d.lam_plus(x) == pytest.approx(0.5 - np.tanh(x), abs=1e-15)
    assert d.lam_minus(x) == pytest.approx(-0.5 - np.tanh(x), abs=1e-15)
    # rho0 = 2 mu everywhere, u0 odd
    assert d.lam_plus(x) - d.lam_minus(x) == pytest.approx(1.0, abs=4e-16)
    assert d.lam_plus(x) + d.lam_minus(x) == pytest.approx(-(d.lam_plus(-x) + d.lam_minus(-x)))


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_derivatives_match_finite_differences(name):
    d = family(name)
    x = np.linspace(*d.domain, 41)[1:-1]
    h = 1e-5
    for fn in (d.lam_minus, d.lam_plus):
        fd1 = (fn(x + h) - fn(x - h)) / (2 * h)
        fd2 = (fn(x + h, 1) - fn(x - h, 1)) / (2 * h)
        assert np.allclose(fn(x, 1), fd1, atol=1e-8)
        assert np.allclose(fn(x, 2), fd2, atol=1e-8)


def test_expression_route_matches_builtin():
    d = from_expressions("-1/2 - tanh(x)", "1/2 - tanh(x)", (-5, 5))
    c = canon()
    x = np.linspace(-5, 5, 101)
    for k in range(3):
        assert np.allclose(d.lam_minus(x, k), c.lam_minus(x, k), atol=1e-14)
        assert np.allclose(d.lam_plus(x, k), c.lam_plus(x, k), atol=1e-14)


def test_physical_route():
    d = from_physical("2", "-tanh(x)", 1.0, (-5, 5))
    assert np.allclose(d.lam_plus(np.array([0.3])), 0.5 - np.tanh(0.3))


def test_expression_grammar():
    assert float(parse_expression("2^3 + sech(0)").evalf()) == 9.0
    with pytest.raises(ValueError):
        parse_expression("y + 1")
    with pytest.raises(ValueError):
        parse_expression("tanh(")


def test_scalar_in_scalar_out():
    assert isinstance(canon().lam_plus(0.2), float)
    assert isinstance(family("constant").lam_plus(0.2), float)
    assert family("constant").lam_plus(np.zeros(3)).shape == (3,)


def test_registry():
    with pytest.raises(KeyError, match="known"):
        family("nope")
    assert family("canon", domain=(-3, 3)).domain == (-3, 3)
    p = perturbed(canon(), 0.05)
    assert p.lam_plus(0.0) == pytest.approx(0.55)
