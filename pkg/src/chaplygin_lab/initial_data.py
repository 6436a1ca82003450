"""Initial data in Riemann-invariant form, plus the built-in family registry.

Data is always analytic: each invariant comes with exact first and second
derivatives, either hand-written (built-in families) or obtained by
symbolic differentiation of a user expression.
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import sympy

_X = sympy.Symbol("x")
_ALLOWED = {
    "x": _X,
    "tanh": sympy.tanh,
    "sech": sympy.sech,
    "exp": sympy.exp,
    "pi": sympy.pi,
    "E": sympy.E,
}


def _sech(x):
    return 1.0 / np.cosh(x)


@dataclass(frozen=True)
class InitialData:
    """Lambda_- and Lambda_+ with derivatives on a closed interval.

    ``minus`` and ``plus`` are triples (value, first, second derivative) of
    numpy-vectorised callables.
    """

    minus: tuple
    plus: tuple
    domain: tuple
    name: str = "custom"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        lo, hi = self.domain
        if not hi > lo:
            raise ValueError(f"empty domain {self.domain}")

    def lam_minus(self, x, d=0):
        return self.minus[d](np.asarray(x, dtype=float))

    def lam_plus(self, x, d=0):
        return self.plus[d](np.asarray(x, dtype=float))

    def contains(self, x, slack=0.0):
        lo, hi = self.domain
        x = np.asarray(x)
        return (x >= lo - slack) & (x <= hi + slack)


def _broadcast(fn):
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        if not x.ndim:
            return float(fn(x))
        out = np.asarray(fn(x), dtype=float)
        if out.shape != x.shape:
            out = np.broadcast_to(out, x.shape).copy()
        return out
    return wrapped


def _const(c):
    return _broadcast(lambda x: np.full(np.shape(x), float(c)))


def canon(domain=(-12.0, 12.0)):
    """Lambda_+ = 1/2 - tanh x, Lambda_- = -1/2 - tanh x (rho0 = 2 mu)."""
    def val(c):
        return _broadcast(lambda x: c - np.tanh(x))

    d1 = _broadcast(lambda x: -_sech(x) ** 2)
    d2 = _broadcast(lambda x: 2.0 * _sech(x) ** 2 * np.tanh(x))
    return InitialData((val(-0.5), d1, d2), (val(0.5), d1, d2),
                       tuple(domain), name="canon")


def constant(lam_minus=-1.0, lam_plus=1.0, domain=(-5.0, 5.0), name="constant"):
    zero = _const(0.0)
    return InitialData((_const(lam_minus), zero, zero),
                       (_const(lam_plus), zero, zero),
                       tuple(domain), name=name)


def shifted(data, shift):
    """Translate the data: Lambda(x) -> Lambda(x - shift)."""
    def sh(fns):
        return tuple(_broadcast(lambda x, f=f: f(x - shift)) for f in fns)
    lo, hi = data.domain
    return InitialData(sh(data.minus), sh(data.plus), (lo + shift, hi + shift),
                       name=f"{data.name}+shift({shift:g})")


def scaled(data, factor):
    """Lambda -> factor * Lambda (factor > 0 keeps the ordering)."""
    def sc(fns):
        return tuple(_broadcast(lambda x, f=f: factor * f(x)) for f in fns)
    return InitialData(sc(data.minus), sc(data.plus), data.domain,
                       name=f"{data.name}*{factor:g}")


def perturbed(data, eps=0.05, domain=None):
    """Add eps*sech(x) to both invariants (breaks the odd symmetry of u0)."""
    bump = (lambda x: eps * _sech(x),
            lambda x: -eps * _sech(x) * np.tanh(x),
            lambda x: eps * _sech(x) * (np.tanh(x) ** 2 - _sech(x) ** 2))

    def add(fns):
        return tuple(_broadcast(lambda x, f=f, b=b: f(x) + b(x))
                     for f, b in zip(fns, bump))
    return InitialData(add(data.minus), add(data.plus),
                       tuple(domain) if domain else data.domain,
                       name=f"{data.name}+{eps:g}sech")


def parse_expression(text):
    """Parse a Lambda expression in x; '^' means power."""
    from sympy.parsing.sympy_parser import parse_expr, standard_transformations
    try:
        expr = parse_expr(text.replace("^", "**"), local_dict=dict(_ALLOWED),
                          global_dict={"__builtins__": {}, "Integer": sympy.Integer,
                                       "Float": sympy.Float, "Rational": sympy.Rational,
                                       "Symbol": sympy.Symbol},
                          transformations=standard_transformations)
    except Exception as exc:  # sympy raises a zoo of types
        raise ValueError(f"cannot parse expression {text!r}: {exc}") from None
    extra = expr.free_symbols - {_X}
    if extra:
        raise ValueError(f"unknown symbols in {text!r}: "
                         + ", ".join(sorted(map(str, extra))))
    return expr


def _lambdify3(expr):
    mods = [{"sech": _sech}, "numpy"]
    out = []
    for k in range(3):
        f = sympy.lambdify(_X, sympy.diff(expr, _X, k), modules=mods)
        out.append(_broadcast(f))
    return tuple(out)


def from_expressions(lam_minus, lam_plus, domain, name="expr"):
    em, ep = parse_expression(lam_minus), parse_expression(lam_plus)
    return InitialData(_lambdify3(em), _lambdify3(ep), tuple(domain), name=name,
                       meta={"lam_minus": str(em), "lam_plus": str(ep)})


def from_physical(rho0, u0, mu, domain, name="expr"):
    """Lambda_pm = u0 +- mu/rho0 from density/velocity expressions."""
    er, eu = parse_expression(rho0), parse_expression(u0)
    em, ep = eu - mu / er, eu + mu / er
    return InitialData(_lambdify3(em), _lambdify3(ep), tuple(domain), name=name,
                       meta={"lam_minus": str(em), "lam_plus": str(ep)})


FAMILIES: dict[str, Callable] = {
    "canon": lambda: canon(),
    "canon_shifted": lambda: shifted(canon(), 1.0),
    "canon_scaled": lambda: scaled(canon(), 2.0),
    "canon_perturbed": lambda: perturbed(canon(), 0.05, domain=(-3.5, 3.5)),
    "constant": lambda: constant(),
    "swapped": lambda: constant(1.0, -1.0, name="swapped"),
}


def family(name, domain=None):
    try:
        data = FAMILIES[name]()
    except KeyError:
        raise KeyError(f"unknown family {name!r}; known: {sorted(FAMILIES)}") from None
    if domain is not None:
        data = InitialData(data.minus, data.plus, tuple(domain), name=data.name)
    return data
