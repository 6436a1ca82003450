"""Chaplygin pressure law p = p0 - mu^2/rho and its Riemann invariants."""
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePairError


@dataclass(frozen=True)
class ChaplyginParams:
    """Gas constants plus every numerical tolerance used by a run.

    ``ode_tol`` (step-halving acceptance) and ``rho_cap`` (clipping of
    near-singular side states) are carried here so that a run has a single
    immutable context.
    """

    mu: float = 1.0
    p0: float = 1.0
    quad_tol: float = 1e-10
    root_tol: float = 1e-10
    ode_dt: float = 5e-4
    ode_tol: float = 1e-10
    rho_cap: float = 1e8

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        for name in ("quad_tol", "root_tol", "ode_dt", "ode_tol", "rho_cap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class PhysState:
    rho: float
    u: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"density must be positive, got {self.rho}")


@dataclass(frozen=True)
class RiemannPair:
    lam_minus: float
    lam_plus: float

    def __post_init__(self):
        if not self.lam_plus > self.lam_minus:
            raise ValueError("lam_plus must exceed lam_minus")


def pressure(state, params):
    return params.p0 - params.mu ** 2 / state.rho


def sound_speed(state, params):
    # p'(rho) = mu^2/rho^2
    return params.mu / state.rho


def to_invariants(state, params):
    c = params.mu / state.rho
    return RiemannPair(state.u - c, state.u + c)


def from_invariants(pair, params):
    """Physical state from a RiemannPair or a plain (lam_minus, lam_plus) tuple.

    Tuples bypass the ordering check of RiemannPair so that a collapsed pair
    surfaces as DegeneratePairError (concentration) rather than ValueError.
    """
    if isinstance(pair, RiemannPair):
        lm, lp = pair.lam_minus, pair.lam_plus
    else:
        lm, lp = map(float, pair)
    gap = lp - lm
    if gap <= params.root_tol * max(1.0, abs(lp), abs(lm)):
        raise DegeneratePairError(
            "lam_plus - lam_minus below tolerance (concentration)",
            lam_minus=lm, lam_plus=lp)
    return PhysState(rho=2.0 * params.mu / gap, u=0.5 * (lp + lm))


# Array forms used by the solvers; no validation.

def rho_u_from_invariants(lam_minus, lam_plus, mu):
    lam_minus = np.asarray(lam_minus, dtype=float)
    lam_plus = np.asarray(lam_plus, dtype=float)
    return 2.0 * mu / (lam_plus - lam_minus), 0.5 * (lam_plus + lam_minus)


def pressure_array(rho, params):
    return params.p0 - params.mu ** 2 / np.asarray(rho, dtype=float)
