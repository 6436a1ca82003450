"""Brute-force finite-volume solver for the conservative system.

Rusanov fluxes on a uniform grid, by default with MUSCL-minmod
reconstruction and Heun time stepping (``limiter="none"`` gives the
first-order scheme). It knows nothing about characteristics and
serves only as an independent check of the smooth solution and of the
location where density concentrates.
"""
from dataclasses import dataclass, replace

import numpy as np

from .errors import PositivityLoss


@dataclass(frozen=True)
class Field1D:
    x_centers: np.ndarray
    rho: np.ndarray
    m: np.ndarray
    t: float
    dx: float

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if not (len(self.x_centers) == len(self.rho) == len(self.m)):
            raise ValueError("field arrays differ in length")
        if not np.all(self.rho > 0):
            raise ValueError("density must be positive in every cell")

    @property
    def u(self):
        return self.m / self.rho

    def mass(self):
        return float(np.sum(self.rho) * self.dx)

    def momentum(self):
        return float(np.sum(self.m) * self.dx)


@dataclass(frozen=True)
class SchemeConfig:
    n_cells: int = 2000
    cfl: float = 0.5
    limiter: str = "minmod"
    bc: str = "constant-extrapolation"

    def __post_init__(self):
        if int(self.n_cells) < 4:
            raise ValueError("n_cells must be at least 4")
        if not 0 < self.cfl <= 0.9:
            raise ValueError(f"cfl must lie in (0, 0.9], got {self.cfl}")
        if self.limiter not in ("none", "minmod"):
            raise ValueError(f"unknown limiter {self.limiter!r}")
        if self.bc != "constant-extrapolation":
            raise ValueError(f"unsupported boundary condition {self.bc!r}")


def fv_init(data, params, cfg, window):
    """Cell values of (rho0, rho0 u0) sampled at the cell midpoints."""
    lo, hi = map(float, window)
    if not (data.contains(lo) and data.contains(hi)) or not hi > lo:
        raise ValueError(f"window {window} not inside the data domain {data.domain}")
    n = int(cfg.n_cells)
    dx = (hi - lo) / n
    xc = lo + dx * (np.arange(n) + 0.5)
    lm, lp = data.lam_minus(xc), data.lam_plus(xc)
    rho = 2.0 * params.mu / (lp - lm)
    u = 0.5 * (lp + lm)
    return Field1D(xc, rho, rho * u, 0.0, dx)


def _flux(rho, m, params):
    u = m / rho
    return m, m * u + params.p0 - params.mu ** 2 / rho


def _speed(rho, m, params):
    return np.abs(m / rho) + params.mu / rho


def max_wave_speed(field, params):
    return float(np.max(_speed(field.rho, field.m, params)))


def _minmod(a, b):
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _rhs(rho, m, dx, params, limiter):
    # Two ghost cells per side, constant extrapolation.
    r = np.concatenate([[rho[0]] * 2, rho, [rho[-1]] * 2])
    q = np.concatenate([[m[0]] * 2, m, [m[-1]] * 2])
    if limiter == "minmod":
        sr = _minmod(r[1:-1] - r[:-2], r[2:] - r[1:-1])
        sq = _minmod(q[1:-1] - q[:-2], q[2:] - q[1:-1])
        # Faces between cells 1..n+2 of the padded array.
        rl, rr = r[1:-2] + 0.5 * sr[:-1], r[2:-1] - 0.5 * sr[1:]
        ql, qr = q[1:-2] + 0.5 * sq[:-1], q[2:-1] - 0.5 * sq[1:]
    else:
        rl, rr, ql, qr = r[1:-2], r[2:-1], q[1:-2], q[2:-1]
    if np.any(rl <= 0) or np.any(rr <= 0):
        raise PositivityLoss("reconstructed density not positive")
    fl, fr = _flux(rl, ql, params), _flux(rr, qr, params)
    a = np.maximum(_speed(rl, ql, params), _speed(rr, qr, params))
    f_rho = 0.5 * (fl[0] + fr[0]) - 0.5 * a * (rr - rl)
    f_m = 0.5 * (fl[1] + fr[1]) - 0.5 * a * (qr - ql)
    return -(f_rho[1:] - f_rho[:-1]) / dx, -(f_m[1:] - f_m[:-1]) / dx


def stable_dt(field, params, cfg):
    return cfg.cfl * field.dx / max_wave_speed(field, params)


def fv_step(field, params, cfg, dt=None):
    """One conservative update; ``dt`` defaults to the CFL step (and may only be smaller)."""
    dt_cfl = stable_dt(field, params, cfg)
    dt = dt_cfl if dt is None else min(dt, dt_cfl)
    rho, m = field.rho, field.m
    try:
        d_r, d_m = _rhs(rho, m, field.dx, params, cfg.limiter)
        r1, m1 = rho + dt * d_r, m + dt * d_m
        if cfg.limiter == "minmod":
            if np.any(r1 <= 0):
                raise PositivityLoss("stage density not positive")
            d_r, d_m = _rhs(r1, m1, field.dx, params, cfg.limiter)
            r1 = 0.5 * (rho + r1 + dt * d_r)
            m1 = 0.5 * (m + m1 + dt * d_m)
    except PositivityLoss as exc:
        raise PositivityLoss(str(exc), t=field.t) from None
    bad = np.flatnonzero(r1 <= 0)
    if bad.size:
        raise PositivityLoss("density not positive after update", t=field.t + dt,
                             cell=int(bad[0]), x=float(field.x_centers[bad[0]]))
    return replace(field, rho=r1, m=m1, t=field.t + dt)


def fv_run(data, params, cfg, window, t_end, record=None, field=None):
    """Step from t = 0 (or ``field``) to exactly ``t_end``.

    ``record(field, dt)`` is called after every step.
    """
    f = fv_init(data, params, cfg, window) if field is None else field
    while f.t < t_end:
        remaining = t_end - f.t
        dt = min(stable_dt(f, params, cfg), remaining)
        f = fv_step(f, params, cfg, dt)
        if remaining - dt <= 0:
            f = replace(f, t=float(t_end))
        if record is not None:
            record(f, dt)
    return f


@dataclass(frozen=True)
class FieldError:
    l1_rho: float
    linf_rho: float
    l1_u: float
    linf_u: float

    @property
    def l1(self):
        return self.l1_rho

    @property
    def linf(self):
        return self.linf_rho


def compare(field, cm):
    """Cell-centre differences against the characteristic solution (t < t0 only)."""
    if cm.has_cusp and not field.t < cm.t0:
        raise ValueError(f"comparison needs t < t0 = {cm.t0}, got {field.t}")
    if field.t == 0:
        lm, lp = cm.data.lam_minus(field.x_centers), cm.data.lam_plus(field.x_centers)
        rho = 2.0 * cm.params.mu / (lp - lm)
        u = 0.5 * (lp + lm)
    else:
        rho, u, _, _ = cm.branch_state(field.t, field.x_centers, None)
    dr = np.abs(field.rho - rho)
    du = np.abs(field.u - u)
    return FieldError(float(dr.sum() * field.dx), float(dr.max()),
                      float(du.sum() * field.dx), float(du.max()))
