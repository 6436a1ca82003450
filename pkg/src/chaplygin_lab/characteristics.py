"""Geometry of the classical solution in characteristic parameters.

A point (alpha, beta) with alpha <= beta labels the minus-family
characteristic leaving x = alpha (it carries lam_- = Lambda_-(alpha) and
moves with speed lam_+) and the plus-family characteristic leaving
x = beta (carries lam_+ = Lambda_+(beta), moves with speed lam_-). The map
Pi(alpha, beta) = (t, x) sends the pair to their meeting point:

    t = int_alpha^beta d z / D(z),
    x = (alpha + beta + int_alpha^beta S(z)/D(z) dz) / 2,

with D = Lambda_+ - Lambda_- and S = Lambda_+ + Lambda_-. The labelling of
the families follows the source construction: x^- moves with lam_+.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import (AmbiguousCusp, AssumptionsFailed, BlowupReached,
                     DegenerateClassification, DomainError, NoCuspFound,
                     NoRootError, RootStallError, SideSelectionAmbiguous,
                     UnsolvableBeta)
from .gas import PhysState, RiemannPair, from_invariants
from .quadrature import Antiderivative

_EPS = np.finfo(float).eps


def bracketed_newton(fun, lo, hi, x0=None, xtol=1e-15, ftol=0.0, maxiter=100):
    """Vectorised safeguarded Newton for a root bracketed by [lo, hi].

    ``fun(x)`` returns (f, df). f(lo) and f(hi) must differ in sign (or one
    be zero); steps leaving the bracket fall back to bisection. Returns
    (root, residual, converged) as 1-d arrays.
    """
    lo, hi = np.broadcast_arrays(np.array(lo, dtype=float, ndmin=1),
                                 np.array(hi, dtype=float, ndmin=1))
    lo, hi = lo.copy(), hi.copy()
    flo, _ = fun(lo)
    flo = np.broadcast_to(flo, lo.shape)
    if x0 is None:
        x = 0.5 * (lo + hi)
    else:
        x = np.clip(np.broadcast_to(np.asarray(x0, dtype=float), lo.shape),
                    np.minimum(lo, hi), np.maximum(lo, hi))
    f, df = fun(x)
    done = np.zeros(x.shape, dtype=bool)
    for _ in range(maxiter):
        done |= np.abs(f) <= ftol
        if done.all():
            break
        same = np.sign(f) == np.sign(flo)
        upd = ~done
        lo = np.where(same & upd, x, lo)
        flo = np.where(same & upd, f, flo)
        hi = np.where(~same & upd, x, hi)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            step = x - f / df
        a, b = np.minimum(lo, hi), np.maximum(lo, hi)
        bad = ~np.isfinite(step) | (step <= a) | (step >= b)
        nx = np.where(bad, 0.5 * (lo + hi), step)
        moved = np.abs(nx - x)
        x = np.where(done, x, nx)
        done |= (moved <= xtol * (1.0 + np.abs(x))) | (b - a <= xtol * (1.0 + np.abs(x)))
        f, df = fun(x)
    return x, f, done


# ---------------------------------------------------------------------------
# Pieces that only need the data (used before a map exists).

def _gap(data, z):
    return data.lam_plus(z) - data.lam_minus(z)


def sigma_beta(data, alpha):
    """beta(alpha) = Lambda_+^{-1}(Lambda_-(alpha)); NaN where unsolvable."""
    lo, hi = data.domain
    scalar = np.ndim(alpha) == 0
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    target = data.lam_minus(alpha)
    plo, phi = float(data.lam_plus(lo)), float(data.lam_plus(hi))
    ok = (target <= plo) & (target >= phi)
    tgt = np.where(ok, target, 0.5 * (plo + phi)).ravel()
    x0 = lo + (hi - lo) * (plo - tgt) / (plo - phi)
    beta, _, _ = bracketed_newton(
        lambda b: (data.lam_plus(b) - tgt, data.lam_plus(b, 1)),
        np.full(tgt.shape, float(lo)), np.full(tgt.shape, float(hi)), x0=x0)
    beta = np.where(ok, beta.reshape(alpha.shape), np.nan)
    return float(beta[0]) if scalar else beta


def cusp_function(data, alpha, beta=None):
    """f(alpha) whose zero marks the cusp; see ``cusp_function_prime``."""
    if beta is None:
        beta = sigma_beta(data, alpha)
    return (data.lam_minus(alpha, 1) / _gap(data, beta)
            - data.lam_plus(beta, 1) / _gap(data, alpha))


def cusp_function_prime(data, alpha, beta=None):
    """Analytic derivative of f along the singular curve."""
    if beta is None:
        beta = sigma_beta(data, alpha)
    lm1, lm2 = data.lam_minus(alpha, 1), data.lam_minus(alpha, 2)
    lp1a = data.lam_plus(alpha, 1)
    lp1b, lp2b = data.lam_plus(beta, 1), data.lam_plus(beta, 2)
    lm1b = data.lam_minus(beta, 1)
    da, db = _gap(data, alpha), _gap(data, beta)
    dpa = lp1a - lm1
    dpb = lp1b - lm1b
    bprime = lm1 / lp1b
    return (lm2 / db - lm1 * dpb * bprime / db ** 2
            - lp2b * bprime / da + lp1b * dpa / da ** 2)


@dataclass(frozen=True)
class AssumptionReport:
    h1_ok: bool
    h2_ok: bool
    h3_ok: bool
    h4_ok: bool
    h5_ok: bool
    alpha0: float = float("nan")
    beta0: float = float("nan")
    f_alpha0: float = float("nan")
    fprime_alpha0: float = float("nan")
    witnesses: tuple = ()
    sigma_range: tuple = (float("nan"), float("nan"))
    zeros: tuple = ()

    @property
    def ok(self):
        return self.h1_ok and self.h2_ok and self.h3_ok and self.h4_ok and self.h5_ok

    @property
    def bracket(self):
        """Interval around alpha0 on which f has no other zero."""
        return self.sigma_range

    def to_dict(self):
        return {
            "h1_ok": self.h1_ok, "h2_ok": self.h2_ok, "h3_ok": self.h3_ok,
            "h4_ok": self.h4_ok, "h5_ok": self.h5_ok, "ok": self.ok,
            "alpha0": self.alpha0, "beta0": self.beta0,
            "f_alpha0": self.f_alpha0, "fprime_alpha0": self.fprime_alpha0,
            "sigma_range": list(self.sigma_range),
            "witnesses": [[k, x] for k, x in self.witnesses],
        }


def check_assumptions(data, params, n_grid=256):
    """Verify H1-H5 and locate the cusp parameters (alpha0, beta0).

    H1/H2 failures are reported (with witness locations) rather than raised;
    a missing or non-unique zero of f raises.
    """
    if n_grid < 16:
        raise ValueError("n_grid must be at least 16")
    lo, hi = data.domain
    xs = np.linspace(lo, hi, n_grid)
    lm, lp = data.lam_minus(xs), data.lam_plus(xs)
    witnesses = [("H1", float(x)) for x in xs[~(lm < lp)]]
    h1 = not witnesses
    dm, dp = data.lam_minus(xs, 1), data.lam_plus(xs, 1)
    bad2 = xs[~((dm < 0) & (dp < 0))]
    witnesses += [("H2", float(x)) for x in bad2]
    h2 = bad2.size == 0
    if not (h1 and h2):
        return AssumptionReport(h1, h2, False, False, False, witnesses=tuple(witnesses))

    # alpha-range on which Lambda_-(alpha) lies in the range of Lambda_+.
    phi = float(data.lam_plus(hi))
    if float(data.lam_minus(lo)) < phi:
        raise NoCuspFound("singular set is empty on the domain")
    b = hi if float(data.lam_minus(hi)) >= phi else brentq(
        lambda a: float(data.lam_minus(a)) - phi, lo, hi, xtol=1e-15, rtol=4 * _EPS)
    a = lo
    grid = np.linspace(a, b, n_grid)
    fv = cusp_function(data, grid)
    zeros = []
    for i in range(n_grid - 1):
        if fv[i] == 0.0:
            zeros.append(float(grid[i]))
        elif fv[i] * fv[i + 1] < 0:
            zeros.append(brentq(lambda s: float(cusp_function(data, s)),
                                grid[i], grid[i + 1], xtol=1e-15, rtol=4 * _EPS))
    if fv[-1] == 0.0:
        zeros.append(float(grid[-1]))
    if not zeros:
        raise NoCuspFound("f has no sign change on the singular set",
                          sigma_range=[a, b])
    if len(zeros) > 1:
        raise AmbiguousCusp("f has several zeros", zeros=zeros)
    alpha0 = zeros[0]
    beta0 = sigma_beta(data, alpha0)
    f0 = float(cusp_function(data, alpha0, beta0))
    fp0 = float(cusp_function_prime(data, alpha0, beta0))
    tol = params.root_tol
    h3 = bool(alpha0 < beta0 and abs(float(data.lam_minus(alpha0)) - float(data.lam_plus(beta0))) <= tol)
    h4 = abs(f0) <= tol
    h5 = fp0 < 0
    for ok, key in ((h3, "H3"), (h4, "H4"), (h5, "H5")):
        if not ok:
            witnesses.append((key, alpha0))
    return AssumptionReport(True, True, h3, h4, h5, alpha0=alpha0, beta0=beta0,
                            f_alpha0=f0, fprime_alpha0=fp0, witnesses=tuple(witnesses),
                            sigma_range=(float(a), float(b)), zeros=tuple(zeros))


# ---------------------------------------------------------------------------

class CharacteristicMap:
    """Immutable Pi-map for one data set; cusp fields are None in diagnostic mode."""

    def __init__(self, data, params, report=None):
        self.data = data
        self.params = params
        self.report = report
        lo, hi = data.domain
        self.lo, self.hi = float(lo), float(hi)

        def inv_gap(z):
            return 1.0 / (data.lam_plus(z) - data.lam_minus(z))

        def ratio(z):
            lp, lm = data.lam_plus(z), data.lam_minus(z)
            return (lp + lm) / (lp - lm)

        self._anti = Antiderivative([inv_gap, ratio], lo, hi, tol=params.quad_tol)
        grid = np.linspace(lo, hi, 2049)
        lps, lms = data.lam_plus(grid), data.lam_minus(grid)
        pad = 1e-9 * (1.0 + np.abs(np.concatenate([lps, lms])).max())
        self.plus_range = (float(lps.min()) - pad, float(lps.max()) + pad)
        self.minus_range = (float(lms.min()) - pad, float(lms.max()) + pad)
        self._env_cache = {}
        self._env_last = {}
        if report is not None and report.ok:
            self.alpha0 = report.alpha0
            self.beta0 = report.beta0
            self.t0, self.x0 = (float(v) for v in self.pi(report.alpha0, report.beta0))
            self.sigma_range = report.sigma_range
        else:
            self.alpha0 = self.beta0 = self.t0 = self.x0 = None
            self.sigma_range = None

    # -- elementary pieces -------------------------------------------------
    def gap(self, z):
        return self.data.lam_plus(z) - self.data.lam_minus(z)

    def T(self, z):
        return self._anti(z, 0)

    def pi(self, alpha, beta):
        """Vectorised Pi without domain checks."""
        t = self._anti.definite(alpha, beta, 0)
        x = 0.5 * (np.asarray(alpha) + np.asarray(beta) + self._anti.definite(alpha, beta, 1))
        return t, x

    def partials(self, alpha, beta):
        da, db = self.gap(alpha), self.gap(beta)
        t_a = -1.0 / da
        t_b = 1.0 / db
        x_a = -self.data.lam_minus(alpha) / da
        x_b = self.data.lam_plus(beta) / db
        return t_a, t_b, x_a, x_b

    def check_domain(self, *vals):
        for v in vals:
            if not np.all(self.data.contains(v, slack=1e-12 * (1 + abs(self.hi - self.lo)))):
                raise DomainError(f"parameter outside data domain {self.data.domain}",
                                  value=np.asarray(v).tolist())

    @property
    def has_cusp(self):
        return self.alpha0 is not None

    # -- level curves t(alpha, beta) = t ---------------------------------------
    def level_beta(self, alpha, t, beta0=None):
        """beta with t(alpha, beta) = t; NaN when it would leave the domain."""
        alpha = np.asarray(alpha, dtype=float)
        t = np.broadcast_to(np.asarray(t, dtype=float), alpha.shape)
        Ta = self.T(alpha)
        Thi = float(self.T(self.hi))
        # Slack absorbs rounding at the end of alpha_span.
        ok = Thi - Ta >= t - 1e-12 * (1.0 + np.abs(t))
        target = np.minimum(Ta + t, Thi)

        def fun(b):
            return self.T(b) - tgt, 1.0 / self.gap(b)

        tgt = target.ravel()
        guess = alpha + t * self.gap(alpha) if beta0 is None else beta0
        beta, res, conv = bracketed_newton(
            fun, alpha.ravel(), np.full(alpha.size, self.hi),
            x0=np.clip(np.asarray(guess, dtype=float).ravel(), alpha.ravel(), self.hi),
            ftol=4 * _EPS * (1.0 + np.abs(tgt)))
        beta = beta.reshape(alpha.shape)
        return np.where(ok, beta, np.nan)

    def alpha_span(self, t):
        """Interval of alpha for which the level-t curve stays in the domain."""
        if t == 0:
            return self.lo, self.hi
        Thi = float(self.T(self.hi))
        if Thi - float(self.T(self.lo)) < t:
            raise NoRootError("time level beyond the reach of the data domain", t=t)
        target = Thi - t
        a_hi, _, _ = bracketed_newton(lambda a: (self.T(a) - target, 1.0 / self.gap(a)),
                                      self.lo, self.hi)
        return self.lo, float(a_hi[0])

    def level_curve(self, alpha, t, beta0=None):
        """(x, beta, dx/dalpha) along the level curve."""
        beta = self.level_beta(alpha, t, beta0)
        _, x = self.pi(alpha, beta)
        slope = (self.data.lam_plus(beta) - self.data.lam_minus(alpha)) / self.gap(alpha)
        return x, beta, slope

    # -- singular set ---------------------------------------------------------
    def sigma_beta(self, alpha):
        return sigma_beta(self.data, alpha)

    def sigma_t(self, alpha):
        beta = self.sigma_beta(alpha)
        t, x = self.pi(alpha, beta)
        return t, x, beta

    def envelope_alpha(self, side, t):
        """alpha on Sigma whose image lies at time t on Gamma_l / Gamma_r."""
        if not self.has_cusp:
            raise SideSelectionAmbiguous("no cusp: envelopes undefined")
        if t < self.t0:
            raise SideSelectionAmbiguous("time before blowup: no envelopes", t=t, t0=self.t0)
        key = (side, float(t))
        hit = self._env_cache.get(key)
        if hit is not None:
            return hit[0]
        a, b = self.sigma_range
        if side == "left":
            lo, hi = a, self.alpha0
        elif side == "right":
            lo, hi = self.alpha0, b
        else:
            raise ValueError(side)
        if t == self.t0:
            self._env_cache[key] = (self.alpha0, self.beta0)
            return self.alpha0

        def fun(al):
            tt, _, beta = self.sigma_t(al)
            return tt - t, cusp_function(self.data, al, beta) / self.data.lam_plus(beta, 1)

        if len(self._env_cache) > 4096:
            self._env_cache.clear()
        fast = self._envelope_newton(side, t, lo, hi)
        if fast is not None:
            self._env_cache[key] = fast
            return fast[0]
        end = lo if side == "left" else hi
        if float(self.sigma_t(end)[0]) < t:
            raise SideSelectionAmbiguous("envelope does not reach this time", t=t, side=side)
        # Start near the cusp using the parabolic profile of t along Sigma.
        curv = self.report.fprime_alpha0 / float(self.data.lam_plus(self.beta0, 1))
        guess = self.alpha0 + (-1 if side == "left" else 1) * np.sqrt(2 * (t - self.t0) / abs(curv))
        guess = min(max(guess, min(lo, hi)), max(lo, hi))
        root, res, conv = bracketed_newton(fun, lo, hi, x0=guess, xtol=1e-15)
        val = float(root[0])
        self._env_last[side] = (val, float(self.sigma_beta(val)))
        self._env_cache[key] = self._env_last[side]
        return val

    def _envelope_newton(self, side, t, lo, hi):
        """Warm-started Newton on Lambda_-(a) = Lambda_+(b), t(a, b) = t."""
        last = self._env_last.get(side)
        if last is None:
            return None
        a, b = last
        d = self.data
        for _ in range(20):
            f1 = d.lam_minus(a) - d.lam_plus(b)
            f2 = float(self.T(b) - self.T(a)) - t
            j11, j12 = d.lam_minus(a, 1), -d.lam_plus(b, 1)
            j21, j22 = -1.0 / self.gap(a), 1.0 / self.gap(b)
            det = j11 * j22 - j12 * j21
            if det == 0 or not np.isfinite(det):
                return None
            da = (f1 * j22 - f2 * j12) / det
            db = (f2 * j11 - f1 * j21) / det
            a, b = a - da, b - db
            if not (min(lo, hi) < a < max(lo, hi)):
                return None
            if abs(da) + abs(db) <= 1e3 * _EPS * (1.0 + abs(a) + abs(b)):
                if abs(f1) <= self.params.root_tol and abs(f2) <= self.params.root_tol * (1 + t):
                    self._env_last[side] = (a, b)
                    return a, b
                return None
        return None

    def envelope_params(self, side, t):
        """(alpha, beta) on Sigma for the envelope point at time t."""
        self.envelope_alpha(side, t)
        return self._env_cache[(side, float(t))]

    def envelope_x(self, side, t):
        al, be = self.envelope_params(side, t)
        return float(self.pi(al, be)[1])

    # -- solving Pi(alpha, beta) = (t, x) -----------------------------------------
    def solve_piece(self, t, x, a_lo, a_hi):
        """Roots of g(alpha) = x on [a_lo, a_hi] where g is monotone.

        Vectorised over x. Returns (alpha, beta) arrays; NaN where x lies
        outside g([a_lo, a_hi]).
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        a_lo = np.broadcast_to(np.asarray(a_lo, dtype=float), x.shape)
        a_hi = np.broadcast_to(np.asarray(a_hi, dtype=float), x.shape)
        g_lo, _, _ = self.level_curve(a_lo, t)
        g_hi, _, _ = self.level_curve(a_hi, t)
        inside = (x - g_lo) * (x - g_hi) <= 0
        state = {"beta": None}

        def fun(al):
            g, beta, slope = self.level_curve(al, t, state["beta"])
            state["beta"] = beta
            return g - xs, slope

        xs = x
        tol = self.params.root_tol
        # Linear interpolation is a good starting guess on a monotone piece.
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(g_hi != g_lo, (x - g_lo) / (g_hi - g_lo), 0.5)
        x0 = a_lo + np.clip(w, 0, 1) * (a_hi - a_lo)
        alpha, res, conv = bracketed_newton(fun, a_lo, a_hi, x0=x0, xtol=1e-15,
                                            ftol=1e-3 * tol * (1.0 + np.abs(x)))
        beta = self.level_beta(alpha, t)
        _, xr = self.pi(alpha, beta)
        resid = np.abs(xr - x)
        stalled = inside & (resid > tol * (1.0 + np.abs(x)))
        if stalled.any():
            raise RootStallError("level-curve solve did not converge", t=t,
                                 residual=float(resid[stalled].max()))
        return np.where(inside, alpha, np.nan), np.where(inside, beta, np.nan)

    def branch_interval(self, t, side):
        lo, hi = self.alpha_span(t)
        if self.has_cusp and t > self.t0:
            if side == "left":
                hi = min(hi, self.envelope_alpha("left", t))
            elif side == "right":
                lo = max(lo, self.envelope_alpha("right", t))
            else:
                raise SideSelectionAmbiguous("several roots; a side is required", t=t)
        return lo, hi

    def branch_solve(self, t, x, side=None):
        """Solution parameters on one branch of the (possibly folded) solution.

        ``side`` selects the branch to the left of Gamma_l ("left", alpha below
        the Gamma_l parameter) or right of Gamma_r ("right"). Before blowup
        both coincide and ``side`` may be None.
        """
        lo, hi = self.branch_interval(t, side)
        alpha, beta = self.solve_piece(t, x, lo, hi)
        if np.isnan(alpha).any():
            bad = np.atleast_1d(x)[np.isnan(alpha)]
            raise NoRootError("point outside the branch image", t=t, side=side,
                              x=bad[:5].tolist())
        return alpha, beta

    def newton_pair(self, t, x, alpha, beta, maxiter=12):
        """Plain 2-d Newton on Pi(alpha, beta) = (t, x) from a nearby guess.

        Fast path for continuation (the shock integrator re-solves the same
        branch at nearby points). Returns (alpha, beta, converged); callers
        must check which sheet the result landed on.
        """
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        a = np.array(alpha, dtype=float)
        b = np.array(beta, dtype=float)
        tol = self.params.root_tol
        ok = np.zeros(np.broadcast(a, b, x).shape, dtype=bool)
        for _ in range(maxiter):
            if not (np.all(self.data.contains(a)) and np.all(self.data.contains(b))):
                break
            tt, xx = self.pi(a, b)
            rt, rx = tt - t, xx - x
            t_a, t_b, x_a, x_b = self.partials(a, b)
            det = t_a * x_b - t_b * x_a
            with np.errstate(divide="ignore", invalid="ignore"):
                da = (rt * x_b - rx * t_b) / det
                db = (rx * t_a - rt * x_a) / det
            a = a - da
            b = b - db
            step = np.maximum(np.abs(da), np.abs(db))
            if np.all(step <= 1e3 * _EPS * (1.0 + np.abs(a) + np.abs(b))):
                ok = np.maximum(np.abs(rt), np.abs(rx)) <= tol * (1.0 + np.abs(x))
                ok = ok | (step <= 4 * _EPS * (1.0 + np.abs(a) + np.abs(b)))
                break
            if not np.all(np.isfinite(step)):
                break
        return a, b, ok

    def branch_state(self, t, x, side=None):
        """(rho, u, lam_minus, lam_plus) arrays on a branch."""
        alpha, beta = self.branch_solve(t, x, side)
        lm, lp = self.data.lam_minus(alpha), self.data.lam_plus(beta)
        rho = 2.0 * self.params.mu / (lp - lm)
        return rho, 0.5 * (lp + lm), lm, lp


@dataclass(frozen=True)
class SolutionRoot:
    """One preimage of (t, x).

    Roots on the folded sheet between the envelopes have
    lam_plus < lam_minus; they carry no physical state (``state`` is None).
    """

    alpha: float
    beta: float
    lam_minus: float
    lam_plus: float
    jacobian: float
    state: object = None

    @property
    def admissible(self):
        return self.state is not None

    @property
    def pair(self):
        return RiemannPair(self.lam_minus, self.lam_plus) if self.admissible else None


def build_map(data, params, n_grid=256, require_cusp=True):
    """Check assumptions and construct the map.

    With ``require_cusp`` False the map is built in diagnostic mode even when
    the data violate H1-H5.
    """
    try:
        report = check_assumptions(data, params, n_grid)
    except (NoCuspFound, AmbiguousCusp):
        if require_cusp:
            raise
        report = None
    if require_cusp and not report.ok:
        raise AssumptionsFailed(report)
    return CharacteristicMap(data, params, report)


def pi_map(cm, alpha, beta):
    cm.check_domain(alpha, beta)
    if np.any(np.asarray(alpha) > np.asarray(beta)):
        raise DomainError("pi_map needs alpha <= beta")
    t, x = cm.pi(alpha, beta)
    if np.ndim(t) == 0:
        return float(t), float(x)
    return t, x


def jacobian(cm, alpha, beta):
    """J = t_a x_b - t_b x_a and the four entries (t_a, t_b, x_a, x_b)."""
    cm.check_domain(alpha, beta)
    t_a, t_b, x_a, x_b = cm.partials(alpha, beta)
    return t_a * x_b - t_b * x_a, (t_a, t_b, x_a, x_b)


def _pi_upsilon(cm, alpha):
    beta = cm.sigma_beta(alpha)
    return np.array(cm.pi(alpha, beta))


def classify_singular_point(cm, alpha):
    """'fold' or 'cusp' from the velocity of Pi along Sigma at alpha."""
    beta = cm.sigma_beta(alpha)
    if np.isnan(beta):
        raise UnsolvableBeta("alpha is not on the singular curve", alpha=alpha)
    data = cm.data
    bprime = data.lam_minus(alpha, 1) / data.lam_plus(beta, 1)
    t_a, t_b, x_a, x_b = cm.partials(alpha, beta)
    d1 = np.array([t_a + t_b * bprime, x_a + x_b * bprime])
    tol = cm.params.root_tol
    if np.max(np.abs(d1)) > tol:
        return "fold"
    h = 1e-3
    d2 = (_pi_upsilon(cm, alpha + h) - 2 * _pi_upsilon(cm, alpha)
          + _pi_upsilon(cm, alpha - h)) / h ** 2
    if np.max(np.abs(d2)) <= 1e3 * tol + 1e-6:
        raise DegenerateClassification("first and second derivatives vanish",
                                       alpha=alpha)
    return "cusp"


@dataclass(frozen=True)
class SingularCurve:
    alpha: np.ndarray
    beta: np.ndarray
    kinds: tuple
    skipped: tuple = ()

    @property
    def samples(self):
        return list(zip(self.alpha.tolist(), self.beta.tolist()))


def singular_curve(cm, alpha_range, n):
    """Sample Sigma; alphas whose Lambda_- value is out of reach are skipped."""
    a, b = alpha_range
    cm.check_domain(a, b)
    alphas = np.linspace(a, b, n)
    if cm.has_cusp and a <= cm.alpha0 <= b:
        i = int(np.argmin(np.abs(alphas - cm.alpha0)))
        alphas[i] = cm.alpha0
    betas = cm.sigma_beta(alphas)
    keep = ~np.isnan(betas)
    skipped = tuple(float(v) for v in alphas[~keep])
    alphas, betas = alphas[keep], betas[keep]
    kinds = tuple(classify_singular_point(cm, float(al)) for al in alphas)
    return SingularCurve(alphas, betas, kinds, skipped)


def blowup_point(cm):
    if not cm.has_cusp:
        raise NoCuspFound("assumptions not satisfied: no blowup point")
    return pi_map(cm, cm.alpha0, cm.beta0)


@dataclass(frozen=True)
class Envelope:
    side: str
    alpha: np.ndarray
    t: np.ndarray
    x: np.ndarray
    monotone_ok: bool
    concave_ok: bool

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.x.tolist()))


def default_eps(cm):
    a, b = cm.sigma_range
    return 0.5 * min(cm.alpha0 - a, b - cm.alpha0)


def _envelope_flags(side, t, x, x_rel):
    dt, dx = np.diff(t), np.diff(x_rel)
    if side == "left":
        mono = bool(np.all(dt > 0) and np.all(dx > 0))
    else:
        mono = bool(np.all(dt > 0) and np.all(dx < 0))
    # Second divided differences of t as a function of x.
    order = np.argsort(x_rel)
    xs, ts = x_rel[order], t[order]
    s = np.diff(ts) / np.diff(xs)
    d2 = np.diff(s) / (0.5 * (xs[2:] - xs[:-2]))
    slack = 1e-7 * (1.0 + np.abs(d2))
    return mono, bool(np.all(d2 <= slack))


def envelopes(cm, eps=None, n=64):
    """Gamma_l and Gamma_r sampled outward from the cusp.

    Flags are evaluated in the frame moving with the cusp characteristic
    speed Lambda_-(alpha0), which is the identity when that speed is zero.
    """
    if not cm.has_cusp:
        raise NoCuspFound("no cusp: envelopes undefined")
    eps = default_eps(cm) if eps is None else eps
    a, b = cm.sigma_range
    if cm.alpha0 - eps < a or cm.alpha0 + eps > b:
        raise UnsolvableBeta("eps leaves the bracketing interval", eps=eps,
                             sigma_range=[a, b])
    c = float(cm.data.lam_minus(cm.alpha0))
    out = []
    for side, sgn in (("left", -1.0), ("right", 1.0)):
        al = cm.alpha0 + sgn * np.linspace(0.0, eps, n)
        t, x, _ = cm.sigma_t(al)
        x_rel = x - c * (t - cm.t0)
        mono, conc = _envelope_flags(side, t, x, x_rel)
        out.append(Envelope(side, al, t, x, mono, conc))
    return tuple(out)


def trace_characteristic(cm, family, label, n=64, t_max=None):
    """Sample a characteristic curve as (t, x) arrays in increasing t.

    ``family='minus'`` holds alpha = label (the curve carrying lam_- and
    moving with lam_+); ``family='plus'`` holds beta = label.
    """
    cm.check_domain(label)
    if family == "minus":
        end = cm.hi
        if t_max is not None:
            b = cm.level_beta(np.array([label]), t_max)[0]
            end = end if np.isnan(b) else b
        beta = np.linspace(label, end, n)
        t, x = cm.pi(np.full(n, label), beta)
    elif family == "plus":
        start = cm.lo
        if t_max is not None:
            Tt = float(cm.T(label)) - t_max
            if Tt > float(cm.T(cm.lo)):
                start = float(bracketed_newton(
                    lambda a: (cm.T(a) - Tt, 1.0 / cm.gap(a)), cm.lo, label)[0][0])
        alpha = np.linspace(label, start, n)
        t, x = cm.pi(alpha, np.full(n, label))
    else:
        raise ValueError(f"family must be 'minus' or 'plus', got {family!r}")
    return t, x


def evaluate_solution(cm, t, x, n_scan=None):
    """All (alpha, beta) with Pi(alpha, beta) = (t, x), sorted by alpha.

    The level curve t(alpha, beta) = t is scanned on a grid restricted to the
    dependence cone of x; critical points (crossings of Sigma) split it into
    monotone pieces, each holding at most one root.
    """
    if t < 0:
        raise DomainError("t must be non-negative", t=t)
    if t == 0:
        cm.check_domain(x)
        return [_make_root(cm, float(x), float(x))]
    span_lo, span_hi = cm.alpha_span(t)
    # Slack keeps the cone non-empty when t is below the resolution of x.
    slack = 8 * np.finfo(float).eps * (1 + abs(x))
    lo = max(span_lo, x - t * cm.plus_range[1] - slack)
    hi = min(span_hi, x - t * cm.plus_range[0] + slack)
    if not lo < hi:
        raise NoRootError("point outside the characteristic image", t=t, x=x)
    n = n_scan or int(min(4000, max(64, np.ceil((hi - lo) / 0.005))))
    grid = np.linspace(lo, hi, n)
    g, beta, slope = cm.level_curve(grid, t)
    s = np.sign(slope)
    # Critical points of g: slope changes sign.
    crit = []
    for i in np.nonzero(s[:-1] * s[1:] < 0)[0]:
        def fun(al):
            _, b, sl = cm.level_curve(al, t)
            d = cm.data
            dsl = (d.lam_plus(b, 1) * cm.gap(b) / cm.gap(al) - d.lam_minus(al, 1)) / cm.gap(al)
            return sl, dsl
        r, _, _ = bracketed_newton(fun, grid[i], grid[i + 1])
        crit.append(float(r[0]))
    bounds = [lo] + crit + [hi]
    roots = []
    tol = cm.params.root_tol
    for a, b in zip(bounds[:-1], bounds[1:]):
        alpha, beta_r = cm.solve_piece(t, x, a, b)
        if not np.isnan(alpha[0]):
            roots.append((float(alpha[0]), float(beta_r[0])))
    roots.sort()
    uniq = []
    for r in roots:
        if not uniq or abs(r[0] - uniq[-1][0]) > 10 * tol:
            uniq.append(r)
    if not uniq:
        raise NoRootError("point outside the characteristic image", t=t, x=x)
    return [_make_root(cm, a, b) for a, b in uniq]


def _make_root(cm, alpha, beta):
    lm = float(cm.data.lam_minus(alpha))
    lp = float(cm.data.lam_plus(beta))
    J, _ = jacobian(cm, alpha, beta)
    state = None
    if lp > lm:
        state = from_invariants(RiemannPair(lm, lp), cm.params)
    return SolutionRoot(alpha, beta, lm, lp, float(J), state)


def spatial_gradient(cm, t, alpha):
    """d lam_- / dx along the minus characteristic leaving alpha, at time t."""
    if t < 0:
        raise DomainError("t must be non-negative", t=t)
    cm.check_domain(alpha)
    beta = cm.level_beta(np.array([alpha], dtype=float), t)[0]
    if np.isnan(beta):
        raise DomainError("characteristic leaves the data domain", t=t, alpha=alpha)
    d = cm.data
    denom = float(d.lam_plus(beta) - d.lam_minus(alpha))
    if abs(denom) < cm.params.root_tol:
        raise BlowupReached("gradient catastrophe", t=t, alpha=alpha, denom=denom)
    return float(d.lam_minus(alpha, 1) * cm.gap(alpha) / denom)
