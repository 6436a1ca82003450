"""Run configuration: TOML text with dotted section keys.

Every key is optional; omitted keys take the values in ``DEFAULTS``. Example::

    family = "canon"
    window = [-8.0, 8.0]
    tolerances.quad_tol = 1e-10
    shock.w0 = 1e-3
    output.dir = "out/canon"

Inline data replaces ``family`` with ``data.lam_minus``/``data.lam_plus``
(or ``data.rho0``/``data.u0``) expressions in x plus ``data.domain``.
"""
import math
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ParseError, ValidationError
from .fv_oracle import SchemeConfig
from .gas import ChaplyginParams
from .initial_data import FAMILIES, family, from_expressions, from_physical

DEFAULTS = {
    "family": "canon",
    "mu": 1.0,
    "p0": 1.0,
    "window": [-8.0, 8.0],
    "data.lam_minus": None,
    "data.lam_plus": None,
    "data.rho0": None,
    "data.u0": None,
    "data.domain": None,
    "tolerances.quad_tol": 1e-10,
    "tolerances.root_tol": 1e-10,
    "tolerances.ode_dt": 5e-4,
    "tolerances.ode_tol": 1e-10,
    "tolerances.rho_cap": 1e8,
    "check.n_grid": 256,
    "envelopes.eps": None,
    "envelopes.n": 64,
    "smooth.t_fractions": [0.0, 0.5, 0.9],
    "smooth.n_points": 201,
    "shock.w0": 1e-3,
    "shock.delta_start": 1e-2,
    "shock.T": 0.3,
    "audit.boundary": "balanced",
    "audit.n_times": 21,
    "fv.n_cells": 2000,
    "fv.cfl": 0.5,
    "fv.limiter": "minmod",
    "fv.t_fraction": 0.5,
    "output.dir": "out",
    "output.csv": True,
    "output.json": True,
}


@dataclass(frozen=True)
class RunConfig:
    family: str = None
    expressions: dict = field(default_factory=dict)
    domain: tuple = None
    params: ChaplyginParams = field(default_factory=ChaplyginParams)
    window: tuple = (-8.0, 8.0)
    n_grid: int = 256
    env_eps: float = None
    env_n: int = 64
    smooth_t_fractions: tuple = (0.0, 0.5, 0.9)
    smooth_n_points: int = 201
    w0: float = 1e-3
    delta_start: float = 1e-2
    T: float = 0.3
    audit_boundary: str = "balanced"
    audit_n_times: int = 21
    fv: SchemeConfig = field(default_factory=SchemeConfig)
    fv_t_fraction: float = 0.5
    out_dir: str = "out"
    write_csv: bool = True
    write_json: bool = True
    raw: dict = field(default_factory=dict, compare=False)

    def initial_data(self):
        ex = self.expressions
        if "lam_minus" in ex:
            return from_expressions(ex["lam_minus"], ex["lam_plus"], self.domain)
        if "rho0" in ex:
            return from_physical(ex["rho0"], ex["u0"], self.params.mu, self.domain)
        return family(self.family, self.domain)

    def to_dict(self):
        return dict(self.raw)


def _flatten(tree, prefix=""):
    out = {}
    for k, v in tree.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _interval(v):
    return (isinstance(v, (list, tuple)) and len(v) == 2 and all(_is_num(a) for a in v)
            and v[1] > v[0])


_POSITIVE = ("mu", "tolerances.quad_tol", "tolerances.root_tol", "tolerances.ode_dt",
             "tolerances.ode_tol", "tolerances.rho_cap", "shock.w0",
             "shock.delta_start", "shock.T", "fv.cfl")
_INTEGER = {"check.n_grid": 16, "envelopes.n": 3, "smooth.n_points": 2,
            "audit.n_times": 2, "fv.n_cells": 4}


def _validate(vals):
    fails = []
    unknown = sorted(set(vals) - set(DEFAULTS))
    for k in unknown:
        fails.append(f"{k}: unknown key")
    for k in _POSITIVE:
        if not (_is_num(vals[k]) and vals[k] > 0):
            fails.append(f"{k}: must be a positive number, got {vals[k]!r}")
    if not _is_num(vals["p0"]):
        fails.append(f"p0: must be a number, got {vals['p0']!r}")
    for k, lo in _INTEGER.items():
        v = vals[k]
        if not (isinstance(v, int) and not isinstance(v, bool) and v >= lo):
            fails.append(f"{k}: must be an integer >= {lo}, got {v!r}")
    if not _interval(vals["window"]):
        fails.append(f"window: must be [lo, hi] with hi > lo, got {vals['window']!r}")
    if _is_num(vals["fv.cfl"]) and vals["fv.cfl"] > 0.9:
        fails.append(f"fv.cfl: must not exceed 0.9, got {vals['fv.cfl']!r}")
    if vals["fv.limiter"] not in ("none", "minmod"):
        fails.append(f"fv.limiter: must be 'none' or 'minmod', got {vals['fv.limiter']!r}")
    if vals["audit.boundary"] not in ("strict", "raw", "balanced"):
        fails.append(f"audit.boundary: must be strict, raw or balanced, "
                     f"got {vals['audit.boundary']!r}")
    if not (_is_num(vals["fv.t_fraction"]) and 0 <= vals["fv.t_fraction"] < 1):
        fails.append("fv.t_fraction: must lie in [0, 1)")
    eps = vals["envelopes.eps"]
    if eps is not None and not (_is_num(eps) and eps > 0):
        fails.append(f"envelopes.eps: must be a positive number, got {eps!r}")
    tf = vals["smooth.t_fractions"]
    if not (isinstance(tf, list) and tf and all(_is_num(a) and 0 <= a < 1 for a in tf)):
        fails.append("smooth.t_fractions: must be a non-empty list of numbers in [0, 1)")
    for k in ("output.csv", "output.json"):
        if not isinstance(vals[k], bool):
            fails.append(f"{k}: must be true or false")
    if not isinstance(vals["output.dir"], str) or not vals["output.dir"]:
        fails.append("output.dir: must be a non-empty string")

    inline_inv = vals["data.lam_minus"] is not None or vals["data.lam_plus"] is not None
    inline_phys = vals["data.rho0"] is not None or vals["data.u0"] is not None
    if inline_inv and inline_phys:
        fails.append("data: give either lam_minus/lam_plus or rho0/u0, not both")
    elif inline_inv or inline_phys:
        pair = ("data.lam_minus", "data.lam_plus") if inline_inv else ("data.rho0", "data.u0")
        for k in pair:
            if not isinstance(vals[k], str):
                fails.append(f"{k}: expression string required")
        if not _interval(vals["data.domain"] or []):
            fails.append("data.domain: [lo, hi] required with inline expressions")
    else:
        if vals["family"] not in FAMILIES:
            fails.append(f"family: unknown family {vals['family']!r}; "
                         f"known: {', '.join(sorted(FAMILIES))}")
        if vals["data.domain"] is not None and not _interval(vals["data.domain"]):
            fails.append("data.domain: must be [lo, hi] with hi > lo")
    return fails


_LINE = re.compile(r"line (\d+)(?:, column (\d+))?")


def parse_config(source):
    """Parse a path or TOML text into a validated RunConfig."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and "=" not in source):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read config: {exc}", path=str(path)) from None
    else:
        text = source
    try:
        tree = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = _LINE.search(str(exc))
        details = {"line": int(m.group(1))} if m else {}
        if m and m.group(2):
            details["column"] = int(m.group(2))
        raise ParseError(f"config parse error: {exc}", **details) from None
    flat = _flatten(tree)
    vals = dict(DEFAULTS)
    vals.update(flat)
    fails = _validate(vals)
    if fails:
        raise ValidationError(fails)
    try:
        params = ChaplyginParams(mu=float(vals["mu"]), p0=float(vals["p0"]),
                                 quad_tol=vals["tolerances.quad_tol"],
                                 root_tol=vals["tolerances.root_tol"],
                                 ode_dt=vals["tolerances.ode_dt"],
                                 ode_tol=vals["tolerances.ode_tol"],
                                 rho_cap=vals["tolerances.rho_cap"])
        fv = SchemeConfig(n_cells=vals["fv.n_cells"], cfl=vals["fv.cfl"],
                          limiter=vals["fv.limiter"])
    except ValueError as exc:
        raise ValidationError([str(exc)]) from None
    expressions = {k.split(".", 1)[1]: vals[k]
                   for k in ("data.lam_minus", "data.lam_plus", "data.rho0", "data.u0")
                   if vals[k] is not None}
    cfg = RunConfig(
        family=None if expressions else vals["family"],
        expressions=expressions,
        domain=tuple(vals["data.domain"]) if vals["data.domain"] else None,
        params=params, window=tuple(vals["window"]), n_grid=vals["check.n_grid"],
        env_eps=vals["envelopes.eps"], env_n=vals["envelopes.n"],
        smooth_t_fractions=tuple(vals["smooth.t_fractions"]),
        smooth_n_points=vals["smooth.n_points"], w0=vals["shock.w0"],
        delta_start=vals["shock.delta_start"], T=vals["shock.T"],
        audit_boundary=vals["audit.boundary"], audit_n_times=vals["audit.n_times"],
        fv=fv, fv_t_fraction=vals["fv.t_fraction"], out_dir=vals["output.dir"],
        write_csv=vals["output.csv"], write_json=vals["output.json"], raw=vals)
    if expressions:
        try:
            cfg.initial_data()
        except ValueError as exc:
            raise ValidationError([f"data: {exc}"]) from None
    return cfg


def params_dict(params):
    return asdict(params)
