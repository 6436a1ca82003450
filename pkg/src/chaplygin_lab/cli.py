"""Batch command line: ``chaplygin-lab <command> <config.toml> [--out DIR]``.

Every run writes ``report.json`` into the output directory, including failed
runs, whose report names the failing stage. Exit codes: 0 success, 2 config
error, 3 assumption failure, 4 numerical failure.
"""
import argparse
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import characteristics as ch
from . import delta_shock as ds
from . import fv_oracle as fv
from .config import parse_config
from .errors import AssumptionsFailed, ChaplyginError, ConfigError, TrajectoryHalted
from .output import write_report, write_series

COMMANDS = ("check", "blowup", "envelopes", "smooth", "shock", "audit", "oracle")


class _Run:
    """Accumulates report sections and written files for one command."""

    def __init__(self, cfg, command, out_dir):
        self.cfg = cfg
        self.command = command
        self.out = Path(out_dir)
        self.files = []
        self.results = {}
        self.stage = "setup"

    def tolerances(self):
        return asdict(self.cfg.params)

    def series(self, name, columns, rows):
        if self.cfg.write_csv:
            write_series(self.out / name, columns, rows)
            self.files.append(name)

    def section(self, name, values, **extra):
        """Store a result block tagged with the tolerances it was computed under."""
        self.results[name] = {**values, "computed_under": {**self.tolerances(), **extra}}


def _map(run):
    run.stage = "assumptions"
    cfg = run.cfg
    data = cfg.initial_data()
    report = ch.check_assumptions(data, cfg.params, cfg.n_grid)
    run.section("assumptions", report.to_dict(), n_grid=cfg.n_grid)
    if not report.ok:
        raise AssumptionsFailed(report)
    run.stage = "map"
    return ch.CharacteristicMap(data, cfg.params, report)


def cmd_check(run):
    _map(run)


def cmd_blowup(run):
    cm = _map(run)
    run.stage = "blowup"
    t0, x0 = ch.blowup_point(cm)
    kind = ch.classify_singular_point(cm, cm.alpha0)
    eps = run.cfg.env_eps or ch.default_eps(cm)
    curve = ch.singular_curve(cm, (cm.alpha0 - eps, cm.alpha0 + eps), 2 * run.cfg.env_n + 1)
    t_s, x_s = cm.pi(curve.alpha, curve.beta)
    run.series("singular_curve.csv", ("alpha", "beta", "t", "x", "kind"),
               zip(curve.alpha, curve.beta, t_s, x_s, curve.kinds))
    run.section("blowup", {"t0": t0, "x0": x0, "alpha0": cm.alpha0, "beta0": cm.beta0,
                           "kind": kind,
                           "discrete_min_t_alpha": float(curve.alpha[np.argmin(t_s)])})


def cmd_envelopes(run):
    cm = _map(run)
    run.stage = "envelopes"
    gl, gr = ch.envelopes(cm, run.cfg.env_eps, run.cfg.env_n)
    rows = [(e.side, t, x) for e in (gl, gr) for t, x in zip(e.t, e.x)]
    run.series("envelopes.csv", ("side", "t", "x"), rows)
    run.section("envelopes", {e.side: {"monotone_ok": e.monotone_ok,
                                       "concave_ok": e.concave_ok,
                                       "start": [e.t[0], e.x[0]],
                                       "end": [e.t[-1], e.x[-1]]} for e in (gl, gr)},
                eps=run.cfg.env_eps or ch.default_eps(cm), n=run.cfg.env_n)


def cmd_smooth(run):
    cm = _map(run)
    run.stage = "smooth"
    cfg = run.cfg
    xs = np.linspace(*cfg.window, cfg.smooth_n_points)
    rows = []
    for frac in cfg.smooth_t_fractions:
        t = frac * cm.t0
        rho, u, lm, lp = cm.branch_state(t, xs, None)
        rows.extend(zip([t] * len(xs), xs, rho, u, lm, lp))
    run.series("smooth.csv", ("t", "x", "rho", "u", "lam_minus", "lam_plus"), rows)
    run.section("smooth", {"times": [f * cm.t0 for f in cfg.smooth_t_fractions],
                           "n_points": cfg.smooth_n_points,
                           "max_rho": float(max(r[2] for r in rows))})


def _trajectory_rows(traj):
    return [(s.state.t, s.state.x, s.state.u_delta, s.state.w, s.entropy_ok)
            for s in traj.samples]


def _shock(run, cm):
    run.stage = "shock"
    cfg = run.cfg
    try:
        traj = ds.integrate_delta_shock(cm, cfg.w0, cfg.delta_start, cfg.T)
    except TrajectoryHalted as exc:
        if exc.trajectory is not None and exc.trajectory.samples:
            run.series("trajectory.csv", ("t", "x", "u_delta", "w", "entropy_ok"),
                       _trajectory_rows(exc.trajectory))
        raise
    run.series("trajectory.csv", ("t", "x", "u_delta", "w", "entropy_ok"),
               _trajectory_rows(traj))
    d_mass, d_mom = ds.rh_consistency(traj)
    last = traj.samples[-1].state
    run.section("shock", {
        "t_start": traj.t_start, "t_end": last.t, "samples": len(traj.samples),
        "final": {"x": last.x, "u_delta": last.u_delta, "w": last.w},
        "entropy_ok_all": bool(traj.column("entropy_ok").all()),
        "max_rh_defect_mass": float(np.max(np.abs(d_mass))),
        "max_rh_defect_momentum": float(np.max(np.abs(d_mom))),
        "steps": traj.stats}, w0=cfg.w0, delta_start=cfg.delta_start, T=cfg.T)
    return traj


def cmd_shock(run):
    _shock(run, _map(run))


def cmd_audit(run):
    cm = _map(run)
    traj = _shock(run, cm)
    run.stage = "audit"
    cfg = run.cfg
    led = ds.conservation_audit(cm, traj, cfg.window, boundary=cfg.audit_boundary,
                                n_times=cfg.audit_n_times)
    run.series("audit.csv",
               ("t", "S_rho", "S_rho_u", "delta_mass", "delta_momentum", "flux_mass",
                "flux_momentum", "generalized_mass", "generalized_momentum", "drift",
                "drift_raw", "momentum_drift", "momentum_drift_raw"),
               zip(led.t, led.S_rho, led.S_rho_u, led.delta_mass, led.delta_momentum,
                   led.flux_mass, led.flux_momentum, led.generalized_mass,
                   led.generalized_momentum, led.mass_drift, led.raw_mass_drift,
                   led.momentum_drift, led.raw_momentum_drift))
    run.section("audit", led.summary(), window=list(cfg.window))


def cmd_oracle(run):
    cm = _map(run)
    run.stage = "oracle"
    cfg = run.cfg
    t_end = cfg.fv_t_fraction * cm.t0
    field = fv.fv_run(cm.data, cfg.params, cfg.fv, cfg.window, t_end)
    run.series("field.csv", ("x", "rho", "u"), zip(field.x_centers, field.rho, field.u))
    err = fv.compare(field, cm)
    run.section("oracle", {"t": t_end, **asdict(err), "mass": field.mass()},
                n_cells=cfg.fv.n_cells, cfl=cfg.fv.cfl, limiter=cfg.fv.limiter)


def run_command(command, cfg, out_dir=None):
    """Run one command; returns (report dict, exit code). Never raises ChaplyginError."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    out = out_dir if out_dir is not None else cfg.out_dir
    run = _Run(cfg, command, out)
    code = 0
    error = None
    try:
        globals()["cmd_" + command](run)
    except ChaplyginError as exc:
        code = exc.exit_code
        error = {"type": type(exc).__name__, "message": str(exc), "stage": run.stage,
                 "details": exc.details}
    except (KeyError, ValueError) as exc:
        # Domain errors raised by the numerical layers (bad window, family...).
        code = 4 if run.stage != "setup" else 2
        error = {"type": type(exc).__name__, "message": str(exc), "stage": run.stage,
                 "details": {}}
    report = {"command": command, "status": "ok" if code == 0 else "error",
              "exit_code": code, "config": cfg.to_dict(), "tolerances": run.tolerances(),
              "results": run.results, "files": sorted(run.files)}
    if error is not None:
        report["error"] = error
    if cfg.write_json:
        write_report(Path(out) / "report.json", report)
    return report, code


def main(argv=None):
    ap = argparse.ArgumentParser(prog="chaplygin-lab", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("config", help="TOML configuration file")
    ap.add_argument("--out", help="output directory (overrides output.dir)")
    args = ap.parse_args(argv)
    try:
        cfg = parse_config(Path(args.config))
    except ConfigError as exc:
        out = Path(args.out or "out")
        write_report(out / "report.json",
                     {"command": args.command, "status": "error", "exit_code": exc.exit_code,
                      "error": {"type": type(exc).__name__, "message": str(exc),
                                "stage": "config", "details": exc.details}})
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.out:
        cfg = replace(cfg, out_dir=args.out)
    report, code = run_command(args.command, cfg)
    if code:
        print(f"error [{report['error']['stage']}]: {report['error']['message']}",
              file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
