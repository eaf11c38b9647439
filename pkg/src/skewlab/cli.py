"""Command line entry points: run, validate, report.

`run` executes a config end to end: long integration to a converged
omega-limit estimate, then the selected structural verifiers (in a worker
pool), then report JSON, trajectory CSV, and plot-data emission.  `validate`
checks a config without side effects.  `report` re-renders a finished output
directory: a text summary plus figures next to the delimited data.

Exit codes: 0 all verifiers pass, 1 any structural-property violation (or
verifier error), 2 bad config or environment, 3 hypothesis-unmet only.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, build_scenario, load_config
from .errors import ConfigInvalid, LockHeld, SkewLabError, UndecidedEstimate
from .groups import Rotation2D, Translation, apply
from .integrator import SkewState, integrate
from .orbits import omega_limit, one_cover_check, perturbation_ensemble, stability_probe
from .profiles import Profile
from .scenarios import Scenario, flatten_tails
from .serialize import trajectory_to_csv
from .suite import run_suite
from .verifiers import (
    VerifierReport,
    check_decay_bound,
    check_equivariance,
    check_monotone,
    check_spatial_monotonicity,
    check_symmetry,
    check_total_order,
    check_wedge_order,
    extract_asymptotic_phase,
    supersolution_pair,
)

LOCK_NAME = ".skewlab.lock"


# -- locking --------------------------------------------------------------------


def _acquire_lock(out: Path) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    lock = out / LOCK_NAME
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise LockHeld(
            f"{lock} exists; another run owns this directory "
            "(remove the file if that run is gone)"
        )
    with os.fdopen(fd, "w") as f:
        f.write(str(os.getpid()))
    return lock


# -- verifier drivers -------------------------------------------------------------


class _RunContext:
    """Shared artifacts the individual verifier drivers draw from."""

    def __init__(self, cfg: ExperimentConfig, scen: Scenario, estimate,
                 failure: str | None = None):
        self.cfg = cfg
        self.scen = scen
        self.estimate = estimate
        self.failure = failure
        self.extras: dict[str, object] = {}

    def require_estimate(self):
        if self.estimate is None:
            raise UndecidedEstimate(f"no omega-limit estimate: {self.failure}")
        return self.estimate

    def anchor_state(self) -> SkewState:
        """Latest fiber sample; equals the converged representative when the
        estimate converged, otherwise the best available attractor proxy."""
        est = self.require_estimate()
        return SkewState(est.representative(), est.phases[-1])

    def hyp(self, key: str, fallback=None):
        val = self.cfg.reaction.params.get(key, fallback)
        if val is None:
            raise UndecidedEstimate(f"scenario carries no constant {key!r}")
        return float(val)


def _opts(entry: dict) -> dict:
    return dict(entry.get("options", {}))


def _drive_monotone(ctx: _RunContext, entry: dict):
    o = _opts(entry)
    return check_monotone(
        ctx.scen.problem, ctx.scen.config,
        n_pairs=int(o.get("n_pairs", 16)),
        T=float(o.get("T", 5.0)),
        seed=int(o.get("seed", ctx.cfg.seed)),
    )


def _drive_equivariance(ctx: _RunContext, entry: dict):
    o = _opts(entry)
    grid = ctx.cfg.grid
    if grid.dimension == 1:
        h = grid.spacing[0]
        shifts = o.get("shifts", [2 * h, 5 * h])
        elements = [Translation(float(s)) for s in shifts]
        tol = float(entry.get("tolerance", 1e-12))
    else:
        elements = [Rotation2D(float(o.get("angle", 0.9)))]
        # default budget: bilinear resampling (h^2/8)(|uxx|+|uyy|), curvature O(1)
        tol = float(entry.get("tolerance", grid.spacing[0] ** 2))
    return check_equivariance(
        ctx.scen.problem, ctx.scen.config, elements, [ctx.scen.state],
        T=float(o.get("T", 2.0)), tol=tol,
    )


def _drive_total_order(ctx: _RunContext, entry: dict):
    o = _opts(entry)
    h = ctx.cfg.grid.spacing[0]
    shifts = [float(s) for s in o.get("shifts", [-6 * h, -3 * h, 3 * h, 6 * h])]
    rep = ctx.anchor_state().profile
    return check_total_order(rep, shifts, tol=float(entry.get("tolerance", 1e-8)))


def _drive_spatial_monotonicity(ctx: _RunContext, entry: dict):
    rep = ctx.anchor_state().profile
    return check_spatial_monotonicity(rep, float(entry.get("tolerance", 1e-8)))


def _drive_symmetry(ctx: _RunContext, entry: dict):
    o = _opts(entry)
    angles = [float(a) for a in o.get("angles", [math.pi / 7, 1.0, math.pi / 2])]
    return check_symmetry(
        ctx.scen.problem, ctx.scen.config, ctx.require_estimate(), angles,
        tol=float(entry.get("tolerance", 1e-3)),
        exact_tol=float(o.get("exact_tolerance", 1e-8)),
    )


def _drive_asymptotic_phase(ctx: _RunContext, entry: dict):
    t0 = time.perf_counter()
    o = _opts(entry)
    base = ctx.anchor_state()
    grid = ctx.cfg.grid
    size = float(o.get("size", 0.05))
    shift0 = float(o.get("shift", 0.06))
    T = float(o.get("T", 200.0))
    step = float(o.get("sample_every", 2.0))
    tol = float(entry.get("tolerance", 1e-3))
    cauchy_tol = float(o.get("cauchy_tol", 1e-3))
    bank = perturbation_ensemble(grid, seed=ctx.cfg.seed + 7, size=4)
    delta = 0.4 * size * bank[0]
    if shift0:
        delta = delta + (apply(Translation(shift0), base.profile).values
                         - base.profile.values)
    sup = float(np.max(np.abs(delta)))
    delta *= size / sup
    pert = SkewState(Profile(grid, base.profile.values + delta), base.phase)
    ts = np.arange(0.0, T + 1e-9, step)
    base_tr = integrate(base, T, ctx.scen.problem, ctx.scen.config, sample_times=ts)
    pert_tr = integrate(pert, T, ctx.scen.problem, ctx.scen.config, sample_times=ts)
    mask = ts >= T / 2.0
    traj = [s.profile for s, m in zip(pert_tr, mask) if m]
    ref = [s.profile for s, m in zip(base_tr, mask) if m]
    out = extract_asymptotic_phase(
        ts[mask], traj, ref,
        bracket=tuple(o.get("bracket", (-1.0, 1.0))),
        cauchy_tol=cauchy_tol,
    )
    spread = float(np.max(out.sigmas) - np.min(out.sigmas))
    residual = float(out.residuals[-1])
    trace = np.column_stack([ts[mask], out.sigmas, out.residuals])
    ctx.extras["sigma_trace"] = trace
    ctx.extras["sigma_star"] = out.sigma_star
    ok = spread <= cauchy_tol and residual <= tol
    return VerifierReport(
        name="asymptotic_phase",
        status="pass" if ok else "fail",
        measured=residual,
        tolerance=tol,
        reference="group shift locking onto the reference orbit",
        runtime=time.perf_counter() - t0,
        details={
            "sigma_star": out.sigma_star,
            "sigma_spread": spread,
            "cauchy_tol": cauchy_tol,
            "perturbation_size": size,
            "window": [float(ts[mask][0]), float(ts[mask][-1])],
        },
    )


def _ring_bump(grid, radius: float, width: float = 1.0) -> np.ndarray:
    rr = grid.radii()
    return np.exp(-(((rr - radius) / width) ** 2))


def _drive_decay_bound(ctx: _RunContext, entry: dict):
    o = _opts(entry)
    base = ctx.anchor_state()
    eps0 = ctx.hyp("eps0")
    alpha = ctx.hyp("alpha")
    R = float(o.get("R", ctx.hyp("r0")))
    ring = float(o.get("ring_radius", 0.75 * float(np.max(ctx.cfg.grid.radii()))))
    pert = base.profile.values + 0.5 * eps0 * _ring_bump(ctx.cfg.grid, ring)
    return check_decay_bound(
        ctx.scen.problem, ctx.scen.config, base, pert,
        R=R, eps0=eps0, alpha=alpha, T=float(o.get("T", 20.0)),
    )


def _drive_supersolution(ctx: _RunContext, entry: dict):
    o = _opts(entry)
    base = ctx.anchor_state()
    eps0 = ctx.hyp("eps0")
    alpha = ctx.hyp("alpha")
    R = float(o.get("R", ctx.hyp("r0")))
    eps_star = float(o.get("eps_star", eps0 / 4.0))
    ring = float(o.get("ring_radius", 0.75 * float(np.max(ctx.cfg.grid.radii()))))
    pert = base.profile.values + 1.5 * eps_star * _ring_bump(ctx.cfg.grid, ring)
    plus, _minus, report = supersolution_pair(
        ctx.scen.problem, ctx.scen.config, base, pert,
        R=R, eps_star=eps_star, alpha=alpha, T=float(o.get("T", 50.0)),
    )
    ctx.extras["envelope_final"] = plus[-1].values
    return report


def _drive_wedge_order(ctx: _RunContext, entry: dict):
    o = _opts(entry)
    base = ctx.anchor_state()
    limits = ctx.cfg.reaction.limit_states()
    cover = flatten_tails(base.profile, limits, tol=float(o.get("snap_tol", 1e-11)))
    return check_wedge_order(
        cover, Translation(float(o.get("shift", 0.2))),
        ctx.scen.problem, ctx.scen.config, base.phase,
        T=float(o.get("T", 50.0)),
    )


def _drive_one_cover(ctx: _RunContext, entry: dict):
    t0 = time.perf_counter()
    tol = float(entry.get("tolerance", 1e-3))
    est = ctx.require_estimate()
    ok = one_cover_check(est, tol)
    return VerifierReport(
        name="one_cover",
        status="pass" if ok else "fail",
        measured=0.0 if ok else 1.0,
        tolerance=tol,
        reference="fiber samples cluster to a single point",
        runtime=time.perf_counter() - t0,
        details={"n_samples": len(est.samples)},
    )


def _drive_stability(ctx: _RunContext, entry: dict):
    o = _opts(entry)
    t0 = time.perf_counter()
    base = ctx.anchor_state()
    modulus = stability_probe(
        base, ctx.scen.problem, ctx.scen.config,
        [float(e) for e in o.get("eps_list", [0.1, 0.05])],
        T=float(o.get("T", 100.0)),
        ensemble=int(o.get("ensemble", 8)),
        ladder_depth=int(o.get("ladder_depth", 3)),
        seed=int(o.get("seed", ctx.cfg.seed + 40)),
    )
    ctx.extras["modulus_table"] = dict(modulus.table)
    return VerifierReport(
        name="stability",
        status="pass",
        measured=float(min(modulus.table.values())),
        tolerance=0.0,
        reference="uniform stability modulus ladder",
        runtime=time.perf_counter() - t0,
        details={"table": {str(k): v for k, v in modulus.table.items()}},
    )


DRIVERS = {
    "monotone": _drive_monotone,
    "equivariance": _drive_equivariance,
    "total_order": _drive_total_order,
    "spatial_monotonicity": _drive_spatial_monotonicity,
    "symmetry": _drive_symmetry,
    "asymptotic_phase": _drive_asymptotic_phase,
    "decay_bound": _drive_decay_bound,
    "supersolution_trapping": _drive_supersolution,
    "wedge_order": _drive_wedge_order,
    "one_cover": _drive_one_cover,
    "stability": _drive_stability,
}


# -- report assembly ---------------------------------------------------------------


def aggregate_exit(reports: list[VerifierReport]) -> int:
    statuses = {r.status for r in reports}
    if "fail" in statuses or "error" in statuses:
        return 1
    if "hypothesis_unmet" in statuses:
        return 3
    return 0


def _write_plot_data(out: Path, ctx: _RunContext) -> list[dict]:
    pd = out / "plot_data"
    pd.mkdir(exist_ok=True)
    entries: list[dict] = []
    est = ctx.estimate
    rep = est.samples[-1]
    grid = rep.grid
    if grid.dimension == 1:
        (xs,) = grid.axes()
        np.savetxt(pd / "final_profile.csv",
                   np.column_stack([xs, rep.values]),
                   delimiter=",", header="x,value", comments="", fmt="%.17g")
        entries.append({
            "file": "plot_data/final_profile.csv", "kind": "line",
            "x": "x", "y": ["value"], "title": "converged wave profile",
        })
    else:
        xx, yy = grid.meshgrid()
        np.savetxt(pd / "final_profile.csv",
                   np.column_stack([xx.ravel(), yy.ravel(), rep.values.ravel()]),
                   delimiter=",", header="x,y,value", comments="", fmt="%.17g")
        entries.append({
            "file": "plot_data/final_profile.csv", "kind": "heatmap",
            "x": "x", "y": ["y"], "value": "value",
            "title": "converged fiber profile",
        })
    stages = np.arange(len(est.diagnostics))
    np.savetxt(pd / "convergence.csv",
               np.column_stack([stages, est.raw_diagnostics, est.diagnostics]),
               delimiter=",", header="stage,raw,envelope", comments="",
               fmt=("%d", "%.17g", "%.17g"))
    entries.append({
        "file": "plot_data/convergence.csv", "kind": "line", "x": "stage",
        "y": ["envelope"], "logy": True,
        "title": "omega-limit stage diagnostics",
    })
    if "sigma_trace" in ctx.extras:
        np.savetxt(pd / "sigma_trace.csv", ctx.extras["sigma_trace"],
                   delimiter=",", header="time,sigma,residual", comments="",
                   fmt="%.17g")
        entries.append({
            "file": "plot_data/sigma_trace.csv", "kind": "line", "x": "time",
            "y": ["sigma", "residual"], "title": "asymptotic phase trace",
        })
    if "modulus_table" in ctx.extras:
        tab = sorted(ctx.extras["modulus_table"].items())
        np.savetxt(pd / "stability_modulus.csv", np.asarray(tab),
                   delimiter=",", header="eps,delta", comments="", fmt="%.17g")
        entries.append({
            "file": "plot_data/stability_modulus.csv", "kind": "line",
            "x": "eps", "y": ["delta"], "title": "uniform stability modulus",
        })
    return entries


def run_experiment(cfg: ExperimentConfig, out_override: str | None = None) -> int:
    out = Path(out_override or cfg.output_dir)
    lock = _acquire_lock(out)
    t_start = time.perf_counter()
    try:
        scen = build_scenario(cfg)
        est, failure = None, None
        try:
            est = omega_limit(scen.state, scen.problem, scen.config,
                              eps_return=scen.eps_return, horizon=scen.horizon,
                              conv_tol=scen.conv_tol)
        except SkewLabError as exc:
            failure = f"{type(exc).__name__}: {exc}"
        ctx = _RunContext(cfg, scen, est, failure)
        jobs = []
        for entry in cfg.verifiers:
            name = entry["name"]
            driver = DRIVERS[name]
            jobs.append((name, lambda d=driver, e=entry: d(ctx, e), ""))
        reports = run_suite(jobs)
        code = aggregate_exit(reports)
        if est is not None:
            trajectory_to_csv(est.times, est.samples, out / "trajectory.csv")
            plot_entries = _write_plot_data(out, ctx)
            (out / "plots.json").write_text(
                json.dumps({"plots": plot_entries}, indent=2, sort_keys=True)
            )
            est_summary = est.summary()
        else:
            est_summary = {"status": "error", "reason": failure,
                           "n_samples": 0, "diagnostics": []}
        report = {
            "schema": 1,
            "package": f"skewlab {__version__}",
            "scenario": cfg.scenario,
            "seed": cfg.seed,
            "config": cfg.raw,
            "estimate": est_summary,
            "verifiers": [r.to_json() for r in reports],
            "exit_code": code,
            "wall_clock": time.perf_counter() - t_start,
        }
        (out / "report.json").write_text(
            json.dumps(report, indent=2, sort_keys=True)
        )
        return code
    finally:
        lock.unlink(missing_ok=True)


# -- report rendering ---------------------------------------------------------------


_STATUS_MARK = {"pass": "PASS", "fail": "FAIL", "hypothesis_unmet": "UNMET",
                "error": "ERROR"}


def _fmt(value) -> str:
    return "n/a" if value is None else f"{value:.3g}"


def render_summary(report: dict) -> str:
    diags = report["estimate"]["diagnostics"]
    lines = [
        f"{report['package']}  scenario={report['scenario']}  seed={report['seed']}",
        f"estimate: {report['estimate']['status']} "
        f"({report['estimate']['n_samples']} fiber samples, "
        f"last stage {_fmt(diags[-1] if diags else None)})",
    ]
    for r in report["verifiers"]:
        mark = _STATUS_MARK.get(r["status"], r["status"])
        lines.append(
            f"  [{mark:5s}] {r['name']}: measured {_fmt(r['measured'])} "
            f"vs tolerance {_fmt(r['tolerance'])}"
        )
    lines.append(f"exit code {report['exit_code']}")
    return "\n".join(lines)


def render_report(directory: str | Path) -> int:
    out = Path(directory)
    path = out / "report.json"
    if not path.exists():
        print(f"no report.json under {out}", file=sys.stderr)
        return 2
    report = json.loads(path.read_text())
    text = render_summary(report)
    (out / "summary.txt").write_text(text + "\n")
    print(text)
    from .plots import render_manifest

    figures = render_manifest(out)
    for f in figures:
        print(f"wrote {f}")
    return int(report["exit_code"])


# -- entry point ---------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="skewlab",
        description="structural verifier lab for order-preserving "
                    "quasi-periodic reaction-diffusion flows",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a config end to end")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="override the output directory")
    p_val = sub.add_parser("validate", help="check a config, no side effects")
    p_val.add_argument("config")
    p_rep = sub.add_parser("report", help="re-render summaries for a finished run")
    p_rep.add_argument("directory")
    args = parser.parse_args(argv)

    try:
        if args.command == "validate":
            load_config(args.config)
            print("config valid")
            return 0
        if args.command == "run":
            cfg = load_config(args.config)
            code = run_experiment(cfg, out_override=args.out)
            print(f"run finished with exit code {code}")
            return code
        return render_report(args.directory)
    except ConfigInvalid as exc:
        for pointer, msg in exc.problems:
            print(f"config error at {pointer or '/'}: {msg}", file=sys.stderr)
        return 2
    except LockHeld as exc:
        print(str(exc), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
