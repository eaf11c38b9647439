"""Experiment configuration: JSON schema, semantic checks, scenario assembly.

Validation happens in two layers.  The schema layer rejects shape problems
with JSON-pointer paths; the semantic layer samples the structural
hypotheses the verifiers rely on (exterior dissipativity, the reaction
vanishing at zero, band contraction) so a run never starts on a problem
whose conclusions would be vacuous.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .errors import ConfigInvalid
from .integrator import IntegratorConfig, RadialProblem, SkewState, WaveProblem
from .profiles import Grid, Profile
from .quasi_periodic import QPSignal, TorusPhase
from .reaction import ReactionTerm
from .scenarios import Scenario, clamped_front, offset_bump, wiggled_front
from .serialize import reaction_from_dict

SCENARIOS = ("wave_1d", "radial_2d", "custom")

VERIFIER_NAMES = (
    "monotone",
    "equivariance",
    "total_order",
    "spatial_monotonicity",
    "symmetry",
    "asymptotic_phase",
    "decay_bound",
    "supersolution_trapping",
    "wedge_order",
    "one_cover",
    "stability",
)

_SIGNAL_SCHEMA = {
    "type": "object",
    "required": ["omegas", "modes"],
    "properties": {
        "omegas": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "number", "exclusiveMinimum": 0},
        },
        "modes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["k", "re", "im"],
                "properties": {
                    "k": {"type": "array", "items": {"type": "integer"}},
                    "re": {"type": "number"},
                    "im": {"type": "number"},
                },
            },
        },
    },
}

SCHEMA = {
    "type": "object",
    "required": ["scenario", "seed", "output_dir", "grid", "integrator",
                 "reaction", "run", "verifiers"],
    "additionalProperties": False,
    "properties": {
        "scenario": {"enum": list(SCENARIOS)},
        "seed": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string", "minLength": 1},
        "grid": {
            "type": "object",
            "required": ["extents", "counts"],
            "properties": {
                "extents": {
                    "type": "array", "minItems": 1, "maxItems": 2,
                    "items": {
                        "type": "array", "minItems": 2, "maxItems": 2,
                        "items": {"type": "number"},
                    },
                },
                "counts": {
                    "type": "array", "minItems": 1, "maxItems": 2,
                    "items": {"type": "integer", "minimum": 3},
                },
            },
        },
        "integrator": {
            "type": "object",
            "required": ["dt", "lipschitz_bound"],
            "properties": {
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "lipschitz_bound": {"type": "number", "exclusiveMinimum": 0},
                "boundary": {"enum": ["dirichlet_limits", "dirichlet_zero"]},
            },
        },
        "reaction": {
            "type": "object",
            "required": ["form", "signals", "params"],
            "properties": {
                "form": {"enum": ["bistable", "scaled_bistable",
                                  "radial_logistic", "linear"]},
                "signals": {
                    "type": "object",
                    "additionalProperties": _SIGNAL_SCHEMA,
                },
                "params": {
                    "type": "object",
                    "additionalProperties": {"type": "number"},
                },
                "g_symmetric": {"type": "boolean"},
                "zero_at_zero": {"type": "boolean"},
                "omegas": {"type": "array",
                           "items": {"type": "number", "exclusiveMinimum": 0}},
            },
        },
        "speed": {"anyOf": [{"type": "null"}, _SIGNAL_SCHEMA]},
        "initial": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["front", "wiggled_front", "bump", "csv"]},
                "width": {"type": "number", "exclusiveMinimum": 0},
                "amplitude": {"type": "number"},
                "centre": {"type": "array", "items": {"type": "number"}},
                "path": {"type": "string"},
            },
        },
        "run": {
            "type": "object",
            "required": ["eps_return", "horizon"],
            "properties": {
                "eps_return": {"type": "number", "exclusiveMinimum": 0},
                "horizon": {"type": "number", "exclusiveMinimum": 0},
                "conv_tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "verifiers": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "properties": {
                    "name": {"enum": list(VERIFIER_NAMES)},
                    "tolerance": {"type": "number", "minimum": 0},
                    "options": {"type": "object"},
                },
            },
        },
        "notes": {"type": "object"},
    },
}


@dataclass(eq=False)
class ExperimentConfig:
    """Validated experiment description; `raw` keeps the exact JSON echo."""

    scenario: str
    seed: int
    output_dir: str
    grid: Grid
    integrator: IntegratorConfig
    reaction: ReactionTerm
    speed: QPSignal | None
    initial: dict
    eps_return: float
    horizon: float
    conv_tol: float
    verifiers: list[dict]
    raw: dict = field(repr=False, default_factory=dict)


def _pointer(err: jsonschema.ValidationError) -> str:
    return "/" + "/".join(str(p) for p in err.absolute_path)


def _schema_problems(raw: dict) -> list[tuple[str, str]]:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    return [
        (_pointer(e), e.message)
        for e in sorted(validator.iter_errors(raw), key=lambda e: str(e.absolute_path))
    ]


def _semantic_problems(raw: dict) -> list[tuple[str, str]]:
    problems: list[tuple[str, str]] = []
    scenario = raw["scenario"]
    grid_dim = len(raw["grid"]["counts"])
    if len(raw["grid"]["extents"]) != grid_dim:
        problems.append(("/grid", "extents and counts must have equal length"))
        return problems
    for i, (lo, hi) in enumerate(raw["grid"]["extents"]):
        if not hi > lo:
            problems.append((f"/grid/extents/{i}", "extent must be increasing"))
    names = [v.get("name") for v in raw["verifiers"]]
    for i, n in enumerate(names):
        if n in names[:i]:
            problems.append(
                (f"/verifiers/{i}", f"verifier {n!r} selected more than once")
            )
    form = raw["reaction"]["form"]
    params = raw["reaction"]["params"]
    for key, val in params.items():
        if key != "rate" and val <= 0:
            problems.append(
                (f"/reaction/params/{key}", "hypothesis constants must be positive")
            )
    if scenario == "wave_1d":
        if grid_dim != 1:
            problems.append(("/grid/counts", "wave scenarios run on a 1-D grid"))
        if form not in ("bistable", "scaled_bistable"):
            problems.append(
                ("/reaction/form",
                 "wave scenarios need an x-independent bistable form with a "
                 "contracting band at both limit states")
            )
        else:
            for key in ("eps0", "mu"):
                if key not in params:
                    problems.append(
                        (f"/reaction/params/{key}",
                         "limit-state band needs eps0 and mu")
                    )
    if scenario == "radial_2d":
        if grid_dim != 2:
            problems.append(("/grid/counts", "radial scenarios run on a 2-D grid"))
        if form != "radial_logistic":
            problems.append(
                ("/reaction/form", "radial scenarios need the radial_logistic form")
            )
        else:
            if not raw["reaction"].get("g_symmetric", False):
                problems.append(
                    ("/reaction/g_symmetric",
                     "radial scenarios need the rotation-symmetry flag")
                )
            if not raw["reaction"].get("zero_at_zero", False):
                problems.append(
                    ("/reaction/zero_at_zero",
                     "radial scenarios need f(t, x, 0) = 0")
                )
            alpha = params.get("alpha", 0.0)
            if alpha <= 0:
                problems.append(
                    ("/reaction/params/alpha",
                     "exterior dissipativity requires positive alpha")
                )
        if raw.get("speed") is not None:
            problems.append(("/speed", "radial scenarios have no frame speed"))
    if problems:
        return problems
    # hypothesis sampling on a constructible reaction
    try:
        term = reaction_from_dict(raw["reaction"])
    except (ValueError, KeyError) as exc:
        return [("/reaction", str(exc))]
    if term.zero_at_zero:
        witness = _zero_witness(term)
        if witness is not None:
            problems.append(
                ("/reaction/zero_at_zero",
                 f"claimed f(t, x, 0) = 0 but sampled f = {witness[0]:.3g} "
                 f"at phase {witness[1]}")
            )
    if scenario == "radial_2d" and form == "radial_logistic":
        from .errors import HypothesisViolated

        try:
            term.check_exterior_dissipativity()
        except HypothesisViolated as exc:
            problems.append(("/reaction/params", f"exterior dissipativity fails: {exc}"))
    if scenario == "wave_1d" and form in ("bistable", "scaled_bistable"):
        from .errors import HypothesisViolated

        try:
            term.check_limit_band()
        except HypothesisViolated as exc:
            problems.append(("/reaction/params", f"limit-state band fails: {exc}"))
    dt = raw["integrator"]["dt"]
    lip = raw["integrator"]["lipschitz_bound"]
    if dt * lip >= 1.0:
        problems.append(
            ("/integrator/dt",
             f"dt * lipschitz_bound = {dt * lip:.3g} >= 1 breaks the "
             "order-preserving reaction step")
        )
    return problems


def _zero_witness(term: ReactionTerm):
    zero = np.zeros(3)
    rs = np.array([0.0, 1.0, 5.0]) if term.x_dependent else None
    for i in range(8):
        ph = TorusPhase(tuple((i / 8.0,) * term.basis.dimension))
        val = term.value(ph, 0.0, zero, rs)
        worst = float(np.max(np.abs(val)))
        if worst > 1e-14:
            return worst, ph.theta
    return None


def validate_raw(raw: dict) -> None:
    """Raise ConfigInvalid with JSON-pointer paths when the config is bad."""
    problems = _schema_problems(raw)
    if not problems:
        problems = _semantic_problems(raw)
    if problems:
        raise ConfigInvalid(problems)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigInvalid([("/", f"cannot read config: {exc}")])
    except json.JSONDecodeError as exc:
        raise ConfigInvalid([("/", f"not valid JSON: {exc}")])
    if not isinstance(raw, dict):
        raise ConfigInvalid([("/", "config must be a JSON object")])
    validate_raw(raw)
    grid = Grid(
        tuple(tuple(e) for e in raw["grid"]["extents"]),
        tuple(raw["grid"]["counts"]),
    )
    integ = IntegratorConfig(
        dt=float(raw["integrator"]["dt"]),
        lipschitz_bound=float(raw["integrator"]["lipschitz_bound"]),
        boundary=raw["integrator"].get("boundary", "dirichlet_limits"),
    )
    term = reaction_from_dict(raw["reaction"])
    speed = None
    if raw.get("speed") is not None:
        speed = QPSignal.from_json(json.dumps(raw["speed"]))
    run = raw["run"]
    return ExperimentConfig(
        scenario=raw["scenario"],
        seed=int(raw["seed"]),
        output_dir=raw["output_dir"],
        grid=grid,
        integrator=integ,
        reaction=term,
        speed=speed,
        initial=dict(raw.get("initial", {})),
        eps_return=float(run["eps_return"]),
        horizon=float(run["horizon"]),
        conv_tol=float(run.get("conv_tol", 1e-4)),
        verifiers=[dict(v) for v in raw["verifiers"]],
        raw=raw,
    )


def build_scenario(cfg: ExperimentConfig) -> Scenario:
    """Assemble the problem, integrator, and seeded initial state."""
    dim = cfg.grid.dimension
    if dim == 1:
        limits = (
            cfg.reaction.limit_states()
            if cfg.reaction.form in ("bistable", "scaled_bistable", "linear")
            else (0.0, 0.0)
        )
        problem = WaveProblem(cfg.grid, cfg.reaction, cfg.speed,
                              limits[1], limits[0])
    else:
        problem = RadialProblem(cfg.grid, cfg.reaction)
    phase = TorusPhase((0.0,) * cfg.reaction.basis.dimension)
    state = SkewState(_initial_profile(cfg), phase)
    return Scenario(
        name=cfg.scenario,
        problem=problem,
        config=cfg.integrator,
        state=state,
        eps_return=cfg.eps_return,
        horizon=cfg.horizon,
        conv_tol=cfg.conv_tol,
        notes=dict(cfg.raw.get("notes", {})),
    )


def _initial_profile(cfg: ExperimentConfig) -> Profile:
    init = cfg.initial
    kind = init.get("kind", "wiggled_front" if cfg.grid.dimension == 1 else "bump")
    if kind == "csv":
        from .serialize import profile_from_csv

        p = profile_from_csv(init["path"])
        if p.grid != cfg.grid:
            raise ConfigInvalid([("/initial/path", "profile grid differs from /grid")])
        return p
    if cfg.grid.dimension == 1:
        width = float(init.get("width", 2.0))
        if kind == "front":
            return clamped_front(cfg.grid, width=width)
        return wiggled_front(cfg.grid, seed=cfg.seed, width=width,
                             amplitude=float(init.get("amplitude", 0.08)))
    centre = tuple(init.get("centre", (1.0, 0.5)))
    return offset_bump(cfg.grid, amplitude=float(init.get("amplitude", 0.3)),
                       width=float(init.get("width", 2.0)), centre=centre)
