"""Omega-limit estimation, 1-cover detection, and uniform-stability probing.

Fiber sampling works through base return times: profiles are collected at
times when the rotated torus phase is back within eps_return of the start, so
consecutive samples live on (nearly) the same fiber and set convergence can
be read off their Hausdorff distances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyReturnSet, NotStable, UndecidedEstimate
from .integrator import IntegratorConfig, Problem, SkewState, _step_values, integrate
from .profiles import Grid, Profile, hausdorff, sup_distance
from .quasi_periodic import TorusPhase, advance_phase, return_times


@dataclass(eq=False)
class OmegaLimitEstimate:
    """Fiber samples of an omega-limit set at base return times.

    `diagnostics` is the nonincreasing upper envelope of the per-stage
    half-versus-half Hausdorff distances (raw values kept alongside); the
    estimate is `converged` when the last two stages agree within conv_tol.
    """

    times: np.ndarray
    phases: list[TorusPhase]
    samples: list[Profile]
    raw_diagnostics: list[float]
    diagnostics: list[float]
    status: str
    eps_return: float
    conv_tol: float

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def representative(self) -> Profile:
        return self.samples[-1]

    def tail(self) -> list[Profile]:
        return self.samples[len(self.samples) // 2 :]

    def summary(self) -> dict:
        return {
            "times": [float(t) for t in self.times],
            "diagnostics": self.diagnostics,
            "raw_diagnostics": self.raw_diagnostics,
            "status": self.status,
            "eps_return": self.eps_return,
            "conv_tol": self.conv_tol,
            "n_samples": len(self.samples),
        }


def omega_limit(
    state: SkewState,
    problem: Problem,
    config: IntegratorConfig,
    eps_return: float,
    horizon: float,
    conv_tol: float = 1e-4,
) -> OmegaLimitEstimate:
    """Estimate the omega-limit fiber over the starting phase.

    Integrates to the horizon, sampling at every base return time on the dt
    grid, then halves the sample tail repeatedly: stage j Hausdorff-compares
    the two halves of the most recent fraction.  Raises EmptyReturnSet when
    the base never returns below the horizon.
    """
    ts = return_times(state.phase, problem.basis, eps_return, horizon, config.dt)
    if ts.size < 4:
        raise EmptyReturnSet(
            f"only {ts.size} base returns below horizon {horizon}; "
            "need at least 4 fiber samples"
        )
    states = integrate(state, float(ts[-1]), problem, config, sample_times=ts)
    samples = [s.profile for s in states]
    phases = [s.phase for s in states]
    raw: list[float] = []
    cur = samples
    while len(cur) >= 4:
        half = len(cur) // 2
        raw.append(hausdorff(cur[:half], cur[half:]))
        cur = cur[half:]
    envelope = [max(raw[j:]) for j in range(len(raw))]
    status = (
        "converged"
        if len(envelope) >= 2 and envelope[-1] <= conv_tol and envelope[-2] <= conv_tol
        else "undecided"
    )
    return OmegaLimitEstimate(
        times=np.asarray([s.time_origin for s in states]),
        phases=phases,
        samples=samples,
        raw_diagnostics=raw,
        diagnostics=envelope,
        status=status,
        eps_return=eps_return,
        conv_tol=conv_tol,
    )


def _clusters(samples: list[Profile], radius: float) -> list[list[Profile]]:
    """Greedy single-linkage clustering in the sup metric."""
    groups: list[list[Profile]] = []
    for s in samples:
        home = None
        for g in groups:
            if any(sup_distance(s, m) <= radius for m in g):
                home = g
                break
        if home is None:
            groups.append([s])
        else:
            home.append(s)
    return groups


def one_cover_check(estimate: OmegaLimitEstimate, tol: float) -> bool:
    """True iff the sampled fiber collapses to a single point: one cluster
    (merge radius 10 * eps_return) whose diameter stays below tol.

    Only the converged tail enters; the transient head of the orbit says
    nothing about the limit fiber."""
    if not estimate.converged:
        raise UndecidedEstimate("one-cover check needs a converged estimate")
    groups = _clusters(estimate.tail(), 10.0 * estimate.eps_return)
    if len(groups) != 1:
        return False
    g = groups[0]
    diam = max(
        (sup_distance(a, b) for i, a in enumerate(g) for b in g[i + 1 :]),
        default=0.0,
    )
    return diam < tol


# -- uniform stability ---------------------------------------------------------


def perturbation_ensemble(grid: Grid, seed: int, size: int = 32) -> list[np.ndarray]:
    """Fixed-seed perturbation bank, unit sup-norm, tapered to zero near the
    domain edges: 3/4 smooth signed bumps with varied centres and widths plus
    1/4 smoothed uniform noise."""
    rng = np.random.default_rng(seed)
    n_noise = max(1, size // 4)
    n_bumps = size - n_noise
    out: list[np.ndarray] = []
    axes = grid.axes()
    # piecewise-linear edge taper over the outer 10% of each axis
    def taper(ax):
        a, b = ax[0], ax[-1]
        w = 0.1 * (b - a)
        return np.clip(np.minimum(ax - a, b - ax) / w, 0.0, 1.0)

    if grid.dimension == 1:
        (xs,) = axes
        mask = taper(xs)
        span = xs[-1] - xs[0]
        for i in range(n_bumps):
            c = rng.uniform(xs[0] + 0.25 * span, xs[-1] - 0.25 * span)
            w = rng.uniform(4 * grid.spacing[0], span / 8)
            sgn = 1.0 if i % 2 == 0 else -1.0
            out.append(sgn * np.exp(-(((xs - c) / w) ** 2)) * mask)
        for _ in range(n_noise):
            raw = rng.uniform(-1.0, 1.0, xs.size)
            sm = np.convolve(raw, [0.25, 0.5, 0.25], mode="same") * mask
            out.append(sm)
    else:
        xx, yy = grid.meshgrid()
        mask = np.outer(taper(axes[0]), taper(axes[1]))
        span = axes[0][-1] - axes[0][0]
        for i in range(n_bumps):
            cx = rng.uniform(axes[0][0] + 0.25 * span, axes[0][-1] - 0.25 * span)
            cy = rng.uniform(axes[1][0] + 0.25 * span, axes[1][-1] - 0.25 * span)
            w = rng.uniform(4 * grid.spacing[0], span / 8)
            sgn = 1.0 if i % 2 == 0 else -1.0
            out.append(sgn * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / w**2) * mask)
        for _ in range(n_noise):
            raw = rng.uniform(-1.0, 1.0, grid.shape())
            k = np.array([0.25, 0.5, 0.25])
            sm = np.apply_along_axis(lambda v: np.convolve(v, k, mode="same"), 0, raw)
            sm = np.apply_along_axis(lambda v: np.convolve(v, k, mode="same"), 1, sm)
            out.append(sm * mask)
    return [p / np.max(np.abs(p)) for p in out]


@dataclass(eq=False)
class StabilityModulus:
    """Empirical modulus of uniform stability: for each probed eps, the
    largest tested delta whose whole perturbation ensemble stays eps-close to
    the base trajectory on [0, T]."""

    table: dict[float, float]
    T: float
    ensemble: int
    ladder_depth: int
    seed: int
    worst_member: dict[float, int | None] = field(default_factory=dict)
    first_violation: dict[float, float | None] = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "table": {f"{k:.6g}": v for k, v in sorted(self.table.items())},
            "T": self.T,
            "ensemble": self.ensemble,
            "ladder_depth": self.ladder_depth,
            "seed": self.seed,
            "worst_member": {f"{k:.6g}": v for k, v in sorted(self.worst_member.items())},
            "first_violation": {
                f"{k:.6g}": v for k, v in sorted(self.first_violation.items())
            },
        }


def _deviation_exceeds(
    base: SkewState,
    pert_values: np.ndarray,
    problem: Problem,
    config: IntegratorConfig,
    T: float,
    eps: float,
) -> float | None:
    """Lockstep pair integration; returns the first time the sup deviation
    reaches eps, or None if it never does on [0, T]."""
    n = int(round(T / config.dt))
    u = base.profile.values
    v = pert_values
    phase = base.phase
    if float(np.max(np.abs(v - u))) >= eps:
        return 0.0
    for k in range(1, n + 1):
        u = _step_values(u, phase, problem, config)
        v = _step_values(v, phase, problem, config)
        phase = advance_phase(phase, problem.basis, config.dt)
        if float(np.max(np.abs(v - u))) >= eps:
            return k * config.dt
    return None


def stability_probe(
    state: SkewState,
    problem: Problem,
    config: IntegratorConfig,
    eps_list: list[float],
    T: float = 200.0,
    ensemble: int = 32,
    ladder_depth: int = 4,
    seed: int = 2024,
) -> StabilityModulus:
    """Probe the modulus of uniform stability delta(eps) over a geometric
    ladder delta in {eps/2, eps/4, ...}.

    Every ensemble member is scaled to sup-norm delta and integrated in
    lockstep with the base trajectory; a rung passes when no member's
    deviation reaches eps on [0, T].  Raises NotStable when even the smallest
    rung fails.
    """
    if not eps_list:
        raise ValueError("eps_list must be nonempty")
    bank = perturbation_ensemble(state.profile.grid, seed, ensemble)
    table: dict[float, float] = {}
    worst: dict[float, int | None] = {}
    first_violation: dict[float, float | None] = {}
    for eps in sorted(eps_list):
        found = None
        last_fail: tuple[int, float] | None = None
        for j in range(1, ladder_depth + 1):
            delta = eps / (2.0**j)
            ok = True
            for m, pert in enumerate(bank):
                v0 = state.profile.values + delta * pert
                t_bad = _deviation_exceeds(state, v0, problem, config, T, eps)
                if t_bad is not None:
                    ok = False
                    last_fail = (m, t_bad)
                    break
            if ok:
                found = delta
                break
        if found is None:
            mm, tt = last_fail if last_fail else (None, None)
            raise NotStable(
                f"all ladder rungs down to eps/2^{ladder_depth} escape eps={eps} "
                f"(member {mm} at t={tt})"
            )
        table[eps] = found
        worst[eps] = last_fail[0] if last_fail else None
        first_violation[eps] = last_fail[1] if last_fail else None
    return StabilityModulus(
        table=table,
        T=T,
        ensemble=ensemble,
        ladder_depth=ladder_depth,
        seed=seed,
        worst_member=worst,
        first_violation=first_violation,
    )
