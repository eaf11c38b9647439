"""Reaction terms f(t, x, u) assembled from quasi-periodic time factors.

Each form carries the structural hypothesis data the verifiers rely on:
    eps0, mu          decay band around the limit states (1-D wave forms)
    eps0, r0, alpha   exterior dissipativity df/du <= -alpha for |x| >= r0
plus the flags `g_symmetric` (x enters through |x| only) and `zero_at_zero`
(f(t, x, 0) = 0 identically).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolated
from .quasi_periodic import FrequencyBasis, QPSignal, TorusPhase

_FORMS = ("bistable", "scaled_bistable", "radial_logistic", "linear")


def _plateau(r: np.ndarray, r_core: float, r0: float) -> np.ndarray:
    """C^1 radial weight: 1 on [0, r_core], cosine ramp down, 0 beyond r0."""
    r = np.asarray(r, dtype=float)
    ramp = 0.5 * (1.0 + np.cos(math.pi * (r - r_core) / (r0 - r_core)))
    return np.where(r <= r_core, 1.0, np.where(r >= r0, 0.0, ramp))


@dataclass(frozen=True, eq=False)
class ReactionTerm:
    """Reaction nonlinearity with hypothesis bookkeeping.

    forms:
      bistable          f = u (1-u) (u - a(t)), x independent, limits 0 and 1
      scaled_bistable   f = (1 + b(t)) u (1-u) (u - 1/2), x independent
      radial_logistic   f = u (b(t) rho(|x|) - u^2) - alpha (1 - rho(|x|)) u
      linear            f = -rate * u
    """

    form: str
    signals: dict[str, QPSignal]
    params: dict[str, float]
    g_symmetric: bool = False
    zero_at_zero: bool = False
    basis_hint: FrequencyBasis | None = None

    def __post_init__(self):
        if self.form not in _FORMS:
            raise ValueError(f"unknown reaction form {self.form!r}")
        need = {
            "bistable": ("threshold",),
            "scaled_bistable": ("gain",),
            "radial_logistic": ("growth",),
            "linear": (),
        }[self.form]
        for name in need:
            if name not in self.signals:
                raise ValueError(f"form {self.form!r} needs signal {name!r}")
        if self.form == "radial_logistic":
            for p in ("alpha", "r_core", "r0", "eps0"):
                if p not in self.params:
                    raise ValueError(f"radial_logistic needs param {p!r}")
            if not (0 < self.params["r_core"] < self.params["r0"]):
                raise ValueError("need 0 < r_core < r0")
        if self.form in ("bistable", "scaled_bistable"):
            for p in ("eps0", "mu"):
                if p not in self.params:
                    raise ValueError(f"form {self.form!r} needs param {p!r}")
        if self.form == "linear" and "rate" not in self.params:
            raise ValueError("linear form needs param 'rate'")

    @property
    def basis(self) -> FrequencyBasis:
        if self.signals:
            return next(iter(self.signals.values())).basis
        if self.basis_hint is not None:
            return self.basis_hint
        raise ValueError("reaction term has no signals, hence no basis")

    @property
    def x_dependent(self) -> bool:
        return self.form == "radial_logistic"

    def limit_states(self) -> tuple[float, float]:
        """Spatially homogeneous equilibria the wave connects (exact zeros
        of f in the stored forms)."""
        if self.form in ("bistable", "scaled_bistable"):
            return (0.0, 1.0)
        if self.form == "linear":
            return (0.0, 0.0)
        raise ValueError(f"form {self.form!r} has no stored limit states")

    # -- pointwise evaluation, vectorised over u (and the radius weights) ----

    def value(self, phase: TorusPhase, t: float, u: np.ndarray, r: np.ndarray | None = None):
        if self.form == "bistable":
            a = self.signals["threshold"].evaluate(phase, t)
            return u * (1.0 - u) * (u - a)
        if self.form == "scaled_bistable":
            b = self.signals["gain"].evaluate(phase, t)
            return (1.0 + b) * (u * (1.0 - u) * (u - 0.5))
        if self.form == "radial_logistic":
            if r is None:
                raise ValueError("radial_logistic needs node radii")
            b = self.signals["growth"].evaluate(phase, t)
            rho = self._rho(r)
            alpha = self.params["alpha"]
            return u * (b * rho - u * u) - alpha * (1.0 - rho) * u
        # linear
        return -self.params["rate"] * u

    def du(self, phase: TorusPhase, t: float, u: np.ndarray, r: np.ndarray | None = None):
        """Partial derivative df/du, same broadcasting as value()."""
        if self.form == "bistable":
            a = self.signals["threshold"].evaluate(phase, t)
            return -3.0 * u * u + 2.0 * (1.0 + a) * u - a
        if self.form == "scaled_bistable":
            b = self.signals["gain"].evaluate(phase, t)
            return (1.0 + b) * (-3.0 * u * u + 3.0 * u - 0.5)
        if self.form == "radial_logistic":
            if r is None:
                raise ValueError("radial_logistic needs node radii")
            b = self.signals["growth"].evaluate(phase, t)
            rho = self._rho(r)
            alpha = self.params["alpha"]
            return b * rho - 3.0 * u * u - alpha * (1.0 - rho)
        return -self.params["rate"] * np.ones_like(np.asarray(u, dtype=float))

    def _rho(self, r: np.ndarray) -> np.ndarray:
        return _plateau(r, self.params["r_core"], self.params["r0"])

    # -- hypothesis samplers -------------------------------------------------

    def lipschitz_estimate(self, u_lo: float, u_hi: float, n_phase: int = 24) -> float:
        """Sampled sup |df/du| over phases, one forcing period sweep, and the
        given state range.  Used to size explicit steps."""
        if self.form == "linear":
            return abs(self.params["rate"])
        us = np.linspace(u_lo, u_hi, 101)
        worst = 0.0
        basis = self.basis
        for i in range(n_phase):
            ph = TorusPhase(tuple((i / n_phase,) * basis.dimension))
            if self.x_dependent:
                rs = np.linspace(0.0, 2.0 * self.params["r0"], 41)
                for r in rs:
                    worst = max(worst, float(np.max(np.abs(self.du(ph, 0.0, us, r)))))
            else:
                worst = max(worst, float(np.max(np.abs(self.du(ph, 0.0, us)))))
        return worst

    def check_exterior_dissipativity(self, n_phase: int = 16) -> None:
        """Sampled check of df/du <= -alpha for |x| >= r0, |u| <= eps0."""
        if self.form == "linear":
            return
        if self.form != "radial_logistic":
            raise HypothesisViolated(
                f"form {self.form!r} carries no exterior dissipativity data"
            )
        alpha = self.params["alpha"]
        eps0 = self.params["eps0"]
        us = np.linspace(-eps0, eps0, 41)
        rs = np.linspace(self.params["r0"], 3.0 * self.params["r0"], 13)
        for i in range(n_phase):
            ph = TorusPhase(tuple((i / n_phase,) * self.basis.dimension))
            for r in rs:
                worst = float(np.max(self.du(ph, 0.0, us, r)))
                if worst > -alpha + 1e-12:
                    raise HypothesisViolated(
                        f"df/du = {worst:.3e} > -alpha at r = {r:.3g}", where=(r,)
                    )

    def check_limit_band(self, n_phase: int = 16) -> None:
        """Sampled check of df/du <= -mu within eps0 of each limit state."""
        if self.form not in ("bistable", "scaled_bistable"):
            raise HypothesisViolated(f"form {self.form!r} carries no limit band data")
        eps0 = self.params["eps0"]
        mu = self.params["mu"]
        lo, hi = self.limit_states()
        for i in range(n_phase):
            ph = TorusPhase(tuple((i / n_phase,) * self.basis.dimension))
            for centre in (lo, hi):
                us = np.linspace(centre - eps0, centre + eps0, 41)
                worst = float(np.max(self.du(ph, 0.0, us)))
                if worst > -mu + 1e-12:
                    raise HypothesisViolated(
                        f"df/du = {worst:.3e} > -mu near limit {centre}", where=(centre,)
                    )
