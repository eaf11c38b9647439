"""Quasi-periodic signals, their frequency modules, and the hull as a torus.

A signal is a finite real trigonometric sum over an integer lattice of
frequency combinations.  Its hull under time translation is realised as a
torus of phases; translating the signal in time is rotating the phase.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyReturnSet

TWO_PI = 2.0 * math.pi

# enumeration cap per free coordinate for relation searches in >= 3 frequencies;
# pairs are decided exactly by continued fractions up to the full bound
_MESH_CAP = 64
_CONTAIN_MESH_CAP = 400


def _convergents(x: float, q_max: int) -> list[tuple[int, int]]:
    """Continued-fraction convergents p/q of x with q <= q_max."""
    a = math.floor(x)
    p_prev, q_prev = 1, 0
    p, q = int(a), 1
    out = [(p, q)]
    frac = x - a
    for _ in range(80):
        if frac < 1e-15 or q > q_max:
            break
        x = 1.0 / frac
        a = math.floor(x)
        frac = x - a
        p, p_prev = int(a) * p + p_prev, p
        q, q_prev = int(a) * q + q_prev, q
        if q > q_max:
            break
        out.append((p, q))
    return out


def find_integer_relation(
    omegas: tuple[float, ...], bound: int = 10**6, tol: float = 1e-9
) -> tuple[int, ...] | None:
    """Search for a nonzero integer vector n with |<n, omega>| <= tol.

    Pairs are decided by continued fractions of the frequency ratio, which
    finds every relation with coefficients up to `bound`.  For three or more
    frequencies a bounded mesh over the trailing coordinates is added; a miss
    there only means "not found within the searched box".
    """
    m = len(omegas)
    if m == 1:
        return None
    # pairwise relations via best rational approximations
    for i in range(m):
        for j in range(i + 1, m):
            ratio = omegas[i] / omegas[j]
            for p, q in _convergents(abs(ratio), bound):
                if p == 0 and q == 0:
                    continue
                if abs(p) > bound:
                    break
                sign = 1 if ratio >= 0 else -1
                resid = q * omegas[i] - sign * p * omegas[j]
                if abs(resid) <= tol and (p != 0 or q != 0):
                    n = [0] * m
                    n[i] = q
                    n[j] = -sign * p
                    return tuple(n)
    if m == 2:
        return None
    # small full mesh over the trailing coordinates, leading one solved by rounding
    cap = min(bound, _MESH_CAP)
    grids = np.meshgrid(*([np.arange(-cap, cap + 1)] * (m - 1)), indexing="ij")
    tail = np.stack([g.ravel() for g in grids], axis=1)
    partial = tail @ np.asarray(omegas[1:])
    lead = np.rint(-partial / omegas[0])
    resid = np.abs(lead * omegas[0] + partial)
    ok = (resid <= tol) & ((np.abs(lead) > 0) | np.any(tail != 0, axis=1))
    ok &= np.abs(lead) <= bound
    idx = np.nonzero(ok)[0]
    if idx.size:
        i0 = idx[np.argmin(resid[idx])]
        return (int(lead[i0]),) + tuple(int(v) for v in tail[i0])
    return None


@dataclass(frozen=True)
class FrequencyBasis:
    """Finite set of positive rationally examined frequencies (rad/time).

    `rationally_independent` is computed by a bounded integer-relation search
    at construction; it must hold for the induced torus rotation to be minimal.
    """

    omegas: tuple[float, ...]
    relation_bound: int = 10**6
    relation_tol: float = 1e-9
    rationally_independent: bool = field(init=False)

    def __post_init__(self):
        om = tuple(float(w) for w in self.omegas)
        if not om:
            raise ValueError("frequency basis must be nonempty")
        if any(not math.isfinite(w) or w <= 0 for w in om):
            raise ValueError("frequencies must be finite and positive")
        if len(set(om)) != len(om):
            raise ValueError("frequencies must be pairwise distinct")
        object.__setattr__(self, "omegas", om)
        rel = find_integer_relation(om, self.relation_bound, self.relation_tol)
        object.__setattr__(self, "rationally_independent", rel is None)

    @property
    def dimension(self) -> int:
        return len(self.omegas)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.omegas, dtype=float)


@dataclass(frozen=True)
class TorusPhase:
    """A point of the hull torus, componentwise in [0, 1)."""

    theta: tuple[float, ...]

    def __post_init__(self):
        th = tuple(float(x) % 1.0 for x in self.theta)
        object.__setattr__(self, "theta", th)

    @property
    def dimension(self) -> int:
        return len(self.theta)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.theta, dtype=float)


def advance_phase(phase: TorusPhase, basis: FrequencyBasis, t: float) -> TorusPhase:
    """Rotate the hull phase by time t: theta' = theta + t*omega/(2 pi) mod 1."""
    if phase.dimension != basis.dimension:
        raise ValueError("phase and basis dimensions differ")
    th = tuple((x + t * w / TWO_PI) % 1.0 for x, w in zip(phase.theta, basis.omegas))
    return TorusPhase(th)


def torus_distance(a: TorusPhase, b: TorusPhase) -> float:
    """Max over components of the circle distance."""
    if a.dimension != b.dimension:
        raise ValueError("phase dimensions differ")
    d = 0.0
    for x, y in zip(a.theta, b.theta):
        r = abs(x - y) % 1.0
        d = max(d, min(r, 1.0 - r))
    return d


@dataclass(frozen=True, eq=False)
class QPSignal:
    """Real trigonometric sum s(theta, t) = Re sum_k a_k e^{i<k, omega t + 2 pi theta>}.

    Coefficients are stored for every lattice vector including negatives and
    must satisfy a_{-k} = conj(a_k) so the sum is real.
    """

    basis: FrequencyBasis
    coeffs: dict[tuple[int, ...], complex]
    _ks: np.ndarray = field(init=False, repr=False)
    _amps: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = self.basis.dimension
        clean: dict[tuple[int, ...], complex] = {}
        for k, a in self.coeffs.items():
            kk = tuple(int(v) for v in k)
            if len(kk) != m:
                raise ValueError(f"mode {k} has wrong lattice dimension")
            a = complex(a)
            if a != 0:
                clean[kk] = a
        for k, a in clean.items():
            neg = tuple(-v for v in k)
            if any(k):
                b = clean.get(neg)
                if b is None or abs(b - a.conjugate()) > 1e-12 * max(1.0, abs(a)):
                    raise ValueError(f"mode {k} lacks a conjugate partner at {neg}")
            elif abs(a.imag) > 1e-15 * max(1.0, abs(a)):
                raise ValueError("constant mode must be real")
        object.__setattr__(self, "coeffs", clean)
        ks = np.array(sorted(clean.keys()), dtype=float).reshape(len(clean), m)
        amps = np.array([clean[tuple(int(v) for v in row)] for row in ks], dtype=complex)
        object.__setattr__(self, "_ks", ks)
        object.__setattr__(self, "_amps", amps)

    @classmethod
    def constant(cls, basis: FrequencyBasis, value: float) -> "QPSignal":
        return cls(basis, {(0,) * basis.dimension: complex(value)})

    @classmethod
    def from_harmonics(
        cls,
        basis: FrequencyBasis,
        mean: float,
        harmonics: list[tuple[tuple[int, ...], float, float]] = (),
    ) -> "QPSignal":
        """Build from mean + sum_j [c_j cos(psi_j) + s_j sin(psi_j)] terms.

        Each harmonic is (k, cos_amp, sin_amp) with psi = <k, omega t + 2 pi theta>.
        """
        m = basis.dimension
        coeffs: dict[tuple[int, ...], complex] = {(0,) * m: complex(mean)}
        for k, c, s in harmonics:
            kk = tuple(int(v) for v in k)
            if not any(kk):
                coeffs[kk] = coeffs.get(kk, 0) + complex(c)
                continue
            neg = tuple(-v for v in kk)
            a = 0.5 * complex(c, -s)
            coeffs[kk] = coeffs.get(kk, 0) + a
            coeffs[neg] = coeffs.get(neg, 0) + a.conjugate()
        return cls(basis, coeffs)

    def evaluate_complex(self, phase: TorusPhase, t):
        if phase.dimension != self.basis.dimension:
            raise ValueError("phase dimension does not match signal basis")
        if len(self._amps) == 0:
            return 0.0 if np.isscalar(t) else np.zeros_like(np.asarray(t, dtype=float))
        freqs = self._ks @ self.basis.as_array()
        offs = TWO_PI * (self._ks @ phase.as_array())
        t = np.asarray(t, dtype=float)
        ang = np.multiply.outer(t, freqs) + offs
        return np.exp(1j * ang) @ self._amps

    def evaluate(self, phase: TorusPhase, t):
        """Value of the signal at hull element `phase`, elapsed time `t`.

        `t` may be a scalar or an array; the imaginary residue of the mode sum
        stays below 1e-12 by the conjugate-pair invariant.
        """
        total = self.evaluate_complex(phase, t)
        if np.ndim(total) == 0:
            return float(np.real(total))
        return np.real(total)

    def amplitude_bound(self) -> float:
        """Upper bound sup |s| <= sum_k |a_k|."""
        return float(np.sum(np.abs(self._amps)))

    def oscillation_bound(self) -> float:
        """Upper bound on |s - mean|."""
        mean = self.coeffs.get((0,) * self.basis.dimension, 0.0)
        return float(np.sum(np.abs(self._amps)) - abs(mean))

    def spectrum(self) -> list[float]:
        """Frequencies <k, omega> of the stored modes (one per conjugate pair)."""
        out = []
        for k in self.coeffs:
            f = float(np.dot(k, self.basis.omegas))
            if f > 0 or (f == 0 and not any(k)):
                out.append(f)
        return sorted(out)

    def to_json(self) -> str:
        modes = [
            {"k": list(k), "re": a.real, "im": a.imag}
            for k, a in sorted(self.coeffs.items())
        ]
        return json.dumps(
            {"omegas": list(self.basis.omegas), "modes": modes}, sort_keys=True
        )

    @classmethod
    def from_json(cls, text: str) -> "QPSignal":
        raw = json.loads(text)
        basis = FrequencyBasis(tuple(raw["omegas"]))
        coeffs = {
            tuple(m["k"]): complex(m["re"], m["im"]) for m in raw["modes"]
        }
        return cls(basis, coeffs)


@dataclass(frozen=True)
class ContainmentCheck:
    """Result of a frequency-module membership search.

    `bound_inconclusive` is set when the nearest integer combination lands
    within 1e-6 but not within the 1e-9 acceptance tolerance, so "False"
    only means "not found within the searched bound".
    """

    contained: bool
    bound_inconclusive: bool
    witnesses: dict[float, tuple[int, ...] | None]
    nearest_residual: float

    def __bool__(self) -> bool:
        return self.contained


def module_contains(
    container: FrequencyBasis,
    candidate_freqs: tuple[float, ...],
    bound: int = 10**6,
    tol: float = 1e-9,
    inconclusive_tol: float = 1e-6,
) -> ContainmentCheck:
    """Decide whether each candidate frequency lies in the additive group
    generated by the container basis, searching integer combinations with
    coefficients bounded by `bound`."""
    om = container.as_array()
    m = container.dimension
    witnesses: dict[float, tuple[int, ...] | None] = {}
    worst_nearest = 0.0
    contained = True
    inconclusive = False
    for lam in candidate_freqs:
        lam = float(lam)
        if m == 1:
            n0 = int(np.rint(lam / om[0]))
            best_n: tuple[int, ...] = (n0,)
            best_resid = abs(n0 * om[0] - lam)
        else:
            cap = bound if m == 2 else min(bound, _CONTAIN_MESH_CAP)
            tail_axes = [np.arange(-cap, cap + 1)] * (m - 1)
            best_resid = math.inf
            best_n = (0,) * m
            # chunk the leading free axis to bound memory for m == 2 at 10^6
            axis = tail_axes[0]
            step = 2_000_000 if m == 2 else axis.size
            for start in range(0, axis.size, step):
                part = axis[start : start + step]
                if m == 2:
                    tail = part.reshape(-1, 1)
                else:
                    grids = np.meshgrid(part, *tail_axes[1:], indexing="ij")
                    tail = np.stack([g.ravel() for g in grids], axis=1)
                partial = tail @ om[1:]
                lead = np.rint((lam - partial) / om[0])
                np.clip(lead, -bound, bound, out=lead)
                resid = np.abs(lead * om[0] + partial - lam)
                i0 = int(np.argmin(resid))
                if resid[i0] < best_resid:
                    best_resid = float(resid[i0])
                    best_n = (int(lead[i0]),) + tuple(int(v) for v in tail[i0])
        if best_resid <= tol:
            witnesses[lam] = best_n
        else:
            witnesses[lam] = None
            contained = False
            if best_resid <= inconclusive_tol:
                inconclusive = True
        worst_nearest = max(worst_nearest, best_resid)
    return ContainmentCheck(contained, inconclusive, witnesses, worst_nearest)


def return_times(
    phase: TorusPhase,
    basis: FrequencyBasis,
    eps: float,
    horizon: float,
    dt: float,
) -> np.ndarray:
    """Times t in (0, horizon], multiples of dt, whose rotated phase returns
    within torus distance eps of the start.  Brute-force scan on the dt grid."""
    if eps <= 0 or dt <= 0 or horizon <= dt:
        raise ValueError("need eps > 0, dt > 0, horizon > dt")
    n = int(math.floor(horizon / dt + 1e-9))
    th0 = phase.as_array()
    om = basis.as_array()
    out = []
    chunk = 2_000_000
    for start in range(1, n + 1, chunk):
        ks = np.arange(start, min(start + chunk, n + 1), dtype=float)
        ts = ks * dt
        th = (th0[None, :] + np.outer(ts, om) / TWO_PI) % 1.0
        d = np.abs(th - th0[None, :]) % 1.0
        d = np.minimum(d, 1.0 - d)
        hit = np.max(d, axis=1) < eps
        out.append(ts[hit])
    times = np.concatenate(out) if out else np.empty(0)
    if times.size == 0:
        raise EmptyReturnSet(
            f"no return within {horizon} at eps={eps}; enlarge horizon or eps"
        )
    return times
