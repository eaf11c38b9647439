"""Signals, torus phases, frequency modules, return times."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from skewlab import (
    EmptyReturnSet,
    FrequencyBasis,
    QPSignal,
    TorusPhase,
    advance_phase,
    find_integer_relation,
    module_contains,
    return_times,
    torus_distance,
)

TWO_PI = 2.0 * math.pi
SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


def direct_sum(coeffs, omegas, theta, t):
    """Independent oracle: literal term-by-term mode summation."""
    total = 0j
    for k, a in coeffs.items():
        ang = sum(ki * (wi * t + TWO_PI * thi) for ki, wi, thi in zip(k, omegas, theta))
        total += a * cmath.exp(1j * ang)
    return total


def random_signal(rng, basis, n_harmonics=4):
    harmonics = []
    for _ in range(n_harmonics):
        k = tuple(int(v) for v in rng.integers(-3, 4, basis.dimension))
        if not any(k):
            k = (1,) + (0,) * (basis.dimension - 1)
        harmonics.append((k, float(rng.normal()), float(rng.normal())))
    return QPSignal.from_harmonics(basis, float(rng.normal()), harmonics)


def test_evaluate_single_cosine():
    # a(t) = 0.25 + 0.1 cos t at phase 0, t = 0 gives 0.35
    basis = FrequencyBasis((1.0,))
    sig = QPSignal.from_harmonics(basis, 0.25, [((1,), 0.1, 0.0)])
    assert sig.evaluate(TorusPhase((0.0,)), 0.0) == pytest.approx(0.35, abs=1e-14)
    assert sig.evaluate(TorusPhase((0.0,)), math.pi) == pytest.approx(0.15, abs=1e-14)


def test_evaluate_two_frequency_against_direct_sum():
    basis = FrequencyBasis((1.0, SQRT2))
    sig = QPSignal.from_harmonics(basis, 0.0, [((1, 0), 0.0, 0.1), ((0, 1), 0.0, 0.05)])
    t = math.pi / 2
    got = sig.evaluate(TorusPhase((0.0, 0.0)), t)
    oracle = direct_sum(sig.coeffs, basis.omegas, (0.0, 0.0), t)
    assert abs(oracle.imag) < 1e-12
    assert got == pytest.approx(oracle.real, abs=1e-13)
    assert got == pytest.approx(0.1 + 0.05 * math.sin(SQRT2 * math.pi / 2), abs=1e-13)


def test_evaluate_random_signals_match_oracle_and_stay_real():
    rng = np.random.default_rng(7)
    basis = FrequencyBasis((1.0, SQRT2, SQRT3))
    for _ in range(20):
        sig = random_signal(rng, basis)
        theta = tuple(rng.uniform(0, 1, 3))
        t = float(rng.uniform(-20, 20))
        oracle = direct_sum(sig.coeffs, basis.omegas, theta, t)
        assert abs(oracle.imag) < 1e-12
        assert sig.evaluate(TorusPhase(theta), t) == pytest.approx(oracle.real, abs=1e-11)


def test_hull_translation_identity():
    # evaluating at an advanced phase equals evaluating later in time
    rng = np.random.default_rng(11)
    basis = FrequencyBasis((1.0, SQRT2))
    sig = random_signal(rng, basis)
    for _ in range(25):
        theta = TorusPhase(tuple(rng.uniform(0, 1, 2)))
        t = float(rng.uniform(0, 30))
        tau = float(rng.uniform(0, 30))
        lhs = sig.evaluate(advance_phase(theta, basis, tau), t)
        rhs = sig.evaluate(theta, t + tau)
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_reality_constraint_enforced():
    basis = FrequencyBasis((1.0, SQRT2))
    with pytest.raises(ValueError, match="conjugate"):
        QPSignal(basis, {(1, 0): 0.1 + 0.2j})
    with pytest.raises(ValueError, match="conjugate"):
        QPSignal(basis, {(1, 0): 0.1 + 0.2j, (-1, 0): 0.1 + 0.2j})
    # a proper pair passes
    QPSignal(basis, {(1, 0): 0.1 + 0.2j, (-1, 0): 0.1 - 0.2j})


def test_advance_phase_formula_and_flow_property():
    basis = FrequencyBasis((TWO_PI, TWO_PI * SQRT2))
    th = advance_phase(TorusPhase((0.0, 0.0)), basis, 1.0)
    assert th.theta[0] == pytest.approx(0.0, abs=1e-15)
    assert th.theta[1] == pytest.approx(SQRT2 % 1.0, abs=1e-12)
    rng = np.random.default_rng(3)
    for _ in range(25):
        theta = TorusPhase(tuple(rng.uniform(0, 1, 2)))
        s, t = rng.uniform(-40, 40, 2)
        one = advance_phase(advance_phase(theta, basis, s), basis, t)
        two = advance_phase(theta, basis, s + t)
        assert torus_distance(one, two) < 1e-12


def test_torus_phase_normalised_and_distance_symmetric():
    p = TorusPhase((1.25, -0.25))
    assert p.theta == (0.25, 0.75)
    q = TorusPhase((0.95, 0.05))
    assert torus_distance(p, q) == pytest.approx(0.3, abs=1e-12)
    assert torus_distance(p, q) == torus_distance(q, p)


def test_rational_independence_flag():
    assert FrequencyBasis((1.0,)).rationally_independent
    assert FrequencyBasis((1.0, SQRT2)).rationally_independent
    assert not FrequencyBasis((1.0, 1.5)).rationally_independent
    assert not FrequencyBasis((2.0, 3.0)).rationally_independent
    # triple with a hidden 3-term relation: 1, sqrt2, 1 + sqrt2
    assert not FrequencyBasis((1.0, SQRT2, 1.0 + SQRT2)).rationally_independent
    assert FrequencyBasis((1.0, SQRT2, SQRT3)).rationally_independent


def test_find_integer_relation_witness():
    rel = find_integer_relation((1.0, SQRT2, 1.0 + SQRT2))
    assert rel is not None
    assert abs(sum(n * w for n, w in zip(rel, (1.0, SQRT2, 1.0 + SQRT2)))) <= 1e-9
    assert find_integer_relation((1.0, SQRT2)) is None


def test_module_contains_examples():
    # integer multiples of a single frequency
    one = FrequencyBasis((1.0,))
    assert not module_contains(one, (1.0 / 3.0,))
    res = module_contains(FrequencyBasis((1.0, SQRT2)), (1.0 + SQRT2,))
    assert res
    assert res.witnesses[1.0 + SQRT2] == (1, 1)
    # submodule relation: M(a) subset of M(f) sampled from spectra
    basis = FrequencyBasis((1.0, SQRT2))
    sig = QPSignal.from_harmonics(
        basis, 0.2, [((1, 0), 0.1, 0.0), ((1, 1), 0.0, 0.05)]
    )
    assert module_contains(basis, tuple(sig.spectrum()))


def test_module_contains_inconclusive_band():
    # candidate deliberately 5e-7 off an integer combination: not contained at
    # 1e-9 but flagged inconclusive at 1e-6
    basis = FrequencyBasis((1.0, SQRT2))
    res = module_contains(basis, (1.0 + SQRT2 + 5e-7,))
    assert not res.contained
    assert res.bound_inconclusive
    far = module_contains(basis, (1.0 / 3.0,), bound=10)
    assert not far.contained
    assert not far.bound_inconclusive


def test_return_times_periodic_case():
    # single frequency 2 pi: returns at every integer time
    basis = FrequencyBasis((TWO_PI,))
    ts = return_times(TorusPhase((0.0,)), basis, eps=1e-6, horizon=10.0, dt=0.001)
    assert np.allclose(sorted(set(np.round(ts))), np.arange(1, 11))
    # and each hit is an integer to grid accuracy
    assert np.max(np.abs(ts - np.round(ts))) < 0.001 + 1e-12


def test_return_times_two_frequency_against_brute_force():
    basis = FrequencyBasis((TWO_PI, TWO_PI * SQRT2))
    phase = TorusPhase((0.0, 0.0))
    dt = 0.05
    got = return_times(phase, basis, eps=0.05, horizon=100.0, dt=dt)
    # independent oracle: literal scan of the torus distance on the dt grid
    expect = []
    k = 1
    while k * dt <= 100.0 + 1e-12:
        t = k * dt
        d1 = (t / 1.0) % 1.0  # omega/(2 pi) = 1
        d2 = (t * SQRT2) % 1.0
        dist = max(min(d1, 1 - d1), min(d2, 1 - d2))
        if dist < 0.05:
            expect.append(t)
        k += 1
    assert np.allclose(got, expect)
    # near the continued-fraction denominators of sqrt2
    for denom in (12, 29, 70):
        assert np.min(np.abs(got - denom)) < 0.1


def test_return_times_empty():
    basis = FrequencyBasis((TWO_PI, TWO_PI * SQRT2))
    with pytest.raises(EmptyReturnSet):
        return_times(TorusPhase((0.0, 0.0)), basis, eps=1e-4, horizon=20.0, dt=0.01)


def test_signal_json_round_trip():
    basis = FrequencyBasis((1.0, SQRT2))
    sig = QPSignal.from_harmonics(basis, 0.25, [((1, 0), 0.1, 0.2), ((0, 1), 0.0, 0.05)])
    back = QPSignal.from_json(sig.to_json())
    assert back.basis.omegas == sig.basis.omegas
    assert back.coeffs == sig.coeffs
    rng = np.random.default_rng(5)
    for _ in range(5):
        theta = TorusPhase(tuple(rng.uniform(0, 1, 2)))
        t = float(rng.uniform(0, 10))
        assert back.evaluate(theta, t) == pytest.approx(sig.evaluate(theta, t), abs=1e-14)


def test_amplitude_bound_dominates():
    rng = np.random.default_rng(13)
    basis = FrequencyBasis((1.0, SQRT2))
    sig = random_signal(rng, basis)
    bound = sig.amplitude_bound()
    ts = np.linspace(0, 200, 4001)
    assert np.max(np.abs(sig.evaluate(TorusPhase((0.1, 0.7)), ts))) <= bound + 1e-12


def test_basis_validation():
    with pytest.raises(ValueError):
        FrequencyBasis(())
    with pytest.raises(ValueError):
        FrequencyBasis((1.0, -2.0))
    with pytest.raises(ValueError):
        FrequencyBasis((1.0, 1.0))
