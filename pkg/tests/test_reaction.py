"""Reaction terms: evaluation, derivatives, and hypothesis samplers."""

from __future__ import annotations

import math

import numpy as np
import pytest

from skewlab import (
    FrequencyBasis,
    HypothesisViolated,
    QPSignal,
    ReactionTerm,
    TorusPhase,
)

SQRT2 = math.sqrt(2.0)


def two_freq_basis():
    return FrequencyBasis((1.0, SQRT2))


def threshold_signal(basis):
    # a(t) = 0.25 + 0.1 sin t + 0.05 sin(sqrt(2) t)
    return QPSignal.from_harmonics(
        basis, 0.25, [((1, 0), 0.0, 0.1), ((0, 1), 0.0, 0.05)]
    )


def bistable_term():
    basis = two_freq_basis()
    return ReactionTerm(
        "bistable",
        {"threshold": threshold_signal(basis)},
        {"eps0": 0.02, "mu": 0.05},
        zero_at_zero=True,
    )


def scaled_term(amp=0.04):
    basis = two_freq_basis()
    gain = QPSignal.from_harmonics(
        basis, 0.0, [((1, 0), 0.0, amp), ((0, 1), 0.0, 0.5 * amp)]
    )
    return ReactionTerm(
        "scaled_bistable",
        {"gain": gain},
        {"eps0": 0.05, "mu": 0.3},
        zero_at_zero=True,
    )


def radial_term():
    basis = two_freq_basis()
    growth = QPSignal.from_harmonics(
        basis, 0.25, [((1, 0), 0.0, 0.02), ((0, 1), 0.0, 0.01)]
    )
    return ReactionTerm(
        "radial_logistic",
        {"growth": growth},
        {"alpha": 0.5, "r_core": 4.0, "r0": 8.0, "eps0": 0.2},
        g_symmetric=True,
        zero_at_zero=True,
    )


def linear_term(rate=1.0):
    return ReactionTerm(
        "linear",
        {},
        {"rate": rate},
        zero_at_zero=True,
        basis_hint=two_freq_basis(),
    )


def test_bistable_value_matches_cubic():
    term = bistable_term()
    ph = TorusPhase((0.0, 0.0))
    # at phase 0 and t = 0 the threshold equals its mean 0.25
    u = np.array([0.0, 0.25, 0.5, 1.0])
    f = term.value(ph, 0.0, u)
    expect = u * (1.0 - u) * (u - 0.25)
    assert np.array_equal(f, expect)
    assert f[0] == 0.0 and f[1] == 0.0 and f[3] == 0.0
    assert f[2] == pytest.approx(0.0625)


def test_scaled_bistable_is_odd_about_half():
    term = scaled_term()
    ph = TorusPhase((0.37, 0.81))
    u = np.linspace(-0.2, 0.7, 19)
    f_u = term.value(ph, 0.0, u)
    f_mirror = term.value(ph, 0.0, 1.0 - u)
    # f(1 - u) = -f(u) for every phase: the symmetry the flagship run uses
    assert np.max(np.abs(f_mirror + f_u)) < 1e-15


def test_derivative_matches_finite_difference():
    rng = np.random.default_rng(7)
    ph = TorusPhase((0.123, 0.456))
    e = 1e-6
    for term in (bistable_term(), scaled_term(), linear_term(0.7)):
        u = rng.uniform(-0.3, 1.3, size=40)
        fd = (term.value(ph, 0.0, u + e) - term.value(ph, 0.0, u - e)) / (2 * e)
        assert np.max(np.abs(term.du(ph, 0.0, u) - fd)) < 1e-7
    term = radial_term()
    u = rng.uniform(-0.5, 0.8, size=40)
    r = rng.uniform(0.0, 12.0, size=40)
    fd = (term.value(ph, 0.0, u + e, r) - term.value(ph, 0.0, u - e, r)) / (2 * e)
    assert np.max(np.abs(term.du(ph, 0.0, u, r) - fd)) < 1e-7


def test_radial_value_inside_core_and_outside_support():
    term = radial_term()
    ph = TorusPhase((0.0, 0.0))
    u = np.array([0.3])
    inside = term.value(ph, 0.0, u, np.array([1.0]))[0]
    # rho = 1 inside the core: f = u (b - u^2) with b = 0.25
    assert inside == pytest.approx(0.3 * (0.25 - 0.09), abs=1e-15)
    outside = term.value(ph, 0.0, u, np.array([10.0]))[0]
    # rho = 0 outside r0: f = -u^3 - alpha u
    assert outside == pytest.approx(-0.027 - 0.5 * 0.3, abs=1e-15)
    mid = 0.5 * (4.0 + 8.0)
    # cosine ramp passes through 1/2 at the midpoint of [r_core, r0]
    half = term.value(ph, 0.0, np.array([0.0]), np.array([mid]))
    assert half[0] == 0.0  # zero_at_zero regardless of rho


def test_limit_states():
    assert bistable_term().limit_states() == (0.0, 1.0)
    assert scaled_term().limit_states() == (0.0, 1.0)
    with pytest.raises(ValueError):
        radial_term().limit_states()


def test_limit_band_check_passes_and_fails():
    bistable_term().check_limit_band()
    scaled_term().check_limit_band()
    basis = two_freq_basis()
    wide = ReactionTerm(
        "bistable",
        {"threshold": threshold_signal(basis)},
        {"eps0": 0.4, "mu": 0.05},
    )
    with pytest.raises(HypothesisViolated) as info:
        wide.check_limit_band()
    assert info.value.where is not None


def test_exterior_dissipativity():
    radial_term().check_exterior_dissipativity()
    with pytest.raises(HypothesisViolated):
        bistable_term().check_exterior_dissipativity()


def test_lipschitz_estimate_brackets_true_slope():
    assert linear_term(0.7).lipschitz_estimate(-1.0, 1.0) == 0.7
    est = bistable_term().lipschitz_estimate(-0.2, 1.2)
    # |f_u| on [-0.2, 1.2] peaks at the right endpoint, about 1.36 at a = 0.4
    assert 1.0 < est < 2.0


def test_form_validation():
    basis = two_freq_basis()
    with pytest.raises(ValueError):
        ReactionTerm("cubic", {}, {})
    with pytest.raises(ValueError):
        ReactionTerm("bistable", {}, {"eps0": 0.02, "mu": 0.05})
    with pytest.raises(ValueError):
        ReactionTerm(
            "radial_logistic",
            {"growth": QPSignal.constant(basis, 0.25)},
            {"alpha": 0.5, "r_core": 9.0, "r0": 8.0, "eps0": 0.2},
        )
    with pytest.raises(ValueError):
        ReactionTerm("linear", {}, {})


def test_radial_needs_radii():
    term = radial_term()
    with pytest.raises(ValueError):
        term.value(TorusPhase((0.0, 0.0)), 0.0, np.array([0.1]))
