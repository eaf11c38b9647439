"""Omega-limit sampling, one-cover detection, and the stability probe."""

from __future__ import annotations

import numpy as np
import pytest

from skewlab import (
    EmptyReturnSet,
    FrequencyBasis,
    Grid,
    IntegratorConfig,
    NotStable,
    OmegaLimitEstimate,
    Profile,
    QPSignal,
    ReactionTerm,
    SkewState,
    TorusPhase,
    WaveProblem,
    omega_limit,
    one_cover_check,
    perturbation_ensemble,
    stability_probe,
)

BASIS1 = FrequencyBasis((1.0,))


def decay_problem(grid, rate=1.0):
    term = ReactionTerm(
        "linear", {}, {"rate": rate}, zero_at_zero=True, basis_hint=BASIS1
    )
    return WaveProblem(grid, term, None, 0.0, 0.0)


def bump_state(grid, height=0.4):
    (xs,) = grid.axes()
    return SkewState(Profile(grid, height * np.exp(-(xs**2) / 4.0)), TorusPhase((0.0,)))


def test_omega_limit_of_decaying_orbit_converges_to_zero_fiber():
    g = Grid.line(-10.0, 10.0, 101)
    cfg = IntegratorConfig(dt=0.01, lipschitz_bound=2.0)
    prob = decay_problem(g)
    est = omega_limit(bump_state(g), prob, cfg, eps_return=0.01, horizon=100.0)
    assert est.converged
    assert len(est.samples) == est.times.size == len(est.phases)
    assert len(est.diagnostics) == len(est.raw_diagnostics) >= 2
    # envelope is nonincreasing and dominates the raw stage values
    assert all(a >= b for a, b in zip(est.diagnostics, est.diagnostics[1:]))
    assert all(e >= r for e, r in zip(est.diagnostics, est.raw_diagnostics))
    assert np.max(np.abs(est.representative().values)) < 1e-8
    assert one_cover_check(est, tol=1e-3)
    s = est.summary()
    assert s["status"] == "converged" and s["n_samples"] == len(est.samples)


def test_omega_limit_needs_enough_returns():
    g = Grid.line(-10.0, 10.0, 51)
    cfg = IntegratorConfig(dt=0.01, lipschitz_bound=2.0)
    basis = FrequencyBasis((1.0, np.sqrt(2.0)))
    term = ReactionTerm(
        "linear", {}, {"rate": 1.0}, zero_at_zero=True, basis_hint=basis
    )
    prob = WaveProblem(g, term, None, 0.0, 0.0)
    state = SkewState(bump_state(g).profile, TorusPhase((0.0, 0.0)))
    with pytest.raises(EmptyReturnSet):
        omega_limit(state, prob, cfg, eps_return=1e-6, horizon=5.0)


def _manual_estimate(grid, values_list, status):
    profs = [Profile(grid, v) for v in values_list]
    return OmegaLimitEstimate(
        times=np.arange(len(profs), dtype=float),
        phases=[TorusPhase((0.0,))] * len(profs),
        samples=profs,
        raw_diagnostics=[0.0],
        diagnostics=[0.0],
        status=status,
        eps_return=0.01,
        conv_tol=1e-4,
    )


def test_one_cover_check_guards_and_cluster_splitting():
    g = Grid.line(0.0, 1.0, 11)
    zeros = np.zeros(11)
    est = _manual_estimate(g, [zeros, zeros + 1e-5], "undecided")
    from skewlab import UndecidedEstimate

    with pytest.raises(UndecidedEstimate):
        one_cover_check(est, tol=1e-3)
    # two well-separated values in the tail: not a 1-cover
    est2 = _manual_estimate(g, [zeros, zeros, zeros + 1.0, zeros + 1e-5], "converged")
    assert not one_cover_check(est2, tol=1e-3)
    # one cluster but tail diameter above tol: rejected
    est3 = _manual_estimate(g, [zeros, zeros, zeros + 5e-2, zeros], "converged")
    assert not one_cover_check(est3, tol=1e-3)
    # transient head is ignored once the tail has collapsed
    est4 = _manual_estimate(g, [zeros + 1.0, zeros, zeros + 1e-5, zeros], "converged")
    assert one_cover_check(est4, tol=1e-3)


def test_perturbation_ensemble_shape_taper_and_determinism():
    g = Grid.line(-10.0, 10.0, 201)
    bank = perturbation_ensemble(g, seed=5, size=16)
    assert len(bank) == 16
    for p in bank:
        assert p.shape == (201,)
        assert np.max(np.abs(p)) == 1.0
        assert p[0] == 0.0 and p[-1] == 0.0
    assert any(p.min() < -0.5 for p in bank) and any(p.max() > 0.5 for p in bank)
    again = perturbation_ensemble(g, seed=5, size=16)
    assert all(np.array_equal(a, b) for a, b in zip(bank, again))
    g2 = Grid.box(-4.0, 4.0, 33)
    bank2 = perturbation_ensemble(g2, seed=5, size=8)
    assert len(bank2) == 8 and all(p.shape == (33, 33) for p in bank2)


def test_stability_probe_contraction_accepts_first_rung():
    g = Grid.line(-10.0, 10.0, 101)
    cfg = IntegratorConfig(dt=0.01, lipschitz_bound=2.0)
    prob = decay_problem(g)
    probe = stability_probe(
        bump_state(g),
        prob,
        cfg,
        eps_list=[0.1, 0.02],
        T=2.0,
        ensemble=8,
        ladder_depth=3,
        seed=99,
    )
    # linear contraction: deviations never grow, the first rung passes
    assert probe.table == {0.1: 0.05, 0.02: 0.01}
    assert probe.worst_member == {0.1: None, 0.02: None}
    s = probe.summary()
    assert s["ensemble"] == 8 and s["ladder_depth"] == 3


def test_stability_probe_reports_exponential_escape():
    g = Grid.line(-10.0, 10.0, 101)
    cfg = IntegratorConfig(dt=0.01, lipschitz_bound=4.0)
    prob = decay_problem(g, rate=-3.0)  # f = +3u: perturbations grow
    state = SkewState(Profile(g, np.zeros(101)), TorusPhase((0.0,)))
    with pytest.raises(NotStable):
        stability_probe(
            state,
            prob,
            cfg,
            eps_list=[0.1],
            T=3.0,
            ensemble=4,
            ladder_depth=4,
            seed=7,
        )
