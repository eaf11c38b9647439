import math

import numpy as np
import pytest

from skewlab.profiles import Grid
from skewlab.quasi_periodic import TorusPhase
from skewlab.scenarios import (
    CALIBRATED_SPEED_ROWS,
    analytic_decay,
    autonomous_wave_reaction,
    clamped_front,
    closed_form_front,
    flatten_tails,
    radial_flagship,
    rotation_equivariance,
    shift_equivariance,
    speed_oracle,
    stationary_pulse,
    stationary_pulse_values,
    wave_default,
    wave_flagship,
    wiggled_front,
)

SQRT2 = math.sqrt(2.0)


def test_closed_form_front_solves_the_autonomous_equation():
    term = autonomous_wave_reaction(0.25)
    phi, c, residual = closed_form_front(0.25)
    xs = np.linspace(-30.0, 30.0, 2001)
    assert abs(c - 0.25 / SQRT2 * 2.0) < 1e-15
    assert residual(term, xs, TorusPhase((0.0,))) < 1e-10


def test_stationary_pulse_peak_symmetry_and_decay():
    grid = Grid.line(-40.0, 40.0, 801)
    vals = stationary_pulse_values(grid, a=0.25)
    # peak: positive root of u^2 - (4/3)(1+a) u + 2a below 1
    u_star = (5.0 - math.sqrt(7.0)) / 6.0
    assert abs(vals.max() - u_star) < 1e-8
    # even in x up to the 1-ulp asymmetry of the linspace axis
    np.testing.assert_allclose(vals, vals[::-1], rtol=0.0, atol=1e-12)
    assert 0.0 < vals[0] < 1e-4 and 0.0 < vals[-1] < 1e-4
    right = vals[400:]
    assert np.all(np.diff(right) <= 0.0)


def test_clamped_front_tails_sit_exactly_on_limits():
    grid = Grid.line(-50.0, 50.0, 1001)
    (xs,) = grid.axes()
    vals = clamped_front(grid).values
    assert np.all(vals[xs <= -15.0] == 1.0)
    assert np.all(vals[xs >= 15.0] == 0.0)
    assert np.all(np.diff(vals) <= 0.0)


def test_wiggled_front_is_seeded_and_tail_exact():
    grid = Grid.line(-50.0, 50.0, 1001)
    (xs,) = grid.axes()
    a = wiggled_front(grid, seed=7)
    b = wiggled_front(grid, seed=7)
    c = wiggled_front(grid, seed=8)
    np.testing.assert_array_equal(a.values, b.values)
    assert np.max(np.abs(a.values - c.values)) > 1e-3
    span = xs[-1] - xs[0]
    assert np.all(a.values[xs <= xs[0] + 0.2 * span] == 1.0)
    assert np.all(a.values[xs >= xs[-1] - 0.2 * span] == 0.0)
    # non-monotone start: interior bumps must leave a genuine wiggle
    assert np.any(np.diff(a.values) > 1e-3)


def test_flatten_tails_snaps_only_near_limit_values():
    grid = Grid.line(0.0, 1.0, 5)
    from skewlab.profiles import Profile

    p = Profile(grid, np.array([1e-13, 0.4, 1.0 - 5e-13, 0.6, 2e-3]))
    out = flatten_tails(p, (0.0, 1.0), tol=1e-12)
    np.testing.assert_array_equal(out.values,
                                  np.array([0.0, 0.4, 1.0, 0.6, 2e-3]))


def test_calibrated_mean_speed_near_quasi_static_value():
    mean = dict(((tuple(k), (c, s)) for k, c, s in CALIBRATED_SPEED_ROWS))
    c0 = mean[(0, 0)][0]
    quasi_static = (1.0 - 2.0 * 0.25) / SQRT2
    assert abs(c0 - quasi_static) / quasi_static < 0.02


def test_wave_default_ships_the_fitted_frame():
    scen = wave_default()
    sig = scen.problem.speed_signal
    assert sig is not None
    at_zero = sum(c for _, c, _ in CALIBRATED_SPEED_ROWS)
    assert abs(sig.evaluate(TorusPhase((0.0, 0.0)), 0.0) - at_zero) < 1e-12
    assert wave_default(speed_harmonics=None).problem.speed_signal is None


@pytest.mark.parametrize("builder", [
    wave_flagship, wave_default, radial_flagship, speed_oracle,
    stationary_pulse, shift_equivariance, analytic_decay,
    lambda: rotation_equivariance(161),
])
def test_builders_are_internally_consistent(builder):
    scen = builder()
    assert scen.state.profile.grid == scen.problem.grid
    assert scen.config.dt * scen.config.lipschitz_bound < 1.0
    assert scen.eps_return > 0 and scen.horizon > 0
