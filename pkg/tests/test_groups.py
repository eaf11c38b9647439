"""Group actions: translations, rotations, order preservation, composition."""

from __future__ import annotations

import math

import numpy as np
import pytest

from skewlab import (
    DimensionMismatch,
    Grid,
    GroupMismatch,
    Profile,
    Rotation2D,
    Translation,
    apply,
    compose,
    inverse,
    leq,
    sup_distance,
)


def smooth_1d(grid):
    (xs,) = grid.axes()
    return Profile(grid, np.tanh(-xs / 3.0) + 0.2 * np.exp(-(xs**2) / 8.0))


def smooth_2d(grid, cx=0.0, cy=0.0, w=4.0):
    xx, yy = grid.meshgrid()
    return Profile(grid, np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / w**2))


def test_exact_grid_shift_is_index_shift():
    g = Grid.line(-10.0, 10.0, 201)
    p = smooth_1d(g)
    h = g.spacing[0]
    q = apply(Translation(3 * h), p)
    # values shifted by three nodes, left edge value repeated
    assert np.array_equal(q.values[3:], p.values[:-3])
    assert np.array_equal(q.values[:3], np.full(3, p.values[0]))


def test_translation_interpolates_and_extends():
    g = Grid.line(0.0, 1.0, 11)
    p = Profile(g, np.linspace(0.0, 1.0, 11))
    q = apply(Translation(0.05), p)
    # linear data reproduced exactly away from the edge
    assert np.allclose(q.values[1:], np.linspace(0.0, 1.0, 11)[1:] - 0.05)
    assert q.values[0] == 0.0  # constant extension


def test_translation_order_preserving_exactly():
    rng = np.random.default_rng(4)
    g = Grid.line(-5.0, 5.0, 101)
    for _ in range(25):
        u = rng.normal(size=101)
        v = u + np.abs(rng.normal(size=101))
        sigma = float(rng.uniform(-3, 3))
        gu = apply(Translation(sigma), Profile(g, u))
        gv = apply(Translation(sigma), Profile(g, v))
        assert leq(gu, gv, tol=0.0)


def test_rotation_quarter_turn_exact_permutation():
    g = Grid.box(-4.0, 4.0, 33)
    p = smooth_2d(g, 1.0, 0.5, 2.0)
    q = apply(Rotation2D(math.pi / 2), p)
    xx, yy = g.meshgrid()
    # (g u)(x, y) = u(R_{-pi/2}(x, y)) = u(y, -x), exact on the lattice
    expect = np.exp(-((yy - 1.0) ** 2 + (-xx - 0.5) ** 2) / 4.0)
    assert np.max(np.abs(q.values - expect)) < 1e-15
    # four quarter turns give back the identity bitwise
    r = p
    for _ in range(4):
        r = apply(Rotation2D(math.pi / 2), r)
    assert np.array_equal(r.values, p.values)


def test_rotation_small_angle_accuracy_second_order():
    p_err = []
    for n in (65, 129):
        g = Grid.box(-8.0, 8.0, n)
        p = smooth_2d(g, 0.8, -0.4, 3.0)
        q = apply(Rotation2D(0.7), p)
        xx, yy = g.meshgrid()
        c, s = math.cos(0.7), math.sin(0.7)
        exact = np.exp(
            -((c * xx + s * yy - 0.8) ** 2 + (-s * xx + c * yy + 0.4) ** 2) / 9.0
        )
        # compare off the fill region only
        inside = np.hypot(xx, yy) <= 7.0
        p_err.append(np.max(np.abs((q.values - exact)[inside])))
    assert p_err[0] / p_err[1] > 3.0  # h halved, error near quartered


def test_rotation_order_preserving_exactly():
    rng = np.random.default_rng(5)
    g = Grid.box(-3.0, 3.0, 41)
    for _ in range(15):
        u = rng.normal(size=(41, 41))
        v = u + np.abs(rng.normal(size=(41, 41)))
        th = float(rng.uniform(0, 2 * math.pi))
        gu = apply(Rotation2D(th), Profile(g, u))
        gv = apply(Rotation2D(th), Profile(g, v))
        assert leq(gu, gv, tol=0.0)


def test_rotation_fill_outside_domain_is_zero():
    g = Grid.box(-2.0, 2.0, 21)
    p = Profile(g, np.ones((21, 21)))
    q = apply(Rotation2D(math.pi / 4), p)
    # corners rotate out of the box and read zero
    assert q.values[0, 0] == 0.0
    assert q.values[-1, -1] == 0.0
    # centre stays one
    assert q.values[10, 10] == pytest.approx(1.0, abs=1e-12)


def test_compose_inverse_and_mismatch():
    t = compose(Translation(1.0), Translation(-0.25))
    assert isinstance(t, Translation) and t.sigma == 0.75
    r = compose(Rotation2D(math.pi), Rotation2D(math.pi / 2))
    assert isinstance(r, Rotation2D)
    assert r.angle == pytest.approx(3 * math.pi / 2)
    assert inverse(Translation(2.0)).sigma == -2.0
    assert inverse(Rotation2D(0.5)).angle == pytest.approx(2 * math.pi - 0.5)
    with pytest.raises(GroupMismatch):
        compose(Translation(1.0), Rotation2D(0.1))


def test_compose_action_matches_sequential_application():
    g = Grid.line(-10.0, 10.0, 401)
    p = smooth_1d(g)
    g1, g2 = Translation(0.7), Translation(-1.3)
    lhs = apply(compose(g1, g2), p)
    rhs = apply(g1, apply(g2, p))
    # both legs are exact node shifts here, so away from the clipped edge
    # band the one-shot and sequential paths must agree bitwise
    band = 30
    assert np.array_equal(lhs.values[band:-band], rhs.values[band:-band])
    gg = Grid.box(-6.0, 6.0, 121)
    q = smooth_2d(gg, 0.5, 0.0, 2.5)
    r1, r2 = Rotation2D(0.4), Rotation2D(0.3)
    lhs2 = apply(compose(r1, r2), q)
    rhs2 = apply(r1, apply(r2, q))
    # compare on an inscribed disk: outside it the two paths zero-fill
    # different exterior wedges, inside it only interpolation error remains
    disk = gg.radii() <= 4.0
    assert np.max(np.abs(lhs2.values - rhs2.values)[disk]) < 5e-3


def test_identity_and_inverse_round_trip():
    g = Grid.line(-10.0, 10.0, 201)
    p = smooth_1d(g)
    assert sup_distance(apply(Translation(0.0), p), p) == 0.0
    h = g.spacing[0]
    back = apply(inverse(Translation(5 * h)), apply(Translation(5 * h), p))
    # exact grid shifts: inverse restores the interior exactly
    assert np.array_equal(back.values[5:-5], p.values[5:-5])


def test_dimension_mismatch():
    g = Grid.line(-1.0, 1.0, 11)
    p = Profile(g, np.zeros(11))
    with pytest.raises(DimensionMismatch):
        apply(Rotation2D(0.3), p)
    b = Grid.box(-1.0, 1.0, 11)
    q = Profile(b, np.zeros((11, 11)))
    with pytest.raises(DimensionMismatch):
        apply(Translation(0.5), q)
