"""Compact/abelian group actions on profiles.

Both actions resample through interpolation with nonnegative weights, so they
preserve the pointwise order exactly, not merely up to discretisation error.
Translations use linear interpolation with constant extension beyond the
domain edges; rotations use bilinear interpolation with zero fill outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, GroupMismatch
from .profiles import Grid, Profile

TWO_PI = 2.0 * math.pi
_SNAP = 1e-12


@dataclass(frozen=True)
class Translation:
    """1-D shift u(.) -> u(. - sigma)."""

    sigma: float

    dimension = 1


@dataclass(frozen=True)
class Rotation2D:
    """2-D rotation (g u)(x) = u(R_{-theta} x), angle normalised to [0, 2 pi)."""

    angle: float

    dimension = 2

    def __post_init__(self):
        object.__setattr__(self, "angle", float(self.angle) % TWO_PI)


GroupElement = Translation | Rotation2D


def compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """Group product, g1 after g2."""
    if isinstance(g1, Translation) and isinstance(g2, Translation):
        return Translation(g1.sigma + g2.sigma)
    if isinstance(g1, Rotation2D) and isinstance(g2, Rotation2D):
        return Rotation2D(g1.angle + g2.angle)
    raise GroupMismatch(f"cannot compose {type(g1).__name__} with {type(g2).__name__}")


def inverse(g: GroupElement) -> GroupElement:
    if isinstance(g, Translation):
        return Translation(-g.sigma)
    if isinstance(g, Rotation2D):
        return Rotation2D(-g.angle)
    raise GroupMismatch(f"unknown group element {type(g).__name__}")


def identity_like(g: GroupElement) -> GroupElement:
    return Translation(0.0) if isinstance(g, Translation) else Rotation2D(0.0)


def _apply_translation(g: Translation, p: Profile) -> np.ndarray:
    (xs,) = p.grid.axes()
    h = p.grid.spacing[0]
    k = g.sigma / h
    k_round = np.rint(k)
    if abs(k - k_round) <= _SNAP * max(1.0, abs(k)):
        # exact grid shift: index roll with edge repetition, no interpolation
        k_int = int(k_round)
        n = xs.size
        idx = np.clip(np.arange(n) - k_int, 0, n - 1)
        return p.values[idx]
    return np.interp(xs - g.sigma, xs, p.values)


def _apply_rotation(g: Rotation2D, p: Profile) -> np.ndarray:
    grid = p.grid
    quarter = g.angle / (0.5 * math.pi)
    q_round = np.rint(quarter)
    if (
        abs(quarter - q_round) <= 1e-12
        and grid.is_origin_symmetric()
        and grid.extents[0] == grid.extents[1]
        and grid.counts[0] == grid.counts[1]
    ):
        # quarter turns on a symmetric square grid are exact index permutations;
        # with axis 0 = x, out[i, j] = u(R_{-pi/2}(x_i, y_j)) = v[j, n-1-i] = rot90(v, 1)
        return np.rot90(p.values, k=int(q_round) % 4).copy()
    xx, yy = grid.meshgrid()
    c, s = math.cos(g.angle), math.sin(g.angle)
    # sample u at R_{-theta} x
    xq = c * xx + s * yy
    yq = -s * xx + c * yy
    (x0, _), (y0, _) = grid.extents
    hx, hy = grid.spacing
    nx, ny = grid.counts
    fx = (xq - x0) / hx
    fy = (yq - y0) / hy
    inside = (fx >= 0) & (fx <= nx - 1) & (fy >= 0) & (fy <= ny - 1)
    fx = np.clip(fx, 0, nx - 1)
    fy = np.clip(fy, 0, ny - 1)
    ix = np.minimum(fx.astype(int), nx - 2)
    iy = np.minimum(fy.astype(int), ny - 2)
    wx = fx - ix
    wy = fy - iy
    v = p.values
    out = (
        (1 - wx) * (1 - wy) * v[ix, iy]
        + wx * (1 - wy) * v[ix + 1, iy]
        + (1 - wx) * wy * v[ix, iy + 1]
        + wx * wy * v[ix + 1, iy + 1]
    )
    out[~inside] = 0.0
    return out


def apply(g: GroupElement, p: Profile) -> Profile:
    """Act on a profile. Nonnegative interpolation weights make this exactly
    order-preserving: u <= v implies g u <= g v with tol = 0."""
    if g.dimension != p.grid.dimension:
        raise DimensionMismatch(
            f"{type(g).__name__} acts on {g.dimension}-D profiles, "
            f"got {p.grid.dimension}-D"
        )
    if isinstance(g, Translation):
        return Profile(p.grid, _apply_translation(g, p))
    if isinstance(g, Rotation2D):
        return Profile(p.grid, _apply_rotation(g, p))
    raise GroupMismatch(f"unknown group element {type(g).__name__}")
