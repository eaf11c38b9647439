"""Spatial grids and grid profiles with the pointwise partial order.

The order structure is the whole point: leq / wedge / sup_distance make the
set of profiles an ordered metric space, and hausdorff measures set
convergence for omega-limit estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch

EQ_SAME_GRID = "profiles live on different grids"


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid in 1 or 2 dimensions, endpoints included."""

    extents: tuple[tuple[float, float], ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        ext = tuple((float(a), float(b)) for a, b in self.extents)
        cnt = tuple(int(n) for n in self.counts)
        if len(ext) != len(cnt) or len(ext) not in (1, 2):
            raise ValueError("grid must be 1-D or 2-D with matching extents/counts")
        for (a, b), n in zip(ext, cnt):
            if not (b > a):
                raise ValueError("empty extent")
            if n < 3:
                raise ValueError("need at least 3 nodes per axis")
        object.__setattr__(self, "extents", ext)
        object.__setattr__(self, "counts", cnt)

    @classmethod
    def line(cls, x_min: float, x_max: float, n: int) -> "Grid":
        return cls(((x_min, x_max),), (n,))

    @classmethod
    def box(cls, x_min: float, x_max: float, n: int) -> "Grid":
        """Square 2-D box with the same extent and count on both axes."""
        return cls(((x_min, x_max), (x_min, x_max)), (n, n))

    @property
    def dimension(self) -> int:
        return len(self.counts)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(
            (b - a) / (n - 1) for (a, b), n in zip(self.extents, self.counts)
        )

    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(
            np.linspace(a, b, n) for (a, b), n in zip(self.extents, self.counts)
        )

    def shape(self) -> tuple[int, ...]:
        return self.counts

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    def radii(self) -> np.ndarray:
        """Distance of every node from the origin, shaped like the value array."""
        if self.dimension == 1:
            return np.abs(self.axes()[0])
        xx, yy = self.meshgrid()
        return np.hypot(xx, yy)

    def is_origin_symmetric(self, tol: float = 1e-12) -> bool:
        return all(abs(a + b) <= tol for a, b in self.extents)


@dataclass(frozen=True, eq=False)
class Profile:
    """Real-valued field on a grid. Values are finite and read-only."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape():
            raise ValueError(f"values shape {v.shape} != grid shape {self.grid.shape()}")
        if not np.all(np.isfinite(v)):
            raise ValueError("profile values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def with_values(self, values: np.ndarray) -> "Profile":
        return Profile(self.grid, values)


def _same_grid(u: Profile, v: Profile) -> None:
    if u.grid != v.grid:
        raise GridMismatch(EQ_SAME_GRID)


def leq(u: Profile, v: Profile, tol: float = 0.0) -> bool:
    """Pointwise u <= v up to slack tol (tol=0 is the exact partial order)."""
    _same_grid(u, v)
    return bool(np.all(u.values <= v.values + tol))


def wedge(u: Profile, v: Profile) -> Profile:
    """Pointwise minimum, the greatest lower bound in the pointwise order."""
    _same_grid(u, v)
    return Profile(u.grid, np.minimum(u.values, v.values))


def sup_distance(u: Profile, v: Profile) -> float:
    _same_grid(u, v)
    return float(np.max(np.abs(u.values - v.values)))


@dataclass(frozen=True, eq=False)
class ProfileSet:
    """Finite nonempty set of profiles on one shared grid."""

    members: tuple[Profile, ...]

    def __post_init__(self):
        mem = tuple(self.members)
        if not mem:
            raise ValueError("profile set must be nonempty")
        g = mem[0].grid
        for p in mem[1:]:
            if p.grid != g:
                raise GridMismatch(EQ_SAME_GRID)
        object.__setattr__(self, "members", mem)

    @property
    def grid(self) -> Grid:
        return self.members[0].grid

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def hausdorff(a: ProfileSet | list[Profile], b: ProfileSet | list[Profile]) -> float:
    """Hausdorff distance in the sup metric:
    max(sup_{x in A} d(x, B), sup_{y in B} d(y, A))."""
    aa = list(a)
    bb = list(b)
    if not aa or not bb:
        raise ValueError("hausdorff needs nonempty sets")
    d = np.array([[sup_distance(x, y) for y in bb] for x in aa])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
