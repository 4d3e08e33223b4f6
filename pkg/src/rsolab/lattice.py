"""Boxes of lattice cells and the finite-difference grids laid over them.

A box ``Box(center, L)`` is the half-open cube ``center + (-L/2, L/2]^d``.
With ``L`` even it is tiled exactly by the unit cells ``n + (0, 1]^d`` for
``n`` in ``center - L/2 .. center + L/2 - 1`` along every axis.

A grid with ``M`` points per unit length places vertices at
``center - L/2 + i/M`` and keeps the interior ones, ``i = 1 .. M*L - 1``;
the two boundary vertices of each axis carry the Dirichlet condition and
are eliminated.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import PreconditionError, SizeError

MAX_GRID_POINTS = 5_000_000


@dataclass(frozen=True)
class Box:
    center: tuple[int, ...]
    L: int

    def __post_init__(self):
        center = tuple(int(c) for c in np.atleast_1d(self.center))
        object.__setattr__(self, "center", center)
        if not 1 <= len(center) <= 3:
            raise PreconditionError(f"box dimension must be 1, 2 or 3, got {len(center)}")
        if int(self.L) != self.L or self.L < 2 or self.L % 2:
            raise PreconditionError(f"box side L must be an even integer >= 2, got {self.L}")
        object.__setattr__(self, "L", int(self.L))

    @classmethod
    def centered(cls, d: int, L: int) -> "Box":
        return cls((0,) * d, L)

    @property
    def d(self) -> int:
        return len(self.center)

    @property
    def site_lo(self) -> np.ndarray:
        """Smallest site index along each axis."""
        return np.asarray(self.center) - self.L // 2

    @property
    def site_hi(self) -> np.ndarray:
        """Largest site index along each axis (inclusive)."""
        return np.asarray(self.center) + self.L // 2 - 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.L,) * self.d

    def site_axes(self) -> list[np.ndarray]:
        return [np.arange(lo, lo + self.L) for lo in self.site_lo]

    def sites(self) -> np.ndarray:
        """All sites as an ``(L**d, d)`` integer array in C order."""
        mesh = np.meshgrid(*self.site_axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def contains_box(self, other: "Box") -> bool:
        return bool(
            other.d == self.d
            and np.all(other.site_lo >= self.site_lo)
            and np.all(other.site_hi <= self.site_hi)
        )

    def contains_site(self, n) -> bool:
        n = np.asarray(n)
        return bool(np.all(n >= self.site_lo) and np.all(n <= self.site_hi))


@dataclass(frozen=True)
class Grid:
    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise PreconditionError(f"points per unit M must be a positive integer, got {self.M}")
        object.__setattr__(self, "M", int(self.M))

    @property
    def h(self) -> float:
        return 1.0 / self.M


@dataclass(frozen=True)
class GridLayout:
    """Interior vertices of ``grid`` over ``box`` in lexicographic (C) order."""

    box: Box
    grid: Grid

    def __post_init__(self):
        total = self.points_per_axis ** self.box.d
        if self.points_per_axis < 1 or total > MAX_GRID_POINTS:
            raise SizeError(
                f"grid with M={self.grid.M} on box L={self.box.L}, d={self.box.d} "
                f"has {total} points (limit {MAX_GRID_POINTS})"
            )

    @property
    def points_per_axis(self) -> int:
        return self.grid.M * self.box.L - 1

    @property
    def dimension(self) -> int:
        return self.points_per_axis ** self.box.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.box.d

    def scaled_axis(self, axis: int) -> np.ndarray:
        """Integer coordinates ``M * x`` of the vertices along one axis (exact)."""
        start = (self.box.center[axis] - self.box.L // 2) * self.grid.M
        return start + np.arange(1, self.points_per_axis + 1)

    def axis(self, axis: int) -> np.ndarray:
        return self.scaled_axis(axis) / self.grid.M

    def cell_axis(self, axis: int) -> np.ndarray:
        """Site index ``ceil(x) - 1`` of the cell ``n + (0,1]`` holding each vertex."""
        return -((-self.scaled_axis(axis)) // self.grid.M) - 1

    @cached_property
    def coordinates(self) -> np.ndarray:
        """Vertex coordinates, shape ``(dimension, d)``."""
        mesh = np.meshgrid(*[self.axis(a) for a in range(self.box.d)], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @cached_property
    def scaled_coordinates(self) -> np.ndarray:
        """Exact integer coordinates ``M * x``, shape ``(dimension, d)``."""
        mesh = np.meshgrid(*[self.scaled_axis(a) for a in range(self.box.d)], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @cached_property
    def cells(self) -> np.ndarray:
        """Cell site of every vertex, shape ``(dimension, d)``."""
        mesh = np.meshgrid(*[self.cell_axis(a) for a in range(self.box.d)], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def unit_cell_mask(self) -> np.ndarray:
        """Vertices inside ``[0, 1)^d`` (the single-well support)."""
        masks = []
        for a in range(self.box.d):
            s = self.scaled_axis(a)
            masks.append((s >= 0) & (s < self.grid.M))
        mesh = np.meshgrid(*masks, indexing="ij")
        return np.logical_and.reduce([m.ravel() for m in mesh])
