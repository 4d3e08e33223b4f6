"""Approximate eigenfunctions built from a plane wave under a widening smooth bump."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from ..errors import PreconditionError
from ..lattice import Box, Grid, GridLayout
from ..operator import apply, assemble, assemble_constant

RESOLUTION_LIMIT = 0.05


def bump(rho):
    """``exp(-1 / (1 - rho^2))`` for ``rho < 1`` and zero outside (unnormalized)."""
    rho = np.asarray(rho, dtype=float)
    out = np.zeros_like(rho)
    inside = rho < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - rho[inside] ** 2))
    return out


@lru_cache(maxsize=None)
def bump_norm(d: int) -> float:
    """Continuum ``L^2`` norm of the radial bump in dimension ``d``."""
    sphere = 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)
    val, _ = quad(lambda t: math.exp(-2.0 / (1.0 - t * t)) * t ** (d - 1), 0.0, 1.0, epsabs=1e-15)
    return math.sqrt(sphere * val)


@dataclass(frozen=True)
class WeylPacket:
    energy: float
    k: tuple[float, ...]
    r: float
    center: tuple[int, ...]

    def __post_init__(self):
        k = tuple(float(x) for x in np.atleast_1d(self.k))
        object.__setattr__(self, "k", k)
        if self.energy < 0:
            raise PreconditionError(f"packet energy must be >= 0, got {self.energy}")
        if abs(sum(x * x for x in k) - self.energy) > 1e-10:
            raise PreconditionError(f"|k|^2 = {sum(x * x for x in k)!r} differs from E = {self.energy!r}")
        if not self.r > 0:
            raise PreconditionError(f"scale r must be positive, got {self.r}")
        if len(self.center) != len(k):
            raise PreconditionError("center and k must have the same dimension")

    @property
    def d(self) -> int:
        return len(self.k)

    def box(self) -> Box:
        """Smallest even-sided box around ``center`` with side ``>= 2r + 2``."""
        L = int(math.ceil(2 * self.r + 2))
        return Box(self.center, L + (L % 2))

    def values(self, layout: GridLayout) -> np.ndarray:
        """``r^{-d/2} e^{i k.(x-c)} f(|x-c|/r)`` at the vertices, with ``f`` of unit norm."""
        rel = layout.coordinates - np.asarray(self.center, dtype=float)
        rho = np.linalg.norm(rel, axis=1) / self.r
        amp = bump(rho) / (bump_norm(self.d) * self.r ** (self.d / 2))
        return amp * np.exp(1j * (rel @ np.asarray(self.k)))


def grid_norm(u, grid: Grid, d: int) -> float:
    """Discrete ``L^2`` norm ``sqrt(h^d sum |u|^2)``."""
    return float(math.sqrt(grid.h**d * np.sum(np.abs(u) ** 2)))


def weyl_residual(E: float, k, r: float, grid: Grid, field=None, center=None) -> float:
    """``|(H - E) phi_r| / |phi_r|`` for the packet at energy ``E``, wave vector ``k`` and scale ``r``.

    Without ``field`` the free discrete Laplacian is used; with one, its
    potential is added on the packet box, which must lie inside the field box.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    d = k.size
    if center is None:
        center = (0,) * d
    packet = WeylPacket(float(E), tuple(k), float(r), tuple(int(c) for c in center))
    if grid.h * max(1.0, math.sqrt(E)) > RESOLUTION_LIMIT:
        raise PreconditionError(
            f"grid too coarse: h * max(1, sqrt(E)) = {grid.h * max(1.0, math.sqrt(E)):.3g} > {RESOLUTION_LIMIT}"
        )
    box = packet.box()
    if field is None:
        op = assemble_constant(0.0, box, grid)
    else:
        if field.box.d != d:
            raise PreconditionError(f"field dimension {field.box.d} does not match k dimension {d}")
        if not field.box.contains_box(box):
            raise PreconditionError(f"packet support box {box} exceeds field box {field.box}")
        op = assemble(field, box, grid)
    phi = packet.values(op.layout)
    resid = apply(op, phi, mode="complex") - E * phi
    return grid_norm(resid, grid, d) / grid_norm(phi, grid, d)


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])
