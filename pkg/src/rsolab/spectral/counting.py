"""Per-cell Neumann counting behind the bound ``N(E) <= sum_n N_{n,N}(E)``."""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ..errors import ThresholdDegeneracyError
from ..lattice import Box, Grid
from ..operator import assemble, assemble_cell_neumann
from .inertia import inertia_count

DEGENERACY_TOL = 1e-9


def neumann_cell_count_closed_form(v: float, eps: float, d: int) -> int:
    """``#{k in Z_{>=0}^d : pi^2 |k|^2 + v < -eps}``.

    These are the eigenvalues of ``-Delta + v`` on the unit cube with
    Neumann boundary condition.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    budget = -eps - v
    if budget < -DEGENERACY_TOL:
        return 0
    kmax = int(math.floor(math.sqrt(max(budget, 0.0)) / math.pi)) + 1
    count = 0
    for k in itertools.product(range(kmax + 1), repeat=d):
        level = math.pi**2 * sum(ki * ki for ki in k) + v
        if abs(level + eps) < DEGENERACY_TOL:
            raise ThresholdDegeneracyError(
                f"Neumann level {level!r} for k={k} coincides with -eps={-eps!r}; perturb eps"
            )
        if level < -eps:
            count += 1
    return count


@lru_cache(maxsize=4096)
def discrete_neumann_count(v: float, eps: float, d: int, M: int) -> int:
    """Negative-eigenvalue count of one discrete Neumann cell block below ``-eps``."""
    if v >= -eps:
        # graph Laplacian is positive semidefinite
        return 0
    return inertia_count(assemble_cell_neumann(v, d, Grid(M)), -eps).count


class CountingBound(NamedTuple):
    lhs: int
    rhs: int
    continuum: int


def counting_upper_bound(field, box: Box, grid: Grid, eps: float) -> CountingBound:
    """Dirichlet count below ``-eps`` and the per-cell Neumann sum that dominates it."""
    sub = field.restrict(box)
    values = sub.values.ravel()
    continuum = sum(neumann_cell_count_closed_form(float(v), eps, box.d) for v in values if v < -eps + DEGENERACY_TOL)
    rhs = sum(discrete_neumann_count(float(v), float(eps), box.d, grid.M) for v in values if v < -eps)
    lhs = inertia_count(assemble(field, box, grid), -eps).count
    return CountingBound(int(lhs), int(rhs), int(continuum))


def neumann_levels(v: float, d: int, grid: Grid) -> np.ndarray:
    """Closed-form spectrum of the discrete cell block (for diagnostics)."""
    M, h = grid.M, grid.h
    one = (2.0 / h**2) * (1.0 - np.cos(np.pi * np.arange(M) / M))
    mesh = np.meshgrid(*([one] * d), indexing="ij")
    return np.sort(sum(m.ravel() for m in mesh) + v)
