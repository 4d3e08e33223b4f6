"""Ground-state curve of the single-well family ``-Delta + lam * chi_[0,1)^d``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from ..errors import PreconditionError
from ..lattice import Box, Grid, GridLayout
from ..operator import assemble_single_well
from ..spectral import lanczos_smallest

WELL_TOL = 1e-12


@dataclass(frozen=True)
class WellCurvePoint:
    lam: float
    energy: float
    state: np.ndarray = field(repr=False)
    occupation: float

    @property
    def bound(self) -> bool:
        """``lam < E < 0``: the well binds below the free spectrum."""
        return self.lam < self.energy < 0.0


def _ground(lam: float, box: Box, grid: Grid, k: int = 1, tol: float = WELL_TOL):
    op = assemble_single_well(lam, box, grid)
    return op, lanczos_smallest(op, k, tol=tol, seed=0)


def occupation(psi, box: Box, grid: Grid) -> float:
    """``<psi, chi_[0,1)^d psi>`` for a normalized ``psi``."""
    mask = GridLayout(box, grid).unit_cell_mask()
    return float(np.sum(psi[mask] ** 2))


def single_well_ground_curve(lambdas, box: Box, grid: Grid, tol: float = WELL_TOL) -> list[WellCurvePoint]:
    """Ground energy, state and well occupation for each (negative) depth."""
    lambdas = [float(x) for x in lambdas]
    if any(not lam < 0 for lam in lambdas):
        raise PreconditionError("single-well depths must all be negative")
    points = []
    for lam in lambdas:
        _, res = _ground(lam, box, grid, tol=tol)
        psi = res.eigenvectors[:, 0]
        if psi.sum() < 0:
            psi = -psi
        points.append(WellCurvePoint(lam, float(res.eigenvalues[0]), psi, occupation(psi, box, grid)))
    return points


def is_monotone(points, strict: bool = True) -> bool:
    ordered = sorted(points, key=lambda p: p.lam)
    diffs = np.diff([p.energy for p in ordered])
    return bool(np.all(diffs > 0) if strict else np.all(diffs >= 0))


class HellmannFeynman(NamedTuple):
    derivative: float
    occupation: float
    discrepancy: float


def hellmann_feynman_check(lam: float, dlam: float, box: Box, grid: Grid, tol: float = WELL_TOL) -> HellmannFeynman:
    """Central difference of ``E(lam)`` against the well occupation of the ground state.

    ``discrepancy`` is relative to the occupation.
    """
    if not (lam + dlam < 0 and lam - dlam < 0 and dlam > 0):
        raise PreconditionError(f"need dlam > 0 and lam +/- dlam < 0, got lam={lam}, dlam={dlam}")
    op, res = _ground(lam, box, grid, k=2, tol=tol)
    gap = float(res.eigenvalues[1] - res.eigenvalues[0])
    if gap < 100 * tol * (abs(res.eigenvalues[0]) + op.norm_inf):
        raise PreconditionError(f"ground state is (nearly) degenerate, gap {gap:.3g}")
    occ = occupation(res.eigenvectors[:, 0], box, grid)
    e_plus = _ground(lam + dlam, box, grid, tol=tol)[1].eigenvalues[0]
    e_minus = _ground(lam - dlam, box, grid, tol=tol)[1].eigenvalues[0]
    deriv = float((e_plus - e_minus) / (2.0 * dlam))
    if not 0.0 < occ <= 1.0 + 1e-12:
        raise PreconditionError(f"occupation {occ} outside (0, 1]")
    return HellmannFeynman(deriv, occ, abs(deriv - occ) / occ)


def finite_well_ground_energy(lam: float) -> float:
    """Continuum ground energy of ``-d^2/dx^2 + lam * chi_[0,1)`` on the line.

    Even-state matching ``q tan(q/2) = kappa`` with ``q^2 + kappa^2 = -lam``,
    solved by bracketing; returns ``-kappa^2``.
    """
    if not lam < 0:
        raise PreconditionError("finite well needs lam < 0")
    depth = -lam
    top = math.sqrt(depth)

    def mismatch(kappa):
        q = math.sqrt(depth - kappa * kappa)
        return q * math.tan(q / 2.0) - kappa

    # q/2 < pi/2 on the ground branch, so kappa > sqrt(depth - pi^2) when depth > pi^2
    lo = math.sqrt(max(depth - math.pi**2, 0.0)) + 1e-12
    kappa = brentq(mismatch, lo, top * (1 - 1e-15), xtol=1e-15)
    return -kappa * kappa


def finite_well_decay(lam: float) -> float:
    """Exterior decay rate ``kappa`` of the continuum ground state."""
    return math.sqrt(-finite_well_ground_energy(lam))
