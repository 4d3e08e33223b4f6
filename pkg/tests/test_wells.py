import math

import numpy as np
import pytest

from rsolab.analysis import (
    finite_well_ground_energy,
    hellmann_feynman_check,
    is_monotone,
    single_well_ground_curve,
)
from rsolab.analysis.wells import WellCurvePoint
from rsolab.errors import PreconditionError
from rsolab.lattice import Box, Grid

LADDER = [-50.0, -20.0, -10.0, -5.0, -2.0, -0.5]
BOX, GRID = Box.centered(1, 40), Grid(20)


def _bisect_well(lam):
    """Independent oracle: plain bisection on the even-state matching condition."""
    depth = -lam

    def g(kappa):
        q = math.sqrt(depth - kappa * kappa)
        return q * math.sin(q / 2) - kappa * math.cos(q / 2)

    lo, hi = math.sqrt(max(depth - math.pi**2, 0.0)) + 1e-12, math.sqrt(depth) - 1e-15
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(lo) * g(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return -(0.5 * (lo + hi)) ** 2


@pytest.mark.parametrize("lam", [-0.5, -5.0, -50.0])
def test_transcendental_oracles_agree(lam):
    assert finite_well_ground_energy(lam) == pytest.approx(_bisect_well(lam), rel=1e-10)


def test_curve_inequality_and_monotonicity():
    points = single_well_ground_curve(LADDER, BOX, GRID)
    assert all(p.bound for p in points)
    assert all(0 < p.occupation <= 1 for p in points)
    assert is_monotone(points)
    e5 = next(p.energy for p in points if p.lam == -5.0)
    assert e5 == pytest.approx(_bisect_well(-5.0), abs=2e-2)
    assert e5 == pytest.approx(-2.51, abs=2e-2)


def test_curve_rejects_nonnegative_depth():
    with pytest.raises(PreconditionError):
        single_well_ground_curve([-1.0, 0.0], BOX, GRID)


def test_shallow_three_dimensional_well_is_only_flagged():
    (p,) = single_well_ground_curve([-0.1], Box.centered(3, 8), Grid(2))
    assert isinstance(p.bound, bool)


def test_is_monotone_on_synthetic_points():
    pts = [WellCurvePoint(l, e, np.zeros(1), 0.5) for l, e in [(-3, -2.0), (-2, -1.0), (-1, -1.0)]]
    assert not is_monotone(pts) and is_monotone(pts, strict=False)


def test_hellmann_feynman_discrepancy_and_determinism():
    a = hellmann_feynman_check(-5.0, 1e-3, BOX, GRID)
    assert a.discrepancy <= 1e-3
    assert a == hellmann_feynman_check(-5.0, 1e-3, BOX, GRID)


def test_hellmann_feynman_discrepancy_shrinks_with_step():
    coarse = hellmann_feynman_check(-5.0, 1e-1, BOX, GRID).discrepancy
    fine = hellmann_feynman_check(-5.0, 1e-2, BOX, GRID).discrepancy
    # O(dlam^2): a tenfold smaller step cuts the error by about a hundred
    assert fine < coarse / 30


def test_deep_well_occupation_against_closed_form():
    hf = hellmann_feynman_check(-50.0, 1e-3, BOX, GRID)
    assert hf.occupation >= 0.9
    # continuum even state: cos(q(x - 1/2)) inside, matched exponential tails outside
    kappa = math.sqrt(-finite_well_ground_energy(-50.0))
    q = math.sqrt(50.0 - kappa**2)
    inside = 0.5 + math.sin(q) / (2 * q)
    outside = 2 * math.cos(q / 2) ** 2 / (2 * kappa)
    assert hf.occupation == pytest.approx(inside / (inside + outside), abs=5e-3)


def test_hellmann_feynman_preconditions():
    with pytest.raises(PreconditionError):
        hellmann_feynman_check(-0.5, 1.0, BOX, GRID)
