import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rsolab.analysis import cook_integral_probe, dilation_integral_probe, loglog_slope, shell_sums, weyl_residual
from rsolab.analysis.weyl import WeylPacket, bump_norm, grid_norm
from rsolab.disorder import ModelParams, PotentialField, derive_seeds, realize_field
from rsolab.errors import PreconditionError
from rsolab.lattice import Box, Grid, GridLayout

RADII = [4.0, 8.0, 16.0, 32.0]


def _constant_field(d, L, value):
    box = Box.centered(d, L)
    return PotentialField.from_values(ModelParams(d, 0.0, 1.0), box, np.full((L,) * d, value).ravel())


def test_bump_norm_one_dimension():
    from scipy.integrate import quad

    direct, _ = quad(lambda x: math.exp(-2 / (1 - x * x)), -1, 1, epsabs=1e-15)
    assert bump_norm(1) == pytest.approx(math.sqrt(direct), rel=1e-12)


def test_packet_has_unit_norm_on_fine_grid():
    packet = WeylPacket(1.0, (1.0,), 8.0, (0,))
    grid = Grid(20)
    vals = packet.values(GridLayout(packet.box(), grid))
    assert grid_norm(vals, grid, 1) == pytest.approx(1.0, rel=1e-6)


def test_packet_rejects_off_shell_wave_vector():
    with pytest.raises(PreconditionError):
        WeylPacket(1.0, (0.5,), 4.0, (0,))


def test_coarse_grid_rejected():
    with pytest.raises(PreconditionError, match="coarse"):
        weyl_residual(0.0, [0.0], 4.0, Grid(4))


def test_free_residual_slopes():
    grid = Grid(20)
    s0 = loglog_slope(RADII, [weyl_residual(0.0, [0.0], r, grid) for r in RADII])
    s1 = loglog_slope(RADII, [weyl_residual(1.0, [1.0], r, grid) for r in RADII])
    assert s0 == pytest.approx(-2.0, abs=0.3)
    assert s1 == pytest.approx(-1.0, abs=0.2)


def test_free_residual_slope_two_dimensions():
    radii = [4.0, 8.0, 16.0]
    s = loglog_slope(radii, [weyl_residual(0.0, [0.0, 0.0], r, Grid(20)) for r in radii])
    assert s == pytest.approx(-2.0, abs=0.3)


def test_residual_with_field_obeys_triangle_inequality():
    grid = Grid(20)
    field = realize_field(3, ModelParams(1, 1.0, 1.0), Box.centered(1, 200))
    for r in (4.0, 8.0):
        packet = WeylPacket(1.0, (1.0,), r, (60,))
        vmax = np.max(np.abs(field.restrict(packet.box()).values))
        free = weyl_residual(1.0, [1.0], r, grid, center=(60,))
        with_field = weyl_residual(1.0, [1.0], r, grid, field=field, center=(60,))
        assert with_field <= free + vmax + 1e-12


def test_field_must_contain_packet():
    field = realize_field(0, ModelParams(1, 1.0, 1.0), Box.centered(1, 10))
    with pytest.raises(PreconditionError):
        weyl_residual(0.0, [0.0], 8.0, Grid(20), field=field)


def test_cook_zero_field():
    assert np.all(cook_integral_probe(_constant_field(1, 40, 0.0), 1.0, [5, 10, 19]) == 0)


@settings(max_examples=30, deadline=None)
@given(m=st.floats(0.3, 3.0), R=st.integers(0, 49))
def test_cook_unit_field_closed_form(m, R):
    (value,) = cook_integral_probe(_constant_field(1, 100, 1.0), m, [R])
    expected = 1.0 + sum(2.0 / (1.0 + j) ** (2 * m) for j in range(1, R + 1))
    assert value == pytest.approx(expected, rel=1e-12)


def test_shell_sums_count_sites_in_two_dimensions():
    s = shell_sums(_constant_field(2, 20, 1.0), 5)
    np.testing.assert_array_equal(s, [1] + [8 * j for j in range(1, 6)])


def test_shell_sums_radius_guard():
    with pytest.raises(PreconditionError):
        shell_sums(_constant_field(1, 20, 1.0), 10)


def test_cook_increments_shrink_in_integrable_regime():
    params, radii = ModelParams(1, 2.0, 3.0), [25, 50, 100, 200]
    incs = []
    for seed in derive_seeds(0, np.arange(100)):
        sums = cook_integral_probe(realize_field(int(seed), params, Box.centered(1, 402)), 1.0, radii)
        incs.append(np.diff(sums))
    med = np.median(np.array(incs), axis=0)
    assert np.all(np.diff(med) < 0)


def test_dilation_integral_constant_field():
    res = dilation_integral_probe(_constant_field(1, 402, 1.0), 1.0, 2.0, 100.0)
    # window sum is 2 (floor(2t) - floor(t)) ~ 2t, so the integrand tends to sqrt(2)
    assert res.integrand[-1] == pytest.approx(math.sqrt(2), rel=0.02)
    assert res.cumulative[0] == 0.0 and np.all(np.diff(res.cumulative) >= 0)
    assert res.cumulative[-1] == pytest.approx(math.sqrt(2) * 99, rel=0.05)


def test_dilation_integral_zero_field():
    res = dilation_integral_probe(_constant_field(1, 40, 0.0), 1.0, 2.0, 5.0)
    assert np.all(res.cumulative == 0)


def test_dilation_integral_guards():
    field = _constant_field(1, 40, 1.0)
    with pytest.raises(PreconditionError):
        dilation_integral_probe(field, 2.0, 1.0, 5.0)
    with pytest.raises(PreconditionError):
        dilation_integral_probe(field, 1.0, 2.0, 50.0)
