import numpy as np
import pytest

from rsolab.errors import PreconditionError, SizeError
from rsolab.lattice import Box, Grid, GridLayout


def test_box_sites_tile_half_open_cube():
    box = Box((2, -1), 4)
    assert box.site_lo.tolist() == [0, -3]
    assert box.site_hi.tolist() == [3, 0]
    sites = box.sites()
    assert sites.shape == (16, 2)
    assert sites[0].tolist() == [0, -3] and sites[1].tolist() == [0, -2]


@pytest.mark.parametrize("L", [0, 3, -2, 2.5])
def test_box_rejects_odd_or_small_sides(L):
    with pytest.raises(PreconditionError):
        Box((0,), L)


def test_box_rejects_dimension_four():
    with pytest.raises(PreconditionError):
        Box((0, 0, 0, 0), 2)


def test_containment():
    assert Box.centered(2, 20).contains_box(Box.centered(2, 10))
    assert not Box.centered(2, 10).contains_box(Box((5, 0), 10))
    assert Box.centered(1, 4).contains_site([-2]) and not Box.centered(1, 4).contains_site([2])


def test_grid_requires_positive_integer():
    with pytest.raises(PreconditionError):
        Grid(0)
    assert Grid(4).h == 0.25


def test_layout_interior_points_and_cells():
    lay = GridLayout(Box.centered(1, 2), Grid(2))
    # vertices at -0.5, 0, 0.5; cells ceil(x) - 1
    assert lay.points_per_axis == 3
    np.testing.assert_array_equal(lay.axis(0), [-0.5, 0.0, 0.5])
    np.testing.assert_array_equal(lay.cell_axis(0), [-1, -1, 0])
    np.testing.assert_array_equal(lay.unit_cell_mask(), [False, True, True])


def test_layout_scaled_coordinates_are_exact_integers():
    lay = GridLayout(Box((1, 0), 4), Grid(3))
    np.testing.assert_array_equal(lay.scaled_coordinates / 3, lay.coordinates)
    assert lay.cells.shape == (lay.dimension, 2)


def test_layout_size_guard():
    with pytest.raises(SizeError):
        GridLayout(Box.centered(3, 200), Grid(8))
