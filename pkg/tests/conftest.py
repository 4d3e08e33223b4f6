import numpy as np
import pytest
import scipy.sparse as sp

from rsolab.disorder import ModelParams, realize_field
from rsolab.lattice import Box, Grid
from rsolab.operator import AssembledOperator, assemble


def tridiag3() -> AssembledOperator:
    """tridiag(-1, 2, -1) of size 3; eigenvalues 2 - sqrt2, 2, 2 + sqrt2."""
    return AssembledOperator.from_matrix(sp.diags([[-1, -1], [2, 2, 2], [-1, -1]], [-1, 0, 1]))


def random_field_operator(seed: int, d: int = 1, L: int = 10, M: int = 4, alpha: float = 1.0, delta: float = 1.0):
    box = Box.centered(d, L)
    field = realize_field(seed, ModelParams(d, alpha, delta), box)
    return assemble(field, box, Grid(M))


def random_banded(rng, n: int, bandwidth: int) -> AssembledOperator:
    """Random symmetric banded matrix with a spread-out diagonal."""
    diags, offsets = [rng.normal(scale=3.0, size=n)], [0]
    for j in range(1, bandwidth + 1):
        off = rng.normal(size=n - j)
        diags += [off, off]
        offsets += [j, -j]
    return AssembledOperator.from_matrix(sp.diags(diags, offsets))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
