"""Eigenvalue machinery: dense oracle, Lanczos, inertia counting and resolvent probes."""
from .counting import (
    CountingBound,
    counting_upper_bound,
    discrete_neumann_count,
    neumann_cell_count_closed_form,
)
from .dense import DENSE_GUARD, dense_eig, eigh_dense
from .inertia import dense_count, inertia_count
from .lanczos import lanczos_smallest, polish_eigenpairs
from .resolvent import (
    greens_boundary_norm,
    greens_boundary_norm_dense,
    spectral_distance,
    window_count,
)
from .types import CountingResult, SpectralResult

__all__ = [
    "CountingBound",
    "CountingResult",
    "DENSE_GUARD",
    "SpectralResult",
    "counting_upper_bound",
    "dense_count",
    "dense_eig",
    "discrete_neumann_count",
    "eigh_dense",
    "greens_boundary_norm",
    "greens_boundary_norm_dense",
    "inertia_count",
    "lanczos_smallest",
    "neumann_cell_count_closed_form",
    "polish_eigenpairs",
    "spectral_distance",
    "window_count",
]
