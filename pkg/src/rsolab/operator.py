"""Finite-difference assembly of the random Schrödinger operator on a box.

All operators use the second-order ``(2d+1)``-point stencil

    (H u)_i = h^-2 (2d u_i - sum of the 2d neighbours) + v(cell(x_i)) u_i

on the interior vertices of a :class:`~rsolab.lattice.GridLayout`, with
exterior neighbours dropped (Dirichlet).  Per-cell Neumann blocks replace the
stencil by the graph Laplacian of the cell's ``M^d`` vertices, so that the
direct sum of the cell blocks lies below the Dirichlet operator as quadratic
forms, exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .disorder import PotentialField
from .errors import PreconditionError
from .lattice import Box, Grid, GridLayout


class BoundaryCondition(Enum):
    DIRICHLET = "dirichlet"
    NEUMANN_BLOCK = "neumann-block"


@dataclass(frozen=True, eq=False)
class AssembledOperator:
    """Immutable sparse symmetric matrix together with its provenance.

    ``potential`` is the diagonal multiplication part evaluated at every
    vertex; ``layout`` is ``None`` for operators built from a raw matrix.
    """

    matrix: sp.csr_matrix = field(repr=False)
    potential: np.ndarray = field(repr=False)
    layout: GridLayout | None = None
    boundary: BoundaryCondition = BoundaryCondition.DIRICHLET
    provenance: str = "matrix"

    @classmethod
    def from_matrix(cls, matrix, provenance: str = "matrix") -> "AssembledOperator":
        m = sp.csr_matrix(matrix, dtype=float)
        if m.shape[0] != m.shape[1]:
            raise PreconditionError(f"operator matrix must be square, got {m.shape}")
        if m.nnz and abs(m - m.T).max() != 0.0:
            raise PreconditionError("operator matrix must be symmetric")
        return cls(m, np.zeros(m.shape[0]), None, BoundaryCondition.DIRICHLET, provenance)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def box(self) -> Box | None:
        return None if self.layout is None else self.layout.box

    @property
    def grid(self) -> Grid | None:
        return None if self.layout is None else self.layout.grid

    @cached_property
    def bandwidth(self) -> int:
        coo = self.matrix.tocoo()
        return int(np.max(np.abs(coo.row - coo.col))) if coo.nnz else 0

    @cached_property
    def norm_inf(self) -> float:
        """Max absolute row sum (equals the 1-norm by symmetry)."""
        return float(np.max(np.asarray(abs(self.matrix).sum(axis=1)))) if self.dimension else 0.0

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    @cached_property
    def _band(self) -> np.ndarray:
        ab = np.zeros((self.bandwidth + 1, self.dimension))
        coo = sp.tril(self.matrix).tocoo()
        ab[coo.row - coo.col, coo.col] = coo.data
        ab.flags.writeable = False
        return ab

    def lower_band(self) -> np.ndarray:
        """LAPACK-style lower band storage ``ab[j, i] = H[i + j, i]`` (read-only view)."""
        return self._band

    @cached_property
    def offdiag_row_abs(self) -> np.ndarray:
        """Per-row sum of absolute off-diagonal entries."""
        row_abs = np.asarray(abs(self.matrix).sum(axis=1)).ravel()
        return row_abs - np.abs(self.matrix.diagonal())

    def triples(self):
        """Upper-triangle entries as ``(i, j, value)`` arrays with ``i <= j``."""
        coo = sp.triu(self.matrix).tocoo()
        order = np.lexsort((coo.col, coo.row))
        return coo.row[order], coo.col[order], coo.data[order]

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def quadratic_form(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return float(u @ (self.matrix @ u))


def apply(op: AssembledOperator, x, mode: str = "real") -> np.ndarray:
    """``H @ x``; ``mode="complex"`` acts on real and imaginary parts separately."""
    x = np.asarray(x)
    if x.shape[0] != op.dimension:
        raise PreconditionError(f"vector length {x.shape[0]} does not match operator dimension {op.dimension}")
    if mode == "real":
        if np.iscomplexobj(x):
            raise PreconditionError("complex vector passed with mode='real'")
        return op.matrix @ x.astype(float, copy=False)
    if mode == "complex":
        x = x.astype(complex, copy=False)
        return (op.matrix @ x.real) + 1j * (op.matrix @ x.imag)
    raise PreconditionError(f"unknown apply mode {mode!r}")


# --------------------------------------------------------------------------
# assembly


def _path_dirichlet(n: int, h: float) -> sp.csr_matrix:
    main = np.full(n, 2.0 / h**2)
    off = np.full(n - 1, -1.0 / h**2)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def _path_graph_laplacian(n: int, h: float) -> sp.csr_matrix:
    deg = np.full(n, 2.0)
    deg[0] = deg[-1] = 1.0
    if n == 1:
        deg[0] = 0.0
    off = np.full(n - 1, -1.0 / h**2)
    return sp.diags([off, deg / h**2, off], [-1, 0, 1], format="csr")


def _kron_sum(one_d: sp.csr_matrix, d: int) -> sp.csr_matrix:
    n = one_d.shape[0]
    eye = sp.identity(n, format="csr")
    total = None
    for axis in range(d):
        factors = [eye] * d
        factors[axis] = one_d
        term = factors[0]
        for f in factors[1:]:
            term = sp.kron(term, f, format="csr")
        total = term if total is None else total + term
    return total.tocsr()


def dirichlet_laplacian(layout: GridLayout) -> sp.csr_matrix:
    """``-Delta_h`` with Dirichlet boundary on the interior vertices of ``layout``."""
    return _kron_sum(_path_dirichlet(layout.points_per_axis, layout.grid.h), layout.box.d)


def _with_potential(kinetic: sp.csr_matrix, potential: np.ndarray) -> sp.csr_matrix:
    out = (kinetic + sp.diags(potential, 0, format="csr")).tocsr()
    out.sort_indices()
    return out


def assemble(field: PotentialField, box: Box, grid: Grid) -> AssembledOperator:
    """Dirichlet restriction of ``-Delta + V`` to ``box`` on ``grid``."""
    if not field.box.contains_box(box):
        raise PreconditionError(f"field box {field.box} does not cover operator box {box}")
    layout = GridLayout(box, grid)
    potential = field.lookup(layout.cells)
    matrix = _with_potential(dirichlet_laplacian(layout), potential)
    tag = f"field(seed={field.seed})" if field.seed is not None else "field(hand-built)"
    return AssembledOperator(matrix, potential, layout, BoundaryCondition.DIRICHLET, tag)


def assemble_constant(value: float, box: Box, grid: Grid) -> AssembledOperator:
    layout = GridLayout(box, grid)
    potential = np.full(layout.dimension, float(value))
    matrix = _with_potential(dirichlet_laplacian(layout), potential)
    return AssembledOperator(matrix, potential, layout, BoundaryCondition.DIRICHLET, f"constant({value})")


def assemble_single_well(lam: float, box: Box, grid: Grid) -> AssembledOperator:
    """``-Delta + lam * chi_[0,1)^d`` on ``box`` with Dirichlet walls."""
    margin = box.L / 4
    lo = box.site_lo.astype(float)
    hi = box.site_hi.astype(float) + 1.0
    if np.any(0.0 - lo < margin) or np.any(hi - 1.0 < margin):
        raise PreconditionError(
            f"box {box} must contain [0,1)^d with margin >= L/4 = {margin} on every side"
        )
    layout = GridLayout(box, grid)
    potential = np.where(layout.unit_cell_mask(), float(lam), 0.0)
    matrix = _with_potential(dirichlet_laplacian(layout), potential)
    return AssembledOperator(matrix, potential, layout, BoundaryCondition.DIRICHLET, f"single-well({lam})")


def assemble_cell_neumann(v: float, d: int, grid: Grid) -> AssembledOperator:
    """Graph Laplacian of the ``M^d`` vertices of one unit cell plus ``v``."""
    kinetic = _kron_sum(_path_graph_laplacian(grid.M, grid.h), d)
    potential = np.full(kinetic.shape[0], float(v))
    return AssembledOperator(
        _with_potential(kinetic, potential), potential, None, BoundaryCondition.NEUMANN_BLOCK, f"neumann-cell({v})"
    )


def cell_blocks(op: AssembledOperator) -> dict[tuple[int, ...], np.ndarray]:
    """Vertex indices of ``op`` grouped by the lattice cell that holds them."""
    if op.layout is None:
        raise PreconditionError("operator has no grid layout")
    cells = op.layout.cells
    order = np.lexsort(cells.T[::-1])
    sorted_cells = cells[order]
    breaks = np.flatnonzero(np.any(np.diff(sorted_cells, axis=0) != 0, axis=1)) + 1
    groups = np.split(order, breaks)
    return {tuple(int(c) for c in cells[g[0]]): g for g in groups}


def cell_decomposition_form(op: AssembledOperator, u) -> float:
    """``sum_cells <u|_cell, H_cell,N u|_cell>`` using each cell's actual vertex set."""
    u = np.asarray(u, dtype=float)
    total = 0.0
    for idx in cell_blocks(op).values():
        sub = op.matrix[idx][:, idx]
        off = sub - sp.diags(sub.diagonal())
        deg = -np.asarray(off.sum(axis=1)).ravel()
        block = off + sp.diags(deg) + sp.diags(op.potential[idx])
        ui = u[idx]
        total += float(ui @ (block @ ui))
    return total


def export_triples(op: AssembledOperator, path) -> Path:
    """Write one ``i j value`` line per stored upper-triangle entry."""
    path = Path(path)
    rows, cols, vals = op.triples()
    with path.open("w", encoding="utf-8") as fh:
        for i, j, v in zip(rows, cols, vals):
            fh.write(f"{i} {j} {v:.17g}\n")
    return path


def import_triples(path, dimension: int | None = None) -> AssembledOperator:
    data = np.loadtxt(path, ndmin=2)
    rows = data[:, 0].astype(int)
    cols = data[:, 1].astype(int)
    vals = data[:, 2]
    n = dimension if dimension is not None else int(max(rows.max(), cols.max())) + 1
    upper = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    full = upper + sp.triu(upper, k=1).T
    return AssembledOperator.from_matrix(full, provenance=f"triples({Path(path).name})")
