"""Distance to the spectrum and boundary-layer norms of the finite-volume resolvent."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import ConvergenceError, PreconditionError
from .dense import dense_eig
from .inertia import PIVOT_RTOL, inertia_count, shifted_norm_inf


def window_count(op, E: float, eta: float) -> int:
    """Eigenvalues in ``[E - eta, E + eta)``."""
    return inertia_count(op, E + eta).count - inertia_count(op, E - eta).count


REFINE_STEPS = 8
REFINE_ROUNDS = 4


def _nearest_eigenvalue(op, shift: float, tol: float):
    """Rayleigh quotient and residual after inverse iteration at ``shift``, or ``None``."""
    A = op.matrix.tocsc()
    eye = sp.identity(op.dimension, format="csc")
    scale = max(op.norm_inf, 1.0)
    for attempt in range(3):
        try:
            lu = spla.splu((A - (shift + attempt * 1e-14 * scale) * eye).tocsc())
            break
        except RuntimeError:
            continue
    else:
        return None
    x = np.random.default_rng(0).standard_normal(op.dimension)
    x /= np.linalg.norm(x)
    theta, res = shift, np.inf
    for _ in range(REFINE_STEPS):
        y = lu.solve(x)
        if not np.all(np.isfinite(y)):
            return None
        x = y / np.linalg.norm(y)
        Ax = A @ x
        theta = float(x @ Ax)
        res = float(np.linalg.norm(Ax - theta * x))
        if res <= 1e-3 * tol:
            break
    return theta, res


def spectral_distance(op, E: float, tol: float = 1e-10) -> float:
    """``dist(sigma(op), E)`` to within ``tol``.

    Bisection on window counts brackets the distance; inverse iteration at
    ``E - d`` and ``E + d`` then pins the nearest eigenvalue, which removes the
    fuzz that pivot jitter leaves in counts taken right at an eigenvalue.
    """
    if not tol > 0:
        raise PreconditionError("spectral_distance needs tol > 0")
    lo, hi = 0.0, tol
    while window_count(op, E, hi) == 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise PreconditionError("operator has no spectrum to measure a distance to")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:  # tol below one ulp
            break
        if window_count(op, E, mid) > 0:
            hi = mid
        else:
            lo = mid
    mid = 0.5 * (lo + hi)
    # counts are only trustworthy outside the jitter band around each eigenvalue
    slack = tol + 100.0 * PIVOT_RTOL * shifted_norm_inf(op, E)
    best = None
    for shift in (E - mid, E + mid):
        found = _nearest_eigenvalue(op, shift, tol)
        if found is None or found[1] > tol:
            continue
        gap = abs(found[0] - E)
        if lo - slack <= gap <= hi + slack and (best is None or gap < best):
            best = gap
    return mid if best is None else best


def boundary_layer_mask(layout) -> np.ndarray:
    """Vertices within one grid spacing of the box boundary."""
    n_ax = layout.points_per_axis
    idx = np.arange(1, n_ax + 1)
    near = (idx <= 1) | (idx >= n_ax)
    mesh = np.meshgrid(*([near] * layout.box.d), indexing="ij")
    return np.logical_or.reduce([m.ravel() for m in mesh])


def inner_region_mask(layout) -> np.ndarray:
    """Vertices in the concentric cube of one third the side, ``c + (-L/6, L/6]^d``."""
    M, L = layout.grid.M, layout.box.L
    masks = []
    for a in range(layout.box.d):
        rel6 = 6 * (layout.scaled_axis(a) - layout.box.center[a] * M)
        masks.append((rel6 > -M * L) & (rel6 <= M * L))
    mesh = np.meshgrid(*masks, indexing="ij")
    return np.logical_and.reduce([m.ravel() for m in mesh])


def _make_solver(op, E: float, tol: float):
    """Krylov solver for ``(H - E) x = b`` to relative residual ``tol``."""
    shifted = (op.matrix - E * sp.identity(op.dimension, format="csr")).tocsr()
    definite = inertia_count(op, E).count == 0
    method = spla.cg if definite else spla.minres
    name = "cg" if definite else "minres"
    maxiter = 20 * op.dimension

    def solve(b):
        nb = np.linalg.norm(b)
        if nb == 0.0:
            return np.zeros_like(b)
        x = np.zeros_like(b)
        r = b
        # a few rounds of refinement on the true residual: the Krylov stopping test
        # uses a recurrence estimate that drifts on indefinite systems
        for _ in range(REFINE_ROUNDS):
            # scipy scales its stopping test differently from the true relative residual, so ask for more
            inner = max(0.01 * min(0.1, tol * nb / np.linalg.norm(r)), 1e-15)
            dx, info = method(shifted, r, rtol=inner, maxiter=maxiter)
            x = x + dx
            r = b - shifted @ x
            if np.linalg.norm(r) <= tol * nb:
                return x
        raise ConvergenceError(
            f"{name} did not reach relative residual {tol} (last {np.linalg.norm(r) / nb:.3g}, info={info})"
        )

    return solve, name


def greens_boundary_norm(op, E: float, tol: float = 1e-10, seed: int = 0, max_iter: int = 500) -> float:
    """``|| chi_boundary (H - E)^-1 chi_inner ||`` by power iteration on ``G^* G``."""
    if op.layout is None:
        raise PreconditionError("greens_boundary_norm needs an operator assembled on a box")
    dist = spectral_distance(op, E, tol)
    if dist <= 10 * tol:
        raise PreconditionError(f"E={E} is within {dist:.3g} of the spectrum (need > {10 * tol:g})")
    boundary = boundary_layer_mask(op.layout)
    inner = inner_region_mask(op.layout)
    if not boundary.any() or not inner.any():
        raise PreconditionError("empty boundary layer or inner region")
    # relative residuals below ~eps * cond(H - E) are out of reach in double precision
    floor = 100.0 * np.finfo(float).eps * shifted_norm_inf(op, E) / dist
    solve, _ = _make_solver(op, E, max(tol, floor))

    rng = np.random.default_rng(seed)
    x = np.where(inner, rng.standard_normal(op.dimension), 0.0)
    x /= np.linalg.norm(x)
    estimate = 0.0
    for _ in range(max_iter):
        gx = np.where(boundary, solve(x), 0.0)
        new = float(np.linalg.norm(gx))
        if new == 0.0:
            return 0.0
        x = np.where(inner, solve(gx), 0.0)
        x /= np.linalg.norm(x)
        if abs(new - estimate) <= 1e-9 * new:
            return new
        estimate = new
    raise ConvergenceError(f"power iteration for the boundary resolvent norm stalled at {estimate:.6g}")


def greens_boundary_norm_dense(op, E: float) -> float:
    """Dense cross-check: spectral norm of the same resolvent block from a full eigendecomposition."""
    res = dense_eig(op, want_vectors=True)
    Z = res.eigenvectors
    R = (Z / (res.eigenvalues - E)) @ Z.T
    boundary = boundary_layer_mask(op.layout)
    inner = inner_region_mask(op.layout)
    block = R[np.ix_(boundary, inner)]
    return float(np.linalg.svd(block, compute_uv=False)[0])
