"""Thick-restart Lanczos for the lowest eigenpairs of a sparse symmetric operator."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import ConvergenceError, PreconditionError
from .types import SpectralResult


def _orthogonalize(w, basis):
    # classical Gram-Schmidt, applied twice
    h = basis.T @ w
    w = w - basis @ h
    h2 = basis.T @ w
    return w - basis @ h2, h + h2


def lanczos_smallest(
    op,
    k: int,
    tol: float = 1e-10,
    seed: int = 0,
    ncv: int | None = None,
    max_restarts: int = 1000,
    polish: bool = False,
) -> SpectralResult:
    """The ``k`` smallest eigenpairs of ``op``.

    Full reorthogonalization against the whole basis at every step; on
    restart the ``k + (ncv - k) // 2`` lowest Ritz vectors are kept.  A pair
    is converged when its residual is below ``tol * (|theta| + ||H||_1)``.
    ``polish`` applies one step of shifted inverse iteration to every
    converged vector, which resolves exponentially small components.
    """
    n = op.dimension
    if k < 1 or 4 * k > n:
        raise PreconditionError(f"lanczos_smallest needs 1 <= k <= dimension/4, got k={k}, dimension={n}")
    A = op.matrix
    anorm = op.norm_inf
    m = ncv if ncv is not None else max(2 * k + 20, k + 40)
    m = int(min(max(m, k + 2), n))
    rng = np.random.default_rng(seed)

    V = np.zeros((n, m + 1))
    T = np.zeros((m, m))
    v0 = rng.standard_normal(n)
    V[:, 0] = v0 / np.linalg.norm(v0)
    p = 0
    best = None
    for _ in range(max_restarts + 1):
        for j in range(p, m):
            w = A @ V[:, j]
            w, h = _orthogonalize(w, V[:, : j + 1])
            T[: j + 1, j] = h
            T[j, : j + 1] = h
            beta = np.linalg.norm(w)
            if beta <= 1e-13 * max(anorm, 1.0):
                # invariant subspace: continue with a fresh direction
                w, _ = _orthogonalize(rng.standard_normal(n), V[:, : j + 1])
                w /= np.linalg.norm(w)
                beta = 0.0
            else:
                w /= beta
            V[:, j + 1] = w
            if j + 1 < m:
                T[j + 1, j] = T[j, j + 1] = beta
        theta, S = np.linalg.eigh(T)
        res = np.abs(beta * S[m - 1, :])
        bound = tol * (np.abs(theta[:k]) + anorm)
        if best is None or np.max(res[:k] / bound) < np.max(best / bound):
            best = res[:k].copy()
        if np.all(res[:k] <= bound):
            break
        p = min(m - 1, k + max((m - k) // 2, 1))
        V[:, :p] = V[:, :m] @ S[:, :p]
        V[:, p] = V[:, m]
        T[:] = 0.0
        T[np.arange(p), np.arange(p)] = theta[:p]
    else:
        raise ConvergenceError(
            f"Lanczos did not converge {k} eigenpairs within {max_restarts} restarts", best_residuals=best
        )

    vals = theta[:k].copy()
    vecs = V[:, :m] @ S[:, :k]
    vecs /= np.linalg.norm(vecs, axis=0)
    if polish:
        vals, vecs = polish_eigenpairs(op, vals, vecs)
    residuals = np.linalg.norm(A @ vecs - vecs * vals, axis=0)
    return SpectralResult(vals, vecs, "lanczos", residuals, tol)


def polish_eigenpairs(op, vals, vecs):
    """One shifted inverse-iteration step per pair, then Rayleigh-Ritz on the block."""
    A = op.matrix.tocsc()
    n = op.dimension
    out = np.empty_like(vecs)
    eye = sp.identity(n, format="csc")
    for i, theta in enumerate(vals):
        shift = theta
        for attempt in range(4):
            try:
                lu = spla.splu((A - shift * eye).tocsc())
                y = lu.solve(vecs[:, i])
                if np.all(np.isfinite(y)):
                    break
            except RuntimeError:
                pass
            shift = theta + (attempt + 1) * 1e-13 * max(op.norm_inf, 1.0)
        else:
            y = vecs[:, i]
        y /= np.linalg.norm(y)
        if y @ vecs[:, i] < 0:
            y = -y
        out[:, i] = y
    q, r = np.linalg.qr(out)
    # keep QR column signs aligned with the polished vectors
    q *= np.sign(np.diag(r))
    small = q.T @ (A @ q)
    theta, S = np.linalg.eigh(0.5 * (small + small.T))
    return theta, q @ S
