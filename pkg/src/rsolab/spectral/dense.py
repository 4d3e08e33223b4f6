"""Dense symmetric eigensolver: Householder tridiagonalization and implicit QL.

The kernels follow the classical EISPACK ``tred2``/``tql2`` pair.  Arrays
are handled in Fortran order so that the inner loops run over contiguous
columns.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from ..errors import ConvergenceError, SizeError
from .types import SpectralResult

DENSE_GUARD = 4000


@njit(cache=True)
def _tred2(V, d, e, want_vectors):
    n = V.shape[0]
    for j in range(n):
        d[j] = V[n - 1, j]
    for i in range(n - 1, 0, -1):
        scale = 0.0
        h = 0.0
        for k in range(i - 1):
            scale += abs(d[k])
        # row already tridiagonal: no reflection needed
        if scale == 0.0:
            e[i] = d[i - 1]
            for j in range(i):
                d[j] = V[i - 1, j]
                V[i, j] = 0.0
                V[j, i] = 0.0
        else:
            scale += abs(d[i - 1])
            for k in range(i):
                d[k] /= scale
                h += d[k] * d[k]
            f = d[i - 1]
            g = np.sqrt(h)
            if f > 0:
                g = -g
            e[i] = scale * g
            h = h - f * g
            d[i - 1] = f - g
            for j in range(i):
                e[j] = 0.0
            for j in range(i):
                f = d[j]
                V[j, i] = f
                g = e[j] + V[j, j] * f
                for k in range(j + 1, i):
                    g += V[k, j] * d[k]
                    e[k] += V[k, j] * f
                e[j] = g
            f = 0.0
            for j in range(i):
                e[j] /= h
                f += e[j] * d[j]
            hh = f / (h + h)
            for j in range(i):
                e[j] -= hh * d[j]
            for j in range(i):
                f = d[j]
                g = e[j]
                for k in range(j, i):
                    V[k, j] -= f * e[k] + g * d[k]
                d[j] = V[i - 1, j]
                V[i, j] = 0.0
        d[i] = h

    if not want_vectors:
        for i in range(n):
            d[i] = V[i, i]
        e[0] = 0.0
        return

    for i in range(n - 1):
        V[n - 1, i] = V[i, i]
        V[i, i] = 1.0
        h = d[i + 1]
        if h != 0.0:
            for k in range(i + 1):
                d[k] = V[k, i + 1] / h
            for j in range(i + 1):
                g = 0.0
                for k in range(i + 1):
                    g += V[k, i + 1] * V[k, j]
                for k in range(i + 1):
                    V[k, j] -= g * d[k]
        for k in range(i + 1):
            V[k, i + 1] = 0.0
    for j in range(n):
        d[j] = V[n - 1, j]
        V[n - 1, j] = 0.0
    V[n - 1, n - 1] = 1.0
    e[0] = 0.0


@njit(cache=True)
def _tql2(d, e, V, want_vectors, max_iter):
    """Implicit QL on the tridiagonal (d, e); returns False if not converged."""
    n = d.shape[0]
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0
    f = 0.0
    tst1 = 0.0
    eps = 2.0**-52
    for l in range(n):
        tst1 = max(tst1, abs(d[l]) + abs(e[l]))
        m = l
        while m < n:
            if abs(e[m]) <= eps * tst1:
                break
            m += 1
        if m > l:
            it = 0
            while True:
                it += 1
                if it > max_iter:
                    return False
                g = d[l]
                p = (d[l + 1] - g) / (2.0 * e[l])
                r = np.hypot(p, 1.0)
                if p < 0:
                    r = -r
                d[l] = e[l] / (p + r)
                d[l + 1] = e[l] * (p + r)
                dl1 = d[l + 1]
                h = g - d[l]
                for i in range(l + 2, n):
                    d[i] -= h
                f = f + h
                p = d[m]
                c = 1.0
                c2 = c
                c3 = c
                el1 = e[l + 1]
                s = 0.0
                s2 = 0.0
                for i in range(m - 1, l - 1, -1):
                    c3 = c2
                    c2 = c
                    s2 = s
                    g = c * e[i]
                    h = c * p
                    r = np.hypot(p, e[i])
                    e[i + 1] = s * r
                    s = e[i] / r
                    c = p / r
                    p = c * d[i] - s * g
                    d[i + 1] = h + s * (c * g + s * d[i])
                    if want_vectors:
                        for k in range(n):
                            h = V[k, i + 1]
                            V[k, i + 1] = s * V[k, i] + c * h
                            V[k, i] = c * V[k, i] - s * h
                p = -s * s2 * c3 * el1 * e[l] / dl1
                e[l] = s * p
                d[l] = c * p
                if abs(e[l]) <= eps * tst1:
                    break
        d[l] = d[l] + f
        e[l] = 0.0
    return True


def eigh_dense(matrix: np.ndarray, want_vectors: bool = False):
    """Eigen-decomposition of a dense symmetric matrix, ascending order."""
    a = np.array(matrix, dtype=np.float64, order="F", copy=True)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), (np.zeros((0, 0)) if want_vectors else None)
    d = np.zeros(n)
    e = np.zeros(n)
    if n == 1:
        return a[0, :1].copy(), (np.ones((1, 1)) if want_vectors else None)
    _tred2(a, d, e, want_vectors)
    if not _tql2(d, e, a, want_vectors, 60):
        raise ConvergenceError("implicit QL did not converge within 60 sweeps per eigenvalue")
    order = np.argsort(d, kind="stable")
    vals = d[order]
    vecs = np.ascontiguousarray(a[:, order]) if want_vectors else None
    return vals, vecs


def dense_eig(op, want_vectors: bool = False, guard: int = DENSE_GUARD) -> SpectralResult:
    """Full spectrum of ``op`` with the in-repo dense solver."""
    n = op.dimension
    if n > guard:
        raise SizeError(f"dense eigensolver limited to dimension {guard}, operator has {n}")
    vals, vecs = eigh_dense(op.to_dense(), want_vectors)
    residuals = None
    if vecs is not None:
        residuals = np.linalg.norm(op.matrix @ vecs - vecs * vals, axis=0)
    return SpectralResult(vals, vecs, "dense", residuals, tol=float(np.finfo(float).eps) * max(op.norm_inf, 1.0))
