"""Eigenvalue counting by Sylvester's law of inertia.

``H - E`` is factored as ``L D L^T`` in lower band storage without pivoting;
the number of negative pivots equals ``#{eigenvalues < E}``.  A pivot that
is tiny relative to ``||H - E||_inf`` means ``E`` sits (numerically) on an
eigenvalue; the shift is then nudged and the factorization repeated.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from ..errors import FactorizationError
from .dense import DENSE_GUARD, dense_eig
from .types import CountingResult

PIVOT_RTOL = 1e-10
MAX_RETRIES = 5


@njit(cache=True)
def _band_ldlt_negatives(ab, shift, tau):
    """Negative pivot count of ``ab - shift*I``; returns -1 on a tiny pivot.

    ``ab`` is lower band storage, ``ab[j, i] = A[i + j, i]``; it is not modified.
    """
    b = ab.shape[0] - 1
    n = ab.shape[1]
    neg = 0
    if b == 0:
        for k in range(n):
            p = ab[0, k] - shift
            if abs(p) < tau:
                return -1
            if p < 0.0:
                neg += 1
        return neg
    if b == 1:
        prev = 1.0
        off2 = 0.0
        for k in range(n):
            p = ab[0, k] - shift - off2 / prev
            if abs(p) < tau:
                return -1
            if p < 0.0:
                neg += 1
            prev = p
            if k + 1 < n:
                off2 = ab[1, k] * ab[1, k]
        return neg
    w = ab.copy()
    for k in range(n):
        w[0, k] -= shift
    for k in range(n):
        p = w[0, k]
        if abs(p) < tau:
            return -1
        if p < 0.0:
            neg += 1
        reach = min(b, n - 1 - k)
        for j in range(1, reach + 1):
            ljp = w[j, k] / p
            if ljp == 0.0:
                continue
            # column k+j of the trailing block, rows k+j .. k+reach
            for i in range(j, reach + 1):
                w[i - j, k + j] -= w[i, k] * ljp
    return neg


def shifted_norm_inf(op, E: float) -> float:
    if not op.dimension:
        return 0.0
    return float(np.max(op.offdiag_row_abs + np.abs(op.lower_band()[0] - E)))


def _jitter_sequence(step: float):
    # downward first: an eigenvalue sitting exactly at E then stays uncounted, as the strict count requires
    for r in range(1, MAX_RETRIES + 1):
        yield (-1 if r % 2 else 1) * ((r + 1) // 2) * step


def inertia_count(op, E: float, dense_guard: int = DENSE_GUARD) -> CountingResult:
    """``#{eigenvalues of op < E}``."""
    E = float(E)
    ab = op.lower_band()
    tau = PIVOT_RTOL * shifted_norm_inf(op, E)
    count = _band_ldlt_negatives(ab, E, tau)
    if count >= 0:
        return CountingResult(E, int(count), "inertia", 0.0)
    for jitter in _jitter_sequence(10.0 * tau):
        count = _band_ldlt_negatives(ab, E + jitter, tau)
        if count >= 0:
            return CountingResult(E, int(count), "inertia", jitter)
    if op.dimension <= dense_guard:
        vals = dense_eig(op).eigenvalues
        return CountingResult(E, int(np.count_nonzero(vals < E)), "dense", 0.0)
    raise FactorizationError(
        f"LDL^T of H - E broke down at E={E!r} after {MAX_RETRIES} jittered retries "
        f"and dimension {op.dimension} exceeds the dense guard {dense_guard}"
    )


def dense_count(op, E: float) -> CountingResult:
    vals = dense_eig(op).eigenvalues
    return CountingResult(float(E), int(np.count_nonzero(vals < E)), "dense", 0.0)
