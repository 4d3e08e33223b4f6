from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class SpectralResult:
    """Eigenvalues in ascending order, optional unit eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = field(default=None, repr=False)
    solver: str = "dense"
    residuals: np.ndarray | None = None
    tol: float = 0.0


@dataclass(frozen=True)
class CountingResult:
    """Number of eigenvalues strictly below ``shift``."""

    shift: float
    count: int
    method: str = "inertia"
    jitter: float = 0.0
