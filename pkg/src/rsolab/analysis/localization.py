"""Localization diagnostics: inverse participation ratio and shell-max exponential fits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientRangeError, PreconditionError
from ..lattice import GridLayout

SHELL_FLOOR = 1e-12
FIT_START = 2
MIN_SHELLS = 4


@dataclass(frozen=True)
class DecayFit:
    rate: float
    r2: float
    fit_range: tuple[int, int]
    center: tuple[float, ...]


@dataclass(frozen=True)
class LocalizationReport:
    eigenvalue: float
    center: tuple[float, ...]
    ipr: float
    decay_rate: float
    r2: float
    fit_range: tuple[int, int] | None

    @property
    def exponential(self) -> bool:
        """Passes the exponential-profile criterion ``R^2 >= 0.9`` and ``m > 0.05``."""
        return self.fit_range is not None and self.r2 >= 0.9 and self.decay_rate > 0.05


def _check_normalized(psi: np.ndarray):
    if abs(np.linalg.norm(psi) - 1.0) > 1e-8:
        raise PreconditionError(f"vector must be normalized, has norm {np.linalg.norm(psi)!r}")


def ipr(psi) -> float:
    psi = np.asarray(psi, dtype=float)
    _check_normalized(psi)
    p2 = psi * psi
    return float(np.sum(p2 * p2) / np.sum(p2) ** 2)


def shell_maxima(psi, layout: GridLayout):
    """``s(r) = max |psi_i|`` over vertices with ``|x_i - c|_inf`` in ``[r, r + 1)``.

    ``c`` is the vertex of largest ``|psi|`` (first in lexicographic order on
    ties).  Returns the center coordinates and the array ``s``.
    """
    amp = np.abs(np.asarray(psi, dtype=float))
    ic = int(np.argmax(amp))
    scaled = layout.scaled_coordinates
    dist = np.max(np.abs(scaled - scaled[ic]), axis=1) // layout.grid.M
    s = np.zeros(int(dist.max()) + 1)
    np.maximum.at(s, dist, amp)
    return tuple(float(x) for x in layout.coordinates[ic]), s


def decay_fit(psi, grid, box) -> DecayFit:
    """Least-squares fit of ``log s(r)`` against ``r`` on ``[2, r_max]``."""
    psi = np.asarray(psi, dtype=float)
    _check_normalized(psi)
    layout = GridLayout(box, grid)
    if psi.shape[0] != layout.dimension:
        raise PreconditionError(f"vector length {psi.shape[0]} does not match grid dimension {layout.dimension}")
    center, s = shell_maxima(psi, layout)
    above = np.flatnonzero(s > SHELL_FLOOR)
    r_max = int(above.max())
    r = np.arange(FIT_START, r_max + 1)
    r = r[s[r] > SHELL_FLOOR]
    if r.size < MIN_SHELLS:
        raise InsufficientRangeError(
            f"only {r.size} usable shells in [{FIT_START}, {r_max}] (need {MIN_SHELLS})"
        )
    y = np.log(s[r])
    slope, intercept = np.polyfit(r.astype(float), y, 1)
    ss_res = float(np.sum((y - (slope * r + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return DecayFit(max(0.0, -float(slope)), float(min(max(r2, 0.0), 1.0)), (int(r[0]), int(r[-1])), center)


def localization_report(eigenvalue: float, psi, grid, box) -> LocalizationReport:
    """IPR and decay fit for one eigenpair; a failed fit is reported with NaN rate."""
    value = ipr(psi)
    try:
        fit = decay_fit(psi, grid, box)
    except InsufficientRangeError:
        center, _ = shell_maxima(psi, GridLayout(box, grid))
        return LocalizationReport(float(eigenvalue), center, value, float("nan"), float("nan"), None)
    return LocalizationReport(float(eigenvalue), fit.center, value, fit.rate, fit.r2, fit.fit_range)
