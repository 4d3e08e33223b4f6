"""Lattice partial sums for the two integrability conditions used to build wave operators.

Both probes reduce to shell sums ``sum_{|n|_inf = j} v_n^2`` of the realised
potential, which the field box must contain up to the largest radius used.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..disorder import sup_norm
from ..errors import PreconditionError


def _max_radius(field) -> int:
    """Largest ``R`` with the whole sup-ball ``|n|_inf <= R`` inside the field box."""
    return int(min(np.min(-field.box.site_lo), np.min(field.box.site_hi)))


def shell_sums(field, radius: int) -> np.ndarray:
    """``S[j] = sum of v_n^2 over |n|_inf = j`` for ``j = 0 .. radius``."""
    radius = int(radius)
    if radius < 0 or radius > _max_radius(field):
        raise PreconditionError(
            f"radius {radius} exceeds the field box {field.box} (max {_max_radius(field)})"
        )
    sites = field.box.sites()
    dist = sup_norm(sites).astype(np.int64)
    keep = dist <= radius
    return np.bincount(dist[keep], weights=field.values.ravel()[keep] ** 2, minlength=radius + 1)


def cook_integral_probe(field, m_exponent: float, radii) -> np.ndarray:
    """``I(R) = sum_{|n|_inf <= R} (1 + |n|_inf)^{-2m} v_n^2`` for each ``R`` in ``radii``."""
    if not m_exponent > 0:
        raise PreconditionError(f"m_exponent must be positive, got {m_exponent}")
    radii = np.asarray(radii, dtype=np.int64)
    if radii.ndim != 1 or radii.size == 0 or np.any(np.diff(radii) <= 0) or radii[0] < 0:
        raise PreconditionError("radii must be a nonempty increasing sequence of nonnegative integers")
    shells = shell_sums(field, int(radii[-1]))
    j = np.arange(shells.size)
    partial = np.cumsum((1.0 + j) ** (-2.0 * m_exponent) * shells)
    return partial[radii]


class DilationIntegral(NamedTuple):
    t: np.ndarray
    integrand: np.ndarray
    cumulative: np.ndarray


def dilation_integral_probe(field, a: float, b: float, t_max: float, points: int = 400) -> DilationIntegral:
    """Trapezoid partial integrals of ``t -> (int_{a<|x|<b} V(xt)^2 dx)^{1/2}`` on ``[1, t_max]``.

    Substituting ``y = xt`` gives ``t^{-d/2} S(at, bt)^{1/2}`` with
    ``S(r1, r2)`` the sum of ``v_n^2`` over ``r1 < |n|_inf <= r2``.
    """
    if not 0 < a < b:
        raise PreconditionError(f"need 0 < a < b, got a={a}, b={b}")
    if not t_max > 1:
        raise PreconditionError(f"t_max must exceed 1, got {t_max}")
    top = int(np.floor(b * t_max))
    shells = shell_sums(field, top)
    cum = np.concatenate([[0.0], np.cumsum(shells)])
    t = np.linspace(1.0, t_max, int(points))
    hi = np.floor(b * t).astype(np.int64)
    lo = np.floor(a * t).astype(np.int64)
    window = np.maximum(cum[hi + 1] - cum[lo + 1], 0.0)
    d = field.box.d
    integrand = t ** (-d / 2.0) * np.sqrt(window)
    cumulative = cumulative_trapezoid(integrand, t, initial=0.0)
    return DilationIntegral(t, integrand, cumulative)
