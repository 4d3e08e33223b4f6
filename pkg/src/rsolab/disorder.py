"""Fat-tailed single-site law, decaying envelope and seed-coupled potential fields.

The single-site density is fixed to ``f(x) = (delta/2) (1 + |x|)^-(1+delta)``,
which is symmetric, bounded and has the closed-form CDF

    F(x) = (1/2) (1 + |x|)^-delta        for x < 0
    F(x) = 1 - (1/2) (1 + x)^-delta      for x >= 0.

Couplings are drawn per site from a counter-based hash of ``(seed, site)``,
so the realization seen by a box does not depend on the box: fields on
nested boxes with the same seed agree on the smaller one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, PreconditionError
from .lattice import Box

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_DERIVE_SALT = np.uint64(0xD1B54A32D192ED03)
_MASK64 = (1 << 64) - 1


# --------------------------------------------------------------------------
# single-site law


@dataclass(frozen=True)
class FatTail:
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise DomainError(f"tail exponent delta must be positive, got {self.delta}")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * self.delta * (1.0 + np.abs(x)) ** (-(1.0 + self.delta))

    def tail(self, R):
        """One-sided tail ``P(omega > R) = P(omega < -R)`` for ``R >= 0``."""
        return 0.5 * (1.0 + np.asarray(R, dtype=float)) ** (-self.delta)


def cdf(x, dist: FatTail):
    x = np.asarray(x, dtype=float)
    half_tail = 0.5 * (1.0 + np.abs(x)) ** (-dist.delta)
    out = np.where(x < 0, half_tail, 1.0 - half_tail)
    return out[()] if out.ndim == 0 else out


def quantile(u, dist: FatTail):
    """Inverse of :func:`cdf` on the open unit interval."""
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0) & (u < 1))):
        raise DomainError("quantile requires 0 < u < 1")
    lower = u < 0.5
    # use the smaller tail mass on each side so that 1 - u is never formed for u < 1/2
    mass = np.where(lower, u, 1.0 - u)
    magnitude = (2.0 * mass) ** (-1.0 / dist.delta) - 1.0
    out = np.where(lower, -magnitude, magnitude)
    return out[()] if out.ndim == 0 else out


# --------------------------------------------------------------------------
# counter-based uniforms


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer
    z = (z ^ (z >> np.uint64(30))) * _MUL1
    z = (z ^ (z >> np.uint64(27))) * _MUL2
    return z ^ (z >> np.uint64(31))


def _as_u64(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype == np.uint64:
        return arr
    if arr.dtype.kind in "iu":
        return arr.astype(np.int64).astype(np.uint64)
    # python ints beyond int64 (e.g. 64-bit seeds)
    return np.asarray([int(v) & _MASK64 for v in np.ravel(arr)], dtype=np.uint64).reshape(arr.shape)


def hash_sites(seed, sites) -> np.ndarray:
    """64-bit hash of ``(seed, site)``; ``sites`` has shape ``(..., d)``.

    ``seed`` may be a scalar or an array broadcastable against ``sites[..., 0]``.
    """
    sites = np.asarray(sites)
    if sites.ndim < 2:
        raise PreconditionError("sites must have shape (..., d)")
    with np.errstate(over="ignore"):
        h = _mix64(np.atleast_1d(_as_u64(seed)) + _GOLDEN)
        h = np.broadcast_to(h, sites.shape[:-1])
        d = sites.shape[-1]
        h = h ^ _mix64(np.full(1, d, dtype=np.uint64) * _GOLDEN)
        for axis in range(d):
            coord = _as_u64(sites[..., axis])
            salt = np.uint64(axis + 1) * _GOLDEN
            h = _mix64(h ^ _mix64(coord + salt))
    return h


def uniform_sites(seed, sites) -> np.ndarray:
    """Uniform values in the open interval (0, 1), one per site."""
    h = hash_sites(seed, sites)
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def derive_seeds(seed: int, indices) -> np.ndarray:
    """Independent 64-bit child seeds for trial/realization ``indices``."""
    idx = _as_u64(np.atleast_1d(np.asarray(indices, dtype=np.int64)))
    with np.errstate(over="ignore"):
        root = _mix64(np.atleast_1d(_as_u64(seed)) ^ _DERIVE_SALT)
        return _mix64(root ^ _mix64(idx + _GOLDEN))


def derive_seed(seed: int, index: int) -> int:
    return int(derive_seeds(seed, [index])[0])


def sample_sites(seed, sites, dist: FatTail) -> np.ndarray:
    """Vectorised :func:`sample_site` over an ``(N, d)`` array of sites."""
    return quantile(uniform_sites(seed, sites), dist)


def sample_site(seed: int, n, dist: FatTail) -> float:
    site = np.atleast_1d(np.asarray(n, dtype=np.int64)).reshape(1, -1)
    return float(sample_sites(seed, site, dist)[0])


# --------------------------------------------------------------------------
# envelope and model parameters


@dataclass(frozen=True)
class Envelope:
    alpha: float

    def __post_init__(self):
        if not self.alpha >= 0:
            raise DomainError(f"decay exponent alpha must be nonnegative, got {self.alpha}")


def sup_norm(sites) -> np.ndarray:
    sites = np.asarray(sites)
    return np.max(np.abs(sites), axis=-1)


def envelope_values(sites, env: Envelope) -> np.ndarray:
    norm = sup_norm(sites).astype(float)
    out = np.ones_like(norm)
    nz = norm > 0
    out[nz] = norm[nz] ** (-env.alpha)
    return out


def envelope_at(n, env: Envelope) -> float:
    site = np.atleast_1d(np.asarray(n, dtype=np.int64)).reshape(1, -1)
    return float(envelope_values(site, env)[0])


@dataclass(frozen=True)
class ModelParams:
    d: int
    alpha: float
    delta: float

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError(f"dimension d must be 1, 2 or 3, got {self.d}")
        Envelope(self.alpha)
        FatTail(self.delta)

    @property
    def hypothesis_holds(self) -> bool:
        """Essential self-adjointness regime ``(2 + alpha) delta > d``."""
        return (2.0 + self.alpha) * self.delta > self.d

    @property
    def dist(self) -> FatTail:
        return FatTail(self.delta)

    @property
    def envelope(self) -> Envelope:
        return Envelope(self.alpha)


# --------------------------------------------------------------------------
# potential fields


@dataclass(frozen=True, eq=False)
class PotentialField:
    """Realised potential ``v_n = a_n omega_n`` on every site of ``box``.

    ``values`` and ``omega`` are arrays of shape ``box.shape`` indexed by
    ``site - box.site_lo``.  ``seed`` is ``None`` for hand-built fields.
    """

    params: ModelParams
    seed: int | None
    box: Box
    values: np.ndarray = field(repr=False)
    omega: np.ndarray = field(repr=False)

    @classmethod
    def from_values(cls, params: ModelParams, box: Box, values) -> "PotentialField":
        values = np.asarray(values, dtype=float).reshape(box.shape)
        env = envelope_values(box.sites(), params.envelope).reshape(box.shape)
        return cls(params, None, box, values, values / env)

    def value_at(self, n) -> float:
        idx = tuple(np.asarray(n) - self.box.site_lo)
        return float(self.values[idx])

    def lookup(self, sites) -> np.ndarray:
        """Potential at an ``(N, d)`` array of sites inside the box."""
        sites = np.asarray(sites)
        if not (np.all(sites >= self.box.site_lo) and np.all(sites <= self.box.site_hi)):
            raise PreconditionError("requested sites lie outside the field's box")
        idx = tuple((sites - self.box.site_lo).T)
        return self.values[idx]

    def restrict(self, box: Box) -> "PotentialField":
        if not self.box.contains_box(box):
            raise PreconditionError(f"field box {self.box} does not cover {box}")
        off = box.site_lo - self.box.site_lo
        sl = tuple(slice(o, o + box.L) for o in off)
        return PotentialField(self.params, self.seed, box, self.values[sl].copy(), self.omega[sl].copy())


def realize_field(seed: int, params: ModelParams, box: Box) -> PotentialField:
    if box.d != params.d:
        raise PreconditionError(f"box dimension {box.d} does not match d={params.d}")
    sites = box.sites()
    omega = sample_sites(seed, sites, params.dist).reshape(box.shape)
    env = envelope_values(sites, params.envelope).reshape(box.shape)
    return PotentialField(params, int(seed), box, env * omega, omega)


class Exceedance(NamedTuple):
    count: int
    sites: np.ndarray


def tail_exceedance_count(field: PotentialField, exponent: float, radius: int) -> Exceedance:
    """Sites with ``0 < |n| <= radius``, ``omega_n < 0`` and ``|v_n| > |n|^exponent``.

    ``exponent = 2 - eps`` gives the growth statistic behind essential
    self-adjointness, ``exponent = -eps`` the decay statistic behind finiteness
    of the negative spectrum.
    """
    d = field.box.d
    if not (field.box.contains_site(np.full(d, -radius)) and field.box.contains_site(np.full(d, radius))):
        raise PreconditionError(f"field box {field.box} does not contain all sites with |n| <= {radius}")
    sites = field.box.sites()
    norm = sup_norm(sites)
    v = field.values.ravel()
    w = field.omega.ravel()
    with np.errstate(divide="ignore"):
        threshold = np.where(norm > 0, norm.astype(float) ** exponent, np.inf)
    hit = (norm > 0) & (norm <= radius) & (w < 0) & (np.abs(v) > threshold)
    return Exceedance(int(hit.sum()), sites[hit])


# --------------------------------------------------------------------------
# Borel-Cantelli events


@dataclass(frozen=True)
class EventSpec:
    """``|V(j)| < eps`` for ``|j - m| < k``; with ``window`` the center must instead lie in it."""

    center: tuple[int, ...]
    k: int
    eps: float
    window: tuple[float, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(int(c) for c in np.atleast_1d(self.center)))
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"event radius k must be a positive integer, got {self.k}")
        if not self.eps > 0:
            raise DomainError(f"event tolerance eps must be positive, got {self.eps}")
        if self.window is not None:
            lo, hi = self.window
            if not lo < hi:
                raise DomainError(f"event window must satisfy lo < hi, got {self.window}")
            object.__setattr__(self, "window", (float(lo), float(hi)))

    @classmethod
    def well(cls, center, k: int, eps: float, lam: float) -> "EventSpec":
        """Window ``(lam - eps, lam + eps)`` at the center site."""
        return cls(center, k, eps, (lam - eps, lam + eps))

    @property
    def d(self) -> int:
        return len(self.center)

    def neighborhood(self) -> np.ndarray:
        """Sites ``j`` with ``|j - m|_inf < k``; the center comes first."""
        offsets = np.arange(-(self.k - 1), self.k)
        mesh = np.meshgrid(*([offsets] * self.d), indexing="ij")
        off = np.stack([m.ravel() for m in mesh], axis=1)
        order = np.argsort(np.max(np.abs(off), axis=1), kind="stable")
        return np.asarray(self.center) + off[order]


def _check_window(spec: EventSpec):
    if spec.window is not None and not spec.window[1] < 0:
        raise DomainError(f"target window {spec.window} must lie strictly below 0")


def event_probability_exact(spec: EventSpec, params: ModelParams) -> float:
    _check_window(spec)
    dist = params.dist
    sites = spec.neighborhood()
    a = envelope_values(sites, params.envelope)
    x = spec.eps / a
    factors = cdf(x, dist) - cdf(-x, dist)
    if spec.window is not None:
        lo, hi = spec.window
        factors[0] = cdf(hi / a[0], dist) - cdf(lo / a[0], dist)
    return float(np.prod(factors))


def tail_lower_bound(spec: EventSpec, params: ModelParams, C: float = 0.5) -> float:
    """``(1 - C / (eps^delta |m|^(alpha delta)))^(k^d)``, clipped below at 0."""
    m = float(sup_norm(np.asarray(spec.center)))
    base = 1.0 - C / (spec.eps**params.delta * m ** (params.alpha * params.delta))
    return max(base, 0.0) ** (spec.k**spec.d)


def rigorous_lower_bound(spec: EventSpec, params: ModelParams) -> float:
    """A bound that the exact product provably dominates (no window).

    Every factor is ``1 - (1 + eps |j|^alpha)^-delta >= 1 - (eps |j|^alpha)^-delta``
    and ``|j| >= |m| - k + 1`` over the ``(2k - 1)^d`` sites of the event.
    """
    m = float(sup_norm(np.asarray(spec.center)))
    nearest = m - spec.k + 1
    if nearest <= 0:
        return 0.0
    base = 1.0 - 1.0 / (spec.eps**params.delta * nearest ** (params.alpha * params.delta))
    return max(base, 0.0) ** ((2 * spec.k - 1) ** spec.d)


class McEstimate(NamedTuple):
    estimate: float
    halfwidth: float


def event_occurs(spec: EventSpec, params: ModelParams, seeds) -> np.ndarray:
    """Boolean per realization seed: does the event hold for that field?"""
    _check_window(spec)
    seeds = np.atleast_1d(_as_u64(seeds))
    sites = spec.neighborhood()
    a = envelope_values(sites, params.envelope)
    grid_sites = np.broadcast_to(sites, (seeds.size,) + sites.shape)
    u = uniform_sites(seeds[:, None], grid_sites)
    v = a * quantile(u, params.dist)
    inside = np.abs(v) < spec.eps
    if spec.window is not None:
        lo, hi = spec.window
        inside[:, 0] = (v[:, 0] > lo) & (v[:, 0] < hi)
    return np.all(inside, axis=1)


def event_probability_mc(spec: EventSpec, params: ModelParams, seed: int, trials: int) -> McEstimate:
    if trials < 100:
        raise PreconditionError(f"Monte Carlo needs at least 100 trials, got {trials}")
    hits = event_occurs(spec, params, derive_seeds(seed, np.arange(trials)))
    p = float(hits.mean())
    return McEstimate(p, 3.0 * math.sqrt(p * (1.0 - p) / trials))
