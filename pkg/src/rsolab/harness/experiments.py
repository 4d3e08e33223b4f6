"""Ensemble drivers: phase sweep, localization study and near-energy eigenvalue probe."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..analysis import localization_report
from ..disorder import ModelParams, derive_seeds, realize_field
from ..errors import ConditioningError, PreconditionError
from ..lattice import Box, Grid
from ..operator import assemble
from ..spectral import inertia_count, lanczos_smallest, spectral_distance
from .config import ExperimentConfig
from .pool import ordered_map

GROWING = "growing"
SATURATING = "saturating"
INDETERMINATE = "indeterminate"


def realization_seeds(config: ExperimentConfig) -> list[int]:
    """Per-realization seeds, shared by every box side and parameter point."""
    return [int(s) for s in derive_seeds(config.seed, np.arange(config.K))]


# --------------------------------------------------------------------------
# phase sweep


class PhaseRow(NamedTuple):
    alpha: float
    delta: float
    L: int
    realization: int
    seed: int
    count: int
    eps: float


class PhasePoint(NamedTuple):
    alpha: float
    delta: float
    means: dict
    variances: dict
    growth: float
    classification: str


def growth_ratio(mean_small: float, mean_large: float) -> float:
    if mean_small > 0:
        return mean_large / mean_small
    return 1.0 if mean_large == 0 else math.inf


def classify(growth: float, tau_grow: float = 1.5, tau_sat: float = 1.2) -> str:
    if growth >= tau_grow:
        return GROWING
    if growth <= tau_sat:
        return SATURATING
    return INDETERMINATE


def classify_counts(ladder, counts, tau_grow: float = 1.5, tau_sat: float = 1.2) -> tuple[float, str]:
    """Growth ratio and label from mean counts aligned with an ascending ``ladder``."""
    counts = [float(c) for c in counts]
    if len(counts) != len(ladder) or not counts:
        raise PreconditionError("need one mean count per ladder entry")
    g = growth_ratio(counts[0], counts[-1])
    return g, classify(g, tau_grow, tau_sat)


@dataclass(frozen=True)
class PhaseDiagramResult:
    config: ExperimentConfig
    rows: tuple[PhaseRow, ...]

    def points(self) -> list[PhasePoint]:
        ladder = self.config.L_ladder
        out = []
        for alpha in self.config.alphas:
            for delta in self.config.deltas:
                means, variances = {}, {}
                for L in ladder:
                    c = np.array([r.count for r in self.rows if r.alpha == alpha and r.delta == delta and r.L == L], float)
                    means[L] = float(c.mean())
                    variances[L] = float(c.var(ddof=1)) if c.size > 1 else 0.0
                g, label = classify_counts(
                    ladder, [means[L] for L in ladder], self.config.tau_grow, self.config.tau_sat
                )
                out.append(PhasePoint(alpha, delta, means, variances, g, label))
        return out


def _phase_task(args):
    config, index, seed = args
    L_max = config.L_ladder[-1]
    grid = Grid(config.M)
    rows = []
    for alpha in config.alphas:
        for delta in config.deltas:
            params = ModelParams(config.d, alpha, delta)
            field = realize_field(seed, params, Box.centered(config.d, L_max))
            for L in config.L_ladder:
                op = assemble(field, Box.centered(config.d, L), grid)
                count = inertia_count(op, -config.eps).count
                rows.append(PhaseRow(alpha, delta, L, index, seed, count, config.eps))
    return rows


def run_phase_sweep(config: ExperimentConfig) -> PhaseDiagramResult:
    """Counts below ``-eps`` for every realization, parameter point and box side."""
    tasks = [(config, i, s) for i, s in enumerate(realization_seeds(config))]
    rows = [row for chunk in ordered_map(_phase_task, tasks, config.workers) for row in chunk]
    rows.sort(key=lambda r: (config.alphas.index(r.alpha), config.deltas.index(r.delta), r.L, r.realization))
    return PhaseDiagramResult(config, tuple(rows))


# --------------------------------------------------------------------------
# localization study


class LocalizationRow(NamedTuple):
    realization: int
    eigenvalue: float
    center: tuple
    ipr: float
    decay_rate: float
    r2: float

    @property
    def exponential(self) -> bool:
        return self.r2 >= 0.9 and self.decay_rate > 0.05


def _same_row(a, b) -> bool:
    return all(x == y or (isinstance(x, float) and math.isnan(x) and math.isnan(y)) for x, y in zip(a, b))


@dataclass(frozen=True, eq=False)
class LocalizationStudyResult:
    config: ExperimentConfig
    rows: tuple[LocalizationRow, ...]

    def __eq__(self, other):
        # failed fits carry NaN, which must compare equal to itself here
        if not isinstance(other, LocalizationStudyResult):
            return NotImplemented
        return (
            self.config == other.config
            and len(self.rows) == len(other.rows)
            and all(_same_row(a, b) for a, b in zip(self.rows, other.rows))
        )

    @property
    def pass_fraction(self) -> float:
        """Share of reported eigenfunctions with an exponential profile (NaN if none)."""
        if not self.rows:
            return float("nan")
        return sum(r.exponential for r in self.rows) / len(self.rows)


def localize_operator(op, eps: float, tol: float = 1e-10, realization: int = 0) -> list[LocalizationRow]:
    """Reports for every eigenpair of ``op`` below ``-eps``."""
    k = inertia_count(op, -eps).count
    if k == 0:
        return []
    if 4 * k > op.dimension:
        raise PreconditionError(
            f"{k} eigenvalues below -eps exceed the Lanczos limit dimension/4 = {op.dimension // 4}"
        )
    res = lanczos_smallest(op, k, tol=tol, seed=realization, polish=True)
    rows = []
    for j in range(k):
        lam = float(res.eigenvalues[j])
        if not lam < -eps:
            continue
        rep = localization_report(lam, res.eigenvectors[:, j], op.grid, op.box)
        rows.append(LocalizationRow(realization, lam, rep.center, rep.ipr, rep.decay_rate, rep.r2))
    return rows


def _localization_task(args):
    config, index, seed = args
    params = ModelParams(config.d, config.alphas[0], config.deltas[0])
    box = Box.centered(config.d, config.L_ladder[-1])
    op = assemble(realize_field(seed, params, box), box, Grid(config.M))
    return localize_operator(op, config.eps, config.tol, index)


def run_localization_study(config: ExperimentConfig) -> LocalizationStudyResult:
    """Decay fits of all eigenfunctions below ``-eps`` at the largest box side."""
    tasks = [(config, i, s) for i, s in enumerate(realization_seeds(config))]
    rows = [row for chunk in ordered_map(_localization_task, tasks, config.workers) for row in chunk]
    return LocalizationStudyResult(config, tuple(rows))


# --------------------------------------------------------------------------
# eigenvalue-near-energy probe


class WegnerRow(NamedTuple):
    eta: float
    frequency: float
    halfwidth: float
    discarded: int


@dataclass(frozen=True)
class WegnerResult:
    config: ExperimentConfig
    rows: tuple[WegnerRow, ...]

    @property
    def monotone(self) -> bool:
        f = [r.frequency for r in self.rows]
        return all(b >= a for a, b in zip(f, f[1:]))

    @property
    def slope(self) -> float:
        """Least-squares log-log slope of frequency in ``eta`` over nonzero frequencies."""
        pts = [(r.eta, r.frequency) for r in self.rows if r.frequency > 0]
        if len(pts) < 2:
            return float("nan")
        x, y = np.log(np.array(pts)).T
        return float(np.polyfit(x, y, 1)[0])


def bounded_event(field, L: int, a: float) -> bool:
    """``|v_n| < L^a`` on every site of the field box."""
    return bool(np.all(np.abs(field.values) < float(L) ** a))


def _wegner_task(args):
    config, seed = args
    params = ModelParams(config.d, config.alphas[0], config.deltas[0])
    L = config.L_ladder[-1]
    box = Box.centered(config.d, L)
    field = realize_field(seed, params, box)
    if not bounded_event(field, L, config.a_exponent):
        return None
    op = assemble(field, box, Grid(config.M))
    return spectral_distance(op, config.energy, tol=min(config.tol, 1e-3 * config.etas[0]))


def run_wegner_probe(config: ExperimentConfig) -> WegnerResult:
    """Empirical ``P(dist(sigma(H_L), E) < eta)`` over the ``eta`` ladder, given bounded potential."""
    alpha, delta, d = config.alphas[0], config.deltas[0], config.d
    if not config.a_exponent > d / delta - alpha:
        raise PreconditionError(
            f"a_exponent = {config.a_exponent} must exceed d/delta - alpha = {d / delta - alpha}"
        )
    if not config.energy < 0:
        raise PreconditionError(f"energy must be negative, got {config.energy}")
    seeds = realization_seeds(config)
    dists = [x for x in ordered_map(_wegner_task, [(config, s) for s in seeds], config.workers)]
    kept = np.array([x for x in dists if x is not None])
    discarded = len(dists) - kept.size
    if kept.size == 0:
        raise ConditioningError(f"all {len(dists)} realizations fell outside the bounded-potential event")
    rows = []
    for eta in config.etas:
        p = float(np.count_nonzero(kept < eta) / kept.size)
        rows.append(WegnerRow(eta, p, 3.0 * math.sqrt(p * (1.0 - p) / kept.size), discarded))
    return WegnerResult(config, tuple(rows))
