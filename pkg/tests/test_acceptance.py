"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the verdict lines.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import random_field_operator
from rsolab.analysis import (
    decay_fit,
    finite_well_ground_energy,
    hellmann_feynman_check,
    is_monotone,
    loglog_slope,
    single_well_ground_curve,
    weyl_residual,
)
from rsolab.cli import read_config
from rsolab.disorder import (
    EventSpec,
    FatTail,
    ModelParams,
    cdf,
    derive_seeds,
    event_probability_exact,
    event_probability_mc,
    tail_lower_bound,
    quantile,
    realize_field,
    sample_sites,
)
from rsolab.harness import (
    ExperimentConfig,
    RunManifest,
    load_run,
    run_localization_study,
    run_phase_sweep,
    run_wegner_probe,
    save_run,
)
from rsolab.lattice import Box, Grid, GridLayout
from rsolab.operator import assemble, assemble_constant
from rsolab.spectral import (
    counting_upper_bound,
    dense_count,
    discrete_neumann_count,
    greens_boundary_norm,
    inertia_count,
    neumann_cell_count_closed_form,
    spectral_distance,
)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def verdict(n, ok, detail, started):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail} [{time.perf_counter() - started:.1f} s]"
    print("\n" + line)
    assert ok, line


def test_criterion_01_distribution():
    t0 = time.perf_counter()
    dist = FatTail(1.0)
    u = np.random.default_rng(1).uniform(1e-6, 1 - 1e-6, 10_000)
    roundtrip = float(np.max(np.abs(cdf(quantile(u, dist), dist) - u)))
    draws = sample_sites(2024, np.arange(100_000)[:, None], dist)
    p = 0.5 * (1 + 9) ** -1.0
    freq = float(np.mean(draws > 9))
    sigma = math.sqrt(p * (1 - p) / draws.size)
    elapsed = time.perf_counter() - t0
    ok = roundtrip <= 1e-12 and abs(freq - 0.05) <= 3 * sigma and elapsed < 1.0
    verdict(1, ok, f"round trip {roundtrip:.2e}, tail frequency {freq:.5f} (3 sigma {3 * sigma:.5f})", t0)


def _random_specs(count):
    rng = np.random.default_rng(12345)
    specs = [(EventSpec((10,), 1, 0.1), ModelParams(1, 1.0, 1.0))]
    while len(specs) < count:
        d, k = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        m = int(rng.integers(10 * k, 60 * k))
        center = (m,) + tuple(int(rng.integers(-m, m + 1)) for _ in range(d - 1))
        eps = float(rng.uniform(0.05, 0.5))
        params = ModelParams(d, float(rng.uniform(0.3, 2.0)), float(rng.uniform(0.5, 2.0)))
        specs.append((EventSpec(center, k, eps), params))
    return specs


def test_criterion_02_event_probabilities():
    t0 = time.perf_counter()
    trials = 20_000
    specs = _random_specs(20)
    worked = event_probability_exact(*specs[0])
    mc_bad, bound_bad = [], []
    for i, (spec, params) in enumerate(specs):
        exact = event_probability_exact(spec, params)
        mc = event_probability_mc(spec, params, seed=100 + i, trials=trials).estimate
        sigma = math.sqrt(exact * (1 - exact) / trials)
        if abs(mc - exact) > 3 * sigma:
            mc_bad.append(i)
        bound = tail_lower_bound(spec, params, C=0.5)
        if exact < bound:
            bound_bad.append((i, exact, bound))
    elapsed = time.perf_counter() - t0
    ok = worked == pytest.approx(0.5, abs=1e-12) and not mc_bad and not bound_bad and elapsed < 30
    detail = f"worked value {worked:.6f}, Monte Carlo outside 3 sigma: {mc_bad}, C=1/2 bound violated on {len(bound_bad)}/20 specs"
    if bound_bad:
        i, e, b = bound_bad[0]
        detail += f" (first: spec {i}, exact {e:.4f} < bound {b:.4f})"
    verdict(2, ok, detail, t0)


def test_criterion_03_counting_inequality():
    t0 = time.perf_counter()
    params, box, grid = ModelParams(1, 0.5, 1.0), Box.centered(1, 20), Grid(8)
    good = 0
    for seed in derive_seeds(0, np.arange(50)):
        field = realize_field(int(seed), params, box)
        b = counting_upper_bound(field, box, grid, 0.1)
        oracle = dense_count(assemble(field, box, grid), -0.1).count
        good += b.lhs <= b.rhs and b.lhs == oracle
    ok = good == 50 and time.perf_counter() - t0 < 60
    verdict(3, ok, f"{good}/50 realizations with lhs <= rhs and lhs equal to the dense count", t0)


def test_criterion_04_neumann_cell_count():
    t0 = time.perf_counter()
    closed = (neumann_cell_count_closed_form(-10, 0.1, 1), neumann_cell_count_closed_form(-50, 0.5, 1))
    discrete = (discrete_neumann_count(-10, 0.1, 1, 64), discrete_neumann_count(-50, 0.5, 1, 64))
    ok = closed == (2, 3) and discrete == closed and time.perf_counter() - t0 < 5
    verdict(4, ok, f"closed form {closed}, discrete at M=64 {discrete}", t0)


def test_criterion_05_inertia_equals_dense():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    agree = total = 0
    for i in range(20):
        d = 1 + i % 2
        op = random_field_operator(1000 + i, d=d, L=int(rng.choice([8, 12, 16])) if d == 1 else 8,
                                   M=int(rng.integers(2, 9)) if d == 1 else int(rng.integers(2, 5)))
        assert op.dimension <= 1500
        evals = np.linalg.eigvalsh(op.to_dense())
        shifts = rng.uniform(evals[0] - 1, evals[min(20, evals.size - 1)] + 1, 5)
        for E in shifts:
            total += 1
            agree += inertia_count(op, E).count == dense_count(op, E).count
    ok = agree == total == 100 and time.perf_counter() - t0 < 60
    verdict(5, ok, f"{agree}/{total} inertia counts equal the dense oracle", t0)


def test_criterion_06_well_curve():
    t0 = time.perf_counter()
    box, grid = Box.centered(1, 40), Grid(20)
    ladder = [-50.0, -20.0, -10.0, -5.0, -2.0, -0.5]
    points = single_well_ground_curve(ladder, box, grid)
    e5 = next(p.energy for p in points if p.lam == -5.0)
    oracle = finite_well_ground_energy(-5.0)
    hf = hellmann_feynman_check(-5.0, 1e-3, box, grid)
    ok = (
        all(p.lam < p.energy < 0 for p in points)
        and is_monotone(points)
        and abs(e5 - (-2.51)) <= 0.02
        and abs(e5 - oracle) <= 0.02
        and hf.discrepancy <= 1e-3
        and time.perf_counter() - t0 < 60
    )
    verdict(6, ok, f"E(-5) = {e5:.5f} (oracle {oracle:.5f}), HF relative discrepancy {hf.discrepancy:.2e}", t0)


def test_criterion_07_weyl_residual():
    t0 = time.perf_counter()
    radii = [4.0, 8.0, 16.0, 32.0]
    grid = Grid(20)
    s0 = loglog_slope(radii, [weyl_residual(0.0, [0.0], r, grid) for r in radii])
    s1 = loglog_slope(radii, [weyl_residual(1.0, [1.0], r, grid) for r in radii])
    ok = abs(s0 + 2) <= 0.3 and abs(s1 + 1) <= 0.2 and time.perf_counter() - t0 < 120
    verdict(7, ok, f"slope {s0:.3f} at E=0, {s1:.3f} at E=1", t0)


def test_criterion_08_phase_transition():
    t0 = time.perf_counter()
    config = ExperimentConfig.from_mapping(read_config(CONFIGS / "transition_d1.cfg", "phase-sweep"))
    assert (config.d, config.deltas, config.K, config.L_ladder, config.eps) == (1, (1.0,), 200, (100, 400), 0.1)
    points = {p.alpha: p for p in run_phase_sweep(config).points()}
    low, mid, high = points[0.5], points[3.0], points[4.0]
    ok = (
        low.growth >= 1.5
        and mid.growth <= 1.2
        and high.growth <= 1.2
        and high.means[400] <= high.means[100] + 0.2
        and time.perf_counter() - t0 < 600
    )
    verdict(8, ok, f"g = {low.growth:.3f} (alpha 0.5), {mid.growth:.3f} (alpha 3), {high.growth:.3f} (alpha 4); "
                   f"alpha 4 means {high.means[100]:.3f} -> {high.means[400]:.3f}", t0)


def test_criterion_09_localization():
    t0 = time.perf_counter()
    config = ExperimentConfig(d=1, alphas=(0.5,), deltas=(1.0,), M=4, L_ladder=(200,), K=50, eps=0.1)
    study = run_localization_study(config)
    box, grid = Box.centered(1, 60), Grid(4)
    lay = GridLayout(box, grid)
    errors = []
    for rate in (0.1, 0.5, 1.0, 2.0):
        dist = np.max(np.abs(lay.coordinates - lay.coordinates[lay.dimension // 3]), axis=1)
        psi = np.exp(-rate * dist)
        errors.append(abs(decay_fit(psi / np.linalg.norm(psi), grid, box).rate - rate))
    ok = study.pass_fraction >= 0.9 and max(errors) <= 1e-3 and time.perf_counter() - t0 < 300
    verdict(9, ok, f"{study.pass_fraction:.3f} of {len(study.rows)} eigenfunctions exponential, "
                   f"planted-rate error {max(errors):.1e}", t0)


def test_criterion_10_green_decay():
    t0 = time.perf_counter()
    sides = [12, 18, 24, 30]
    norms, within = [], True
    for L in sides:
        op = assemble_constant(0.0, Box.centered(1, L), Grid(4))
        g = greens_boundary_norm(op, -1.0)
        within &= g <= 1.0 / spectral_distance(op, -1.0)
        norms.append(g)
    slope = float(np.polyfit(sides, np.log(norms), 1)[0])
    ok = -0.5 <= slope <= -0.2 and within and time.perf_counter() - t0 < 120
    verdict(10, ok, f"log-norm slope {slope:.4f} per unit L, norm <= 1/dist: {bool(within)}", t0)


@pytest.mark.slow
def test_criterion_11_wegner():
    t0 = time.perf_counter()
    config = ExperimentConfig.from_mapping(read_config(CONFIGS / "desk.cfg", "wegner"))
    result = run_wegner_probe(config)
    ok = result.monotone and result.slope >= 0.8 and time.perf_counter() - t0 < 300
    freqs = ", ".join(f"{r.frequency:.4g}" for r in result.rows)
    verdict(11, ok, f"frequencies [{freqs}], slope {result.slope:.3f}, discarded {result.rows[0].discarded}/{config.K}", t0)


def test_criterion_12_reproducibility(tmp_path):
    t0 = time.perf_counter()
    config = ExperimentConfig(alphas=(0.5, 3.0), L_ladder=(20, 40), K=20, seed=7)
    id_a, paths_a = save_run(run_phase_sweep(config), directory=tmp_path / "a")
    id_b, paths_b = save_run(run_phase_sweep(config), directory=tmp_path / "b")
    same_bytes = paths_a[1].read_bytes() == paths_b[1].read_bytes()
    loaded, manifest = load_run(tmp_path / "a", id_a)
    text = paths_a[0].read_text()
    round_trip = RunManifest.loads(text).dumps() == text and manifest.config() == config
    ok = id_a == id_b and same_bytes and round_trip and loaded == run_phase_sweep(config) and time.perf_counter() - t0 < 10
    verdict(12, ok, f"run ids {id_a} / {id_b}, identical CSV bytes {same_bytes}, manifest round trip {round_trip}", t0)
