"""Command-line front end.

Every subcommand reads its parameters from an optional INI file section of
the same name, then from ``--set KEY=VALUE`` overrides, then from the
``--seed`` / ``--workers`` shortcuts.  Numeric results are written as CSV
files into the output directory (``--out``, else ``$RSOLAB_OUT``, else
``./rsolab-out``); one summary line per table goes to standard output.

Exit codes: 0 success, 1 computational failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    ConditioningError,
    ConfigError,
    ConvergenceError,
    DomainError,
    FactorizationError,
    InsufficientRangeError,
    PreconditionError,
    SizeError,
    ThresholdDegeneracyError,
)
from .harness.config import ExperimentConfig, format_value, parse_float, parse_floats, parse_int, parse_ints

OUT_ENV = "RSOLAB_OUT"
DEFAULT_OUT = "rsolab-out"

EXIT_OK = 0
EXIT_COMPUTE = 1
EXIT_USAGE = 2

HARNESS_COMMANDS = ("localize", "phase-sweep", "wegner")


def _word(text: str) -> str:
    return text.strip()


# per-subcommand keys: name -> (parser, default)
SCHEMAS: dict[str, dict] = {
    "sample": {
        "d": (parse_int, 1), "alpha": (parse_float, 1.0), "delta": (parse_float, 1.0),
        "L": (parse_int, 20), "seed": (parse_int, 0),
    },
    "events": {
        "d": (parse_int, 1), "alpha": (parse_float, 1.0), "delta": (parse_float, 1.0),
        "center": (parse_ints, (10,)), "k": (parse_int, 1), "eps": (parse_float, 0.1),
        "lam": (parse_float, math.nan), "trials": (parse_int, 10000), "seed": (parse_int, 0),
    },
    "spectrum": {
        "d": (parse_int, 1), "alpha": (parse_float, 1.0), "delta": (parse_float, 1.0),
        "L": (parse_int, 20), "M": (parse_int, 4), "seed": (parse_int, 0), "k": (parse_int, 10),
        "tol": (parse_float, 1e-10), "method": (_word, "lanczos"),
    },
    "count": {
        "d": (parse_int, 1), "alpha": (parse_float, 1.0), "delta": (parse_float, 1.0),
        "L": (parse_int, 20), "M": (parse_int, 8), "seed": (parse_int, 0), "eps": (parse_float, 0.1),
    },
    "green": {
        "d": (parse_int, 1), "L_ladder": (parse_ints, (12, 18, 24, 30)), "M": (parse_int, 4),
        "energy": (parse_float, -1.0), "potential": (parse_float, 0.0), "tol": (parse_float, 1e-10),
    },
    "weyl": {
        "energy": (parse_float, 0.0), "k": (parse_floats, (0.0,)), "radii": (parse_floats, (4.0, 8.0, 16.0, 32.0)),
        "M": (parse_int, 20),
    },
    "well-curve": {
        "d": (parse_int, 1), "lambdas": (parse_floats, (-50.0, -20.0, -10.0, -5.0, -2.0, -0.5)),
        "L": (parse_int, 40), "M": (parse_int, 20),
    },
    "hf-check": {
        "d": (parse_int, 1), "lam": (parse_float, -5.0), "dlam": (parse_float, 1e-3),
        "L": (parse_int, 40), "M": (parse_int, 20),
    },
    "cook": {
        "d": (parse_int, 1), "alpha": (parse_float, 2.0), "delta": (parse_float, 3.0),
        "L": (parse_int, 402), "seed": (parse_int, 0), "m_exponent": (parse_float, 1.0),
        "radii": (parse_ints, (50, 100, 200)),
    },
}
COMMANDS = tuple(SCHEMAS) + HARNESS_COMMANDS


def default_values(command: str) -> dict:
    if command in HARNESS_COMMANDS:
        return {}
    return {k: default for k, (_p, default) in SCHEMAS[command].items()}


def parse_params(command: str, mapping: dict) -> dict | ExperimentConfig:
    """Typed parameters for ``command`` from string values; unknown keys are rejected."""
    if command in HARNESS_COMMANDS:
        return ExperimentConfig.from_mapping(mapping)
    schema = SCHEMAS[command]
    params = default_values(command)
    for key, text in mapping.items():
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} for {command} (known: {', '.join(schema)})")
        try:
            params[key] = schema[key][0](str(text))
        except ValueError as exc:
            raise ConfigError(f"cannot parse {command} key {key!r} = {text!r}: {exc}") from None
    return params


def serialize_params(command: str, params) -> dict[str, str]:
    if isinstance(params, ExperimentConfig):
        return params.to_mapping()
    return {k: format_value(v) for k, v in params.items()}


def read_config(path, command: str) -> dict[str, str]:
    """The ``[command]`` section of an INI file as raw strings (empty if absent)."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from None
    if not parser.has_section(command):
        return {}
    return dict(parser.items(command))


def write_config(path, command: str, mapping: dict[str, str]):
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser[command] = mapping
    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)


def _overrides(items) -> dict[str, str]:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rsolab",
        description="Finite-volume experiments on random Schroedinger operators with decaying fat-tailed couplings.",
        epilog=f"Output directory defaults to ${OUT_ENV}, else ./{DEFAULT_OUT}.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", metavar="PATH", help=f"INI file; section [{name}] is read")
        p.add_argument("--set", metavar="KEY=VALUE", action="append", default=[], help="override a key (repeatable)")
        p.add_argument("--out", metavar="DIR", help="output directory")
        p.add_argument("--seed", type=int, help="override the seed key")
        p.add_argument("--workers", type=int, help="worker processes for ensemble commands")
    return parser


_HELP = {
    "sample": "sample the potential on a box",
    "events": "exact, bound and Monte Carlo probabilities of a deep-well event",
    "spectrum": "lowest eigenvalues of one realization",
    "count": "eigenvalue count below -eps against the per-cell Neumann bound",
    "localize": "localization study over an ensemble",
    "green": "boundary resolvent norms over a ladder of box sides",
    "weyl": "residuals of spreading plane-wave packets",
    "well-curve": "ground-state curve of the single unit-cell well",
    "hf-check": "derivative of the well ground energy against its occupation",
    "cook": "partial sums of the potential integrability probe",
    "phase-sweep": "growth of negative-eigenvalue counts across box sides",
    "wegner": "probability of an eigenvalue near a fixed energy",
}


# --------------------------------------------------------------------------
# outputs


def _write_csv(out: Path, name: str, header, rows) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def _params_model(p):
    from .disorder import ModelParams

    return ModelParams(p["d"], p["alpha"], p["delta"])


def _cmd_sample(p, out):
    from .disorder import realize_field
    from .lattice import Box

    field = realize_field(p["seed"], _params_model(p), Box.centered(p["d"], p["L"]))
    sites = field.box.sites()
    d = p["d"]
    rows = [tuple(int(x) for x in s) + (float(w), float(v)) for s, w, v in zip(sites, field.omega.ravel(), field.values.ravel())]
    path = _write_csv(out, "sample", [f"n{i}" for i in range(d)] + ["omega", "v"], rows)
    v = field.values
    return [f"sample: {v.size} sites, min v {v.min():.6g}, max v {v.max():.6g} -> {path}"]


def _cmd_events(p, out):
    from .disorder import (
        EventSpec,
        event_probability_exact,
        event_probability_mc,
        tail_lower_bound,
        rigorous_lower_bound,
    )

    center = tuple(p["center"])
    if len(center) != p["d"]:
        raise ConfigError(f"key 'center' has {len(center)} entries, expected d = {p['d']}")
    if math.isnan(p["lam"]):
        spec = EventSpec(center, p["k"], p["eps"])
    else:
        spec = EventSpec.well(center, p["k"], p["eps"], p["lam"])
    params = _params_model(p)
    exact = event_probability_exact(spec, params)
    mc = event_probability_mc(spec, params, p["seed"], p["trials"])
    lower = tail_lower_bound(spec, params)
    rigorous = rigorous_lower_bound(spec, params)
    path = _write_csv(
        out, "events", ["exact", "mc_estimate", "mc_halfwidth", "lower_bound_half", "lower_bound_rigorous"],
        [(exact, mc.estimate, mc.halfwidth, lower, rigorous)],
    )
    return [f"events: exact {exact:.6g}, MC {mc.estimate:.6g} +/- {mc.halfwidth:.2g} -> {path}"]


def _cmd_spectrum(p, out):
    from .disorder import realize_field
    from .lattice import Box, Grid
    from .operator import assemble
    from .spectral import dense_eig, lanczos_smallest

    box = Box.centered(p["d"], p["L"])
    op = assemble(realize_field(p["seed"], _params_model(p), box), box, Grid(p["M"]))
    if p["method"] == "dense":
        vals = dense_eig(op).eigenvalues[: p["k"]]
    elif p["method"] == "lanczos":
        vals = lanczos_smallest(op, p["k"], tol=p["tol"], seed=p["seed"]).eigenvalues
    else:
        raise ConfigError(f"key 'method' must be 'lanczos' or 'dense', got {p['method']!r}")
    path = _write_csv(out, "spectrum", ["index", "eigenvalue"], enumerate(vals))
    return [f"spectrum: {len(vals)} eigenvalues, lowest {vals[0]:.10g} -> {path}"]


def _cmd_count(p, out):
    from .disorder import realize_field
    from .lattice import Box, Grid
    from .spectral import counting_upper_bound

    box = Box.centered(p["d"], p["L"])
    field = realize_field(p["seed"], _params_model(p), box)
    bound = counting_upper_bound(field, box, Grid(p["M"]), p["eps"])
    path = _write_csv(out, "count", ["eps", "dirichlet_count", "neumann_sum", "continuum_sum"],
                      [(p["eps"], bound.lhs, bound.rhs, bound.continuum)])
    return [f"count: N(-eps) = {bound.lhs} <= {bound.rhs} (per-cell sum) -> {path}"]


def _cmd_green(p, out):
    from .lattice import Box, Grid
    from .operator import assemble_constant
    from .spectral import greens_boundary_norm, spectral_distance

    rows = []
    for L in p["L_ladder"]:
        op = assemble_constant(p["potential"], Box.centered(p["d"], L), Grid(p["M"]))
        norm = greens_boundary_norm(op, p["energy"], tol=p["tol"])
        dist = spectral_distance(op, p["energy"], tol=p["tol"])
        rows.append((L, norm, dist))
    Ls, norms = np.array([r[0] for r in rows], float), np.array([r[1] for r in rows])
    slope = float(np.polyfit(Ls, np.log(norms), 1)[0]) if len(rows) > 1 else math.nan
    path = _write_csv(out, "green", ["L", "boundary_norm", "spectral_distance"], rows)
    return [f"green: log-norm slope per unit L {slope:.4g} over {len(rows)} sides -> {path}"]


def _cmd_weyl(p, out):
    from .analysis import loglog_slope, weyl_residual
    from .lattice import Grid

    rows = [(r, weyl_residual(p["energy"], p["k"], r, Grid(p["M"]))) for r in p["radii"]]
    slope = loglog_slope(*zip(*rows)) if len(rows) > 1 else math.nan
    path = _write_csv(out, "weyl", ["r", "residual_ratio"], rows)
    return [f"weyl: log-log slope {slope:.4g} over {len(rows)} scales -> {path}"]


def _well_box(p):
    from .lattice import Box

    return Box.centered(p["d"], p["L"])


def _cmd_well_curve(p, out):
    from .analysis import is_monotone, single_well_ground_curve
    from .lattice import Grid

    points = single_well_ground_curve(p["lambdas"], _well_box(p), Grid(p["M"]))
    rows = [(q.lam, q.energy, q.occupation, int(q.bound)) for q in points]
    path = _write_csv(out, "well_curve", ["lam", "energy", "occupation", "bound"], rows)
    bound = all(q.bound for q in points)
    return [f"well-curve: {len(points)} depths, all bound {bound}, monotone {is_monotone(points)} -> {path}"]


def _cmd_hf_check(p, out):
    from .analysis import hellmann_feynman_check
    from .lattice import Grid

    hf = hellmann_feynman_check(p["lam"], p["dlam"], _well_box(p), Grid(p["M"]))
    path = _write_csv(out, "hf_check", ["lam", "dlam", "derivative", "occupation", "discrepancy"],
                      [(p["lam"], p["dlam"], hf.derivative, hf.occupation, hf.discrepancy)])
    return [f"hf-check: dE/dlam {hf.derivative:.10g}, occupation {hf.occupation:.10g}, "
            f"relative discrepancy {hf.discrepancy:.3g} -> {path}"]


def _cmd_cook(p, out):
    from .analysis import cook_integral_probe
    from .disorder import realize_field
    from .lattice import Box

    field = realize_field(p["seed"], _params_model(p), Box.centered(p["d"], p["L"]))
    sums = cook_integral_probe(field, p["m_exponent"], p["radii"])
    path = _write_csv(out, "cook", ["R", "partial_sum"], zip(p["radii"], sums))
    return [f"cook: I(R_max) = {sums[-1]:.6g} over {len(sums)} radii -> {path}"]


def _run_harness(command, config: ExperimentConfig, out):
    from .harness import (
        RunManifest,
        run_localization_study,
        run_phase_sweep,
        run_wegner_probe,
        save_run,
    )

    runner = {"localize": run_localization_study, "phase-sweep": run_phase_sweep, "wegner": run_wegner_probe}[command]
    result = runner(config)
    run_id, paths = save_run(result, RunManifest.for_result(result), out)
    lines = []
    if command == "phase-sweep":
        for pt in result.points():
            means = ", ".join(f"L={L}: {m:.4g}" for L, m in pt.means.items())
            lines.append(f"phase-sweep: alpha={pt.alpha:g} delta={pt.delta:g} mean counts [{means}] "
                         f"g={pt.growth:.4g} -> {pt.classification}")
    elif command == "localize":
        lines.append(f"localize: {len(result.rows)} eigenfunctions, exponential fraction {result.pass_fraction:.4g}")
    else:
        lines.append(f"wegner: discarded {result.rows[0].discarded}, log-log slope {result.slope:.4g}, "
                     f"monotone {result.monotone}")
    lines.append(f"run {run_id}: " + ", ".join(str(p) for p in paths))
    return lines


_HANDLERS = {
    "sample": _cmd_sample,
    "events": _cmd_events,
    "spectrum": _cmd_spectrum,
    "count": _cmd_count,
    "green": _cmd_green,
    "weyl": _cmd_weyl,
    "well-curve": _cmd_well_curve,
    "hf-check": _cmd_hf_check,
    "cook": _cmd_cook,
}


def resolve_params(args) -> dict | ExperimentConfig:
    mapping = read_config(args.config, args.command) if args.config else {}
    mapping.update(_overrides(args.set))
    for flag in ("seed", "workers"):
        value = getattr(args, flag)
        if value is not None:
            known = ExperimentConfig.keys() if args.command in HARNESS_COMMANDS else SCHEMAS[args.command]
            if flag not in known:
                raise ConfigError(f"--{flag} does not apply to {args.command}")
            mapping[flag] = str(value)
    return parse_params(args.command, mapping)


def output_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        params = resolve_params(args)
        out = output_dir(args)
        if args.command in HARNESS_COMMANDS:
            lines = _run_harness(args.command, params, out)
        else:
            lines = _HANDLERS[args.command](params, out)
    except (ConfigError, PreconditionError, DomainError, SizeError, ThresholdDegeneracyError) as exc:
        print(f"rsolab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, FactorizationError, ConditioningError, InsufficientRangeError) as exc:
        print(f"rsolab {args.command}: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"rsolab {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    for line in lines:
        print(line)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
