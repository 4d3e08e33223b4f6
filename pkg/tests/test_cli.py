import csv
from pathlib import Path

import pytest

from rsolab import __version__
from rsolab.cli import (
    COMMANDS,
    HARNESS_COMMANDS,
    SCHEMAS,
    default_values,
    main,
    parse_params,
    read_config,
    serialize_params,
    write_config,
)
from rsolab.harness import ExperimentConfig, list_runs, load_run

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

# small, fast parameters for every analysis subcommand
FAST = {
    "sample": ["L=10"],
    "events": ["trials=200"],
    "spectrum": ["L=10", "M=2", "k=3"],
    "count": ["L=10", "M=2"],
    "green": ["L_ladder=6, 8", "M=2"],
    "weyl": ["radii=4, 8"],
    "well-curve": ["lambdas=-10, -5", "L=10", "M=4"],
    "hf-check": ["L=10", "M=4"],
    "cook": ["L=20", "radii=2, 5"],
    "localize": ["L_ladder=20", "K=2"],
    "phase-sweep": ["L_ladder=10, 20", "K=3"],
    "wegner": ["alphas=1.0", "deltas=2.0", "L_ladder=10", "M=2", "K=10"],
}


def _sets(items):
    return [arg for item in items for arg in ("--set", item)]


def test_help_and_version(capsys):
    assert main(["--help"]) == 0
    assert "SUBCOMMAND" in capsys.readouterr().out
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["frobnicate"]) == 2
    assert main([]) == 2


@pytest.mark.parametrize("command", COMMANDS)
def test_success_exit_zero(command, tmp_path, capsys):
    assert main([command, "--out", str(tmp_path), *_sets(FAST[command])]) == 0
    out = capsys.readouterr().out
    assert out.strip()
    assert any(tmp_path.iterdir())


@pytest.mark.parametrize("command", COMMANDS)
def test_unknown_key_exit_two(command, tmp_path, capsys):
    assert main([command, "--out", str(tmp_path), "--set", "nonsense=1"]) == 2
    assert "nonsense" in capsys.readouterr().err


@pytest.mark.parametrize("command", COMMANDS)
def test_malformed_value_exit_two(command, tmp_path, capsys):
    key = next(iter(SCHEMAS[command])) if command in SCHEMAS else "K"
    assert main([command, "--out", str(tmp_path), "--set", f"{key}=oops"]) == 2
    assert key in capsys.readouterr().err


def test_missing_config_file_exit_two(tmp_path, capsys):
    assert main(["sample", "--config", str(tmp_path / "none.cfg")]) == 2
    assert "none.cfg" in capsys.readouterr().err


def test_seed_flag_where_undefined(tmp_path):
    assert main(["weyl", "--out", str(tmp_path), "--seed", "3"]) == 2
    assert main(["sample", "--out", str(tmp_path), "--seed", "3", "--set", "L=10"]) == 0


def test_precondition_is_usage_error(tmp_path):
    # 4k > dimension for the Lanczos guard
    assert main(["spectrum", "--out", str(tmp_path), "--set", "L=4", "--set", "M=2", "--set", "k=3"]) == 2


def test_conditioning_failure_exit_one(tmp_path, capsys):
    args = ["alphas=10.0", "deltas=1.0", "L_ladder=2", "M=2", "K=3", "a_exponent=-8.9"]
    assert main(["wegner", "--out", str(tmp_path), *_sets(args)]) == 1
    assert "computation failed" in capsys.readouterr().err


def test_convergence_failure_exit_one(tmp_path, capsys):
    # a residual target far below rounding level is never met
    args = ["L=20", "M=4", "k=2", "tol=1e-300"]
    assert main(["spectrum", "--out", str(tmp_path), *_sets(args)]) == 1
    assert "did not converge" in capsys.readouterr().err


def test_unwritable_output_exit_one(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert main(["sample", "--out", str(blocker / "x"), "--set", "L=10"]) == 1


def test_env_var_sets_default_output(tmp_path, monkeypatch):
    monkeypatch.setenv("RSOLAB_OUT", str(tmp_path / "env"))
    assert main(["sample", "--set", "L=10"]) == 0
    assert (tmp_path / "env" / "sample.csv").exists()


def test_phase_sweep_end_to_end(tmp_path, capsys):
    assert main(["phase-sweep", "--config", str(CONFIGS / "transition_d1.cfg"), "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    for alpha in ("0.5", "3", "4"):
        assert f"alpha={alpha} " in out
    assert "growing" in out and "saturating" in out
    (run_id,) = list_runs(tmp_path)
    result, _ = load_run(tmp_path, run_id)
    with open(tmp_path / f"{run_id}.phase_sweep.csv") as fh:
        header = next(csv.reader(fh))
    assert header == ["alpha", "delta", "L", "realization", "seed", "count", "eps"]
    assert len(result.rows) == 3 * 2 * 200


def test_overrides_apply_after_config(tmp_path):
    cfg = tmp_path / "c.cfg"
    write_config(cfg, "sample", {"L": "12", "seed": "1"})
    assert main(["sample", "--config", str(cfg), "--set", "L=8", "--out", str(tmp_path)]) == 0
    with open(tmp_path / "sample.csv") as fh:
        assert sum(1 for _ in fh) == 1 + 8


def test_byte_identical_outputs(tmp_path):
    for sub in ("a", "b"):
        assert main(["count", "--out", str(tmp_path / sub), "--set", "L=10", "--set", "M=2"]) == 0
    assert (tmp_path / "a" / "count.csv").read_bytes() == (tmp_path / "b" / "count.csv").read_bytes()


@pytest.mark.parametrize("command", COMMANDS)
def test_config_round_trip(command, tmp_path):
    if command in HARNESS_COMMANDS:
        params = ExperimentConfig(alphas=(0.5, 3.0), L_ladder=(10, 40), etas=(1e-3, 0.5))
    else:
        params = default_values(command)
    path = tmp_path / "rt.cfg"
    write_config(path, command, serialize_params(command, params))
    again = parse_params(command, read_config(path, command))
    if isinstance(params, dict):  # NaN defaults compare unequal to themselves
        assert again.keys() == params.keys()
    else:
        assert again == params
    assert serialize_params(command, again) == serialize_params(command, params)


def test_shipped_configs_parse():
    for path in CONFIGS.glob("*.cfg"):
        for command in COMMANDS:
            parse_params(command, read_config(path, command))
