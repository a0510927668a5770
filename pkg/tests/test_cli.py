"""Tests for the command-line interface and its exit codes."""

import json

import pytest
from typer.testing import CliRunner

import cli
from cli import EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, app
from src.dynamics.evolution import NumericalInstabilityError
from src.main import Application

runner = CliRunner()


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("PMECH_OUTDIR", raising=False)


def test_version():
    """Test the version panel."""
    result = runner.invoke(app, ["version"])
    assert result.exit_code == EXIT_OK
    assert "pmech" in result.output


def test_verify_single_suite(tmp_path):
    """Test a passing suite and its report."""
    result = runner.invoke(app, ["verify", "--suite", "bargmann", "--out", str(tmp_path), "--no-timings"])
    assert result.exit_code == EXIT_OK, result.output
    rows = json.loads((tmp_path / "verify" / "report.json").read_text())
    assert [r["check"] for r in rows] == sorted(r["check"] for r in rows)
    assert all(r["pass"] and r["runtime_ms"] == 0.0 for r in rows)
    assert all(r["check"].startswith("bargmann_") for r in rows)
    assert f"{len(rows)} passed, 0 failed" in result.output


def test_verify_controlled_failure(tmp_path):
    """Test that an unreachable tolerance gives exit 1."""
    result = runner.invoke(
        app, ["verify", "--suite", "bracket", "--tol", "bracket_leibniz=1e-300", "--out", str(tmp_path)]
    )
    assert result.exit_code == EXIT_CHECK_FAILED
    rows = json.loads((tmp_path / "verify" / "report.json").read_text())
    failed = [r["check"] for r in rows if not r["pass"]]
    assert failed == ["bracket_leibniz"]


def test_quadrature_tolerance_group(tmp_path):
    """Test that an unreachable tolerance on the quadrature checks fails only those checks."""
    result = runner.invoke(
        app, ["verify", "--suite", "convolution", "--tol", "quadrature=1e-300", "--out", str(tmp_path)]
    )
    assert result.exit_code == EXIT_CHECK_FAILED
    rows = json.loads((tmp_path / "verify" / "report.json").read_text())
    failed = [r["check"] for r in rows if not r["pass"]]
    assert failed == ["convolution_oracle"]


@pytest.mark.parametrize("args", [
    ["verify", "--suite", "nope"],
    ["verify", "--tol", "no_such_check=1e-3"],
    ["verify", "--tol", "malformed"],
    ["verify", "--config", "does-not-exist.cfg"],
    ["quantize", "no_such_signal"],
    ["correspondence", "--hbar", "0.4"],
])
def test_configuration_errors(tmp_path, args):
    """Test exit 2 on invalid configuration."""
    result = runner.invoke(app, args + ["--out", str(tmp_path)])
    assert result.exit_code == EXIT_CONFIG, result.output


def test_config_file_values(tmp_path):
    """Test that a bad value in the config file is a configuration error."""
    cfg = tmp_path / "run.cfg"
    cfg.write_text("N_x=33\n")
    result = runner.invoke(app, ["verify", "--config", str(cfg), "--out", str(tmp_path)])
    assert result.exit_code == EXIT_CONFIG


def test_quantize_outside_admissible_range(tmp_path):
    """Test exit 2 with the computed range in the message."""
    cfg = tmp_path / "run.cfg"
    cfg.write_text("L_v=4.0\nN_v=64\n")
    result = runner.invoke(app, ["quantize", "gauss", "--hbar", "1.0", "--config", str(cfg), "--out", str(tmp_path)])
    assert result.exit_code == EXIT_CONFIG
    assert "admissible" in result.output


def test_quantize_writes_operators(tmp_path):
    """Test a quantization run and its files."""
    result = runner.invoke(app, ["quantize", "shifted_gauss", "--hbar", "0.5", "--out", str(tmp_path)])
    assert result.exit_code == EXIT_OK, result.output
    for name in ("rep.bin", "rep.json", "weyl.bin", "weyl.json", "report.json"):
        assert (tmp_path / "quantize" / "shifted_gauss" / name).exists()


def test_oscillator_cfl_violation(tmp_path):
    """Test that an unstable step is refused as a configuration error."""
    result = runner.invoke(app, ["oscillator", "--t-end", "1.0", "--dt", "0.5", "--out", str(tmp_path)])
    assert result.exit_code == EXIT_CONFIG


def test_oscillator_numerical_abort(tmp_path, mocker):
    """Test exit 3 when the integration blows up."""
    mocker.patch.object(Application, "oscillator", side_effect=NumericalInstabilityError("norm grew"))
    result = runner.invoke(app, ["oscillator", "--out", str(tmp_path)])
    assert result.exit_code == EXIT_NUMERICAL
    assert "Numerical abort" in result.output


def test_seed_is_passed_through(tmp_path, mocker):
    """Test that --seed reaches the configuration."""
    spy = mocker.spy(cli, "load_config")
    runner.invoke(app, ["verify", "--suite", "heisenberg", "--seed", "7", "--out", str(tmp_path)])
    config = spy.spy_return
    assert config.seed == 7
    assert config.outdir == tmp_path
