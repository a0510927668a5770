"""Tests for run configuration loading and validation."""

import logging
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from src.config import (
    ConfigError,
    RunConfig,
    Tolerances,
    load_config,
    parse_tolerance_overrides,
)
from src.grid.gridfn import GridSpec
from src.reps.schrodinger import PhaseLattice, WaveGrid


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Keep PMECH_OUTDIR from leaking into tests."""
    monkeypatch.delenv("PMECH_OUTDIR", raising=False)


def test_defaults():
    """Test the default grid, lattice and ħ list."""
    config = RunConfig()
    extent = 2.0 * np.sqrt(2.0 * np.pi)
    assert config.grid == GridSpec(6.0, extent, extent, 32, 32, 32)
    assert config.lattice == PhaseLattice()
    assert config.hbar_list == [0.4, 0.2, 0.1, 0.05]
    assert config.outdir == Path("pmech-out")
    assert config.fixed_wave_grid is None


def test_matched_wave_grid_by_default():
    """Test that the wave grid follows ħ unless one is configured."""
    config = RunConfig()
    assert config.wave_grid(0.5) == WaveGrid.matched(config.grid, 0.5)
    assert config.wave_grid(0.5).N_v == 128


def test_configured_wave_grid():
    """Test that L_v and N_v fix the wave grid for every ħ."""
    config = RunConfig(L_v=8.0, N_v=64)
    assert config.wave_grid(0.5) == WaveGrid(8.0, 64)
    assert config.fixed_wave_grid == WaveGrid(8.0, 64)


@pytest.mark.parametrize("field,value", [
    ("N_x", 48),
    ("N_s", 8),
    ("N_v", 16),
    ("L_s", 0.0),
    ("hbar_list", [0.1, -0.1]),
    ("snapshots", 0),
    ("log_level", "LOUD"),
    ("catalog", ["gauss"]),
    ("catalog", ["gauss", "no_such_signal"]),
])
def test_invalid_values(field, value):
    """Test that invalid fields are rejected."""
    with pytest.raises(ValidationError):
        RunConfig(**{field: value})


def test_unknown_field_rejected():
    """Test that typos do not pass silently."""
    with pytest.raises(ValidationError):
        RunConfig(N_z=32)


def test_log_level_normalized():
    """Test that log levels are upper-cased."""
    assert RunConfig(log_level="debug").log_level == "DEBUG"


def test_tolerance_override():
    """Test replacing a tolerance by name."""
    tol = Tolerances().override({"bracket_jacobi": 1e-5})
    assert tol.bracket_jacobi == 1e-5
    assert tol.bracket_leibniz == Tolerances().bracket_leibniz


def test_tolerance_group_override():
    """Test that a group name sets every member and a named check wins over its group."""
    tol = Tolerances().override({"quadrature": 1e-15, "quantize_paths": 1e-2})
    assert tol.convolution_oracle == 1e-15
    assert tol.schrodinger_bracket_quantum == 1e-15
    assert tol.quantize_paths == 1e-2
    assert tol.convolution_associativity == Tolerances().convolution_associativity

    tol = Tolerances().override({"bracket": 1e-3})
    assert tol.bracket_jacobi == tol.bracket_leibniz == tol.bracket_antisymmetry == 1e-3
    assert set(Tolerances.groups()["oscillator"]) == {
        name for name in Tolerances.model_fields if name.startswith("oscillator_")
    }


def test_tolerance_override_errors():
    """Test unknown names and non-positive values."""
    with pytest.raises(ConfigError, match="Unknown tolerance"):
        Tolerances().override({"no_such_check": 1.0})
    with pytest.raises(ConfigError):
        Tolerances().override({"bracket_jacobi": -1.0})


def test_parse_tolerance_overrides():
    """Test NAME=VALUE parsing."""
    assert parse_tolerance_overrides(["a=1e-3", " b = 2 "]) == {"a": 1e-3, "b": 2.0}
    with pytest.raises(ConfigError):
        parse_tolerance_overrides(["missing_value"])
    with pytest.raises(ConfigError):
        parse_tolerance_overrides(["a=abc"])


def test_load_config_defaults():
    """Test loading without a file."""
    config = load_config()
    assert config.grid == RunConfig().grid


def test_load_config_file(tmp_path):
    """Test key=value files with lists and tolerance keys."""
    path = tmp_path / "run.cfg"
    path.write_text(
        "N_x=64\n"
        "hbar_list=0.4, 0.2, 0.1\n"
        "catalog=gauss,x_gauss\n"
        "L_v=none\n"
        "tol.bracket_jacobi=1e-5\n"
    )
    config = load_config(path)
    assert config.N_x == 64
    assert config.hbar_list == [0.4, 0.2, 0.1]
    assert config.catalog == ["gauss", "x_gauss"]
    assert config.L_v is None
    assert config.tolerances.bracket_jacobi == 1e-5


def test_overrides_beat_file(tmp_path):
    """Test that command-line values win and None values are skipped."""
    path = tmp_path / "run.cfg"
    path.write_text("seed=3\nN_y=64\n")
    config = load_config(path, {"seed": 7, "N_y": None}, {"quantize_paths": 1e-2})
    assert config.seed == 7
    assert config.N_y == 64
    assert config.tolerances.quantize_paths == 1e-2


def test_outdir_environment(monkeypatch, tmp_path):
    """Test PMECH_OUTDIR and its precedence below --out."""
    monkeypatch.setenv("PMECH_OUTDIR", str(tmp_path / "env"))
    assert load_config().outdir == tmp_path / "env"
    assert load_config(overrides={"outdir": tmp_path / "flag"}).outdir == tmp_path / "flag"


def test_load_config_errors(tmp_path):
    """Test missing files, bad values and bad tolerance keys."""
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.cfg")
    bad = tmp_path / "bad.cfg"
    bad.write_text("N_x=50\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tolerances={"no_such_check": 1.0})


def test_setup_logging(tmp_path):
    """Test that logging writes to the configured file."""
    log_file = tmp_path / "logs" / "pmech.log"
    config = RunConfig(log_level="DEBUG", log_file=str(log_file))
    config.setup_logging()
    logging.getLogger("src.test").debug("hello")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "hello" in log_file.read_text()
