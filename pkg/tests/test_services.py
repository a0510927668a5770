"""Tests for the verification, oscillator, quantization and correspondence services."""

import json
import math

import numpy as np
import pytest

from src.config import ConfigError, RunConfig, Tolerances
from src.reps.export import load_waveop
from src.reps.schrodinger import RepresentationError, ShiftOutOfRangeError
from src.services.correspondence import CorrespondenceService
from src.services.oscillator_run import OscillatorService
from src.services.quantizer import QuantizerService
from src.services.verifier import CheckResult, VerificationReport, VerifierService, measure, summarize


def test_check_names_are_tolerances(mock_config):
    """Test that every check has a tolerance of the same name."""
    verifier = VerifierService(mock_config)
    names = set(Tolerances.model_fields)
    assert verifier.suites == ["heisenberg", "convolution", "bracket", "schrodinger", "bargmann"]
    assert set(verifier.checks()) <= names
    assert verifier.checks(["bracket"]) == [
        "bracket_antisymmetry",
        "bracket_modes_agree",
        "bracket_antiderivative_convolution",
        "bracket_shift_commutation",
        "bracket_jacobi",
        "bracket_leibniz",
    ]


def test_unknown_suite(mock_config):
    """Test that unknown suite names are a configuration error."""
    with pytest.raises(ConfigError, match="Unknown suite"):
        VerifierService(mock_config).run(["nope"])


def test_check_result():
    """Test pass flags, including non-finite residuals."""
    assert CheckResult("a", 1e-9, 1e-8).passed
    assert not CheckResult("a", 1e-7, 1e-8).passed
    assert not CheckResult("a", float("nan"), 1.0).passed
    row = CheckResult("a", 0.5, 1.0, runtime_ms=12.3456).to_dict()
    assert row == {"check": "a", "residual": 0.5, "tolerance": 1.0, "pass": True, "runtime_ms": 12.346}
    assert CheckResult("a", 0.5, 1.0, 12.3).to_dict(timings=False)["runtime_ms"] == 0.0


def test_measure_times_the_check():
    """Test that measure records the residual and a runtime."""
    result = measure("x", lambda: 0.25, 1.0)
    assert result.residual == 0.25
    assert result.runtime_ms >= 0.0


def test_report_is_sorted():
    """Test report ordering by check name."""
    report = VerificationReport([CheckResult("b", 0.0, 1.0), CheckResult("a", 2.0, 1.0)])
    assert [r.check for r in report.results] == ["a", "b"]
    assert not report.passed
    assert [r.check for r in report.failures] == ["a"]
    assert summarize(report.results) == {"passed": 1, "failed": 1}


def test_heisenberg_suite_passes(mock_config):
    """Test the group and field checks at default tolerances."""
    report = VerifierService(mock_config).run(["heisenberg"])
    assert report.passed, report.to_json()
    assert len(report.results) == 4


def test_bracket_suite_passes(mock_config):
    """Test the bracket checks at default tolerances."""
    report = VerifierService(mock_config).run(["bracket"])
    assert report.passed, report.to_json()


def test_bargmann_suite_passes(mock_config):
    """Test the Fock checks at default tolerances."""
    report = VerifierService(mock_config).run(["bargmann"])
    assert report.passed, report.to_json()


def test_convolution_suite_passes(mock_config):
    """Test the convolution checks at default tolerances."""
    report = VerifierService(mock_config).run(["convolution"])
    assert report.passed, report.to_json()


@pytest.mark.slow
def test_schrodinger_suite_passes(mock_config):
    """Test the representation checks at default tolerances."""
    report = VerifierService(mock_config).run(["schrodinger"])
    assert report.passed, report.to_json()


def test_unreachable_tolerance_fails(mock_config):
    """Test that a tolerance below round-off is reported as a failure."""
    mock_config.tolerances = mock_config.tolerances.override({"bracket_jacobi": 1e-300})
    report = VerifierService(mock_config).run(["bracket"])
    assert [r.check for r in report.failures] == ["bracket_jacobi"]


def test_report_is_deterministic(mock_config, tmp_path):
    """Test byte-identical reports without timings."""
    verifier = VerifierService(mock_config)
    first = verifier.run(["heisenberg"]).write(tmp_path / "a.json", timings=False)
    second = verifier.run(["heisenberg"]).write(tmp_path / "b.json", timings=False)
    assert first.read_bytes() == second.read_bytes()
    rows = json.loads(first.read_text())
    assert set(rows[0]) == {"check", "residual", "tolerance", "pass", "runtime_ms"}


def test_on_check_callback(mock_config):
    """Test that progress is reported per check."""
    seen = []
    VerifierService(mock_config).run(["bargmann"], on_check=seen.append)
    assert [r.check for r in seen] == VerifierService(mock_config).checks(["bargmann"])


def test_quantize_paths_agree(mock_config, tmp_path):
    """Test both quantizations of a catalog Gaussian at ħ = 0.5 and their export."""
    service = QuantizerService(mock_config)
    result = service.quantize("shifted_gauss", 0.5)
    assert result.passed
    assert result.rep.grid.N_v == 128
    files = service.write(result, tmp_path / "q", timings=False)
    assert np.array_equal(load_waveop(files["rep"]).matrix, result.rep.matrix)
    summary = json.loads(files["report"].read_text())
    assert summary["checks"][0]["check"] == "quantize_paths"


def test_quantize_default_hbar(mock_config):
    """Test that ħ defaults to the configured value."""
    assert QuantizerService(mock_config).quantize("x_gauss").hbar == mock_config.quantize_hbar


def test_quantize_guards(tmp_path):
    """Test the admissible range message and non-positive ħ."""
    service = QuantizerService(RunConfig(L_v=4.0, N_v=64, outdir=tmp_path))
    with pytest.raises(ShiftOutOfRangeError, match="admissible range"):
        service.quantize("gauss", 1.0)
    with pytest.raises(RepresentationError):
        service.quantize("gauss", 0.0)


@pytest.mark.slow
def test_correspondence_order(mock_config):
    """Test second-order convergence of the quantum bracket's symbol."""
    result = CorrespondenceService(mock_config).run()
    assert result.check is not None
    assert result.slope == pytest.approx(2.0, abs=0.2)
    assert all(b < a for a, b in zip(result.residuals, result.residuals[1:]))


def test_correspondence_vanishing_brackets(mock_config, tmp_path):
    """Test that equal observables give zero residuals and no fit."""
    service = CorrespondenceService(mock_config)
    result = service.run(["gauss", "gauss"])
    assert max(result.residuals) == 0.0
    assert result.slope is None and result.passed
    files = service.write(result, tmp_path / "c")
    lines = files["csv"].read_text().splitlines()
    assert lines[0] == "hbar,residual"
    assert len(lines) == 5


@pytest.mark.parametrize("hbars", [[0.4], [0.4, 0.2, 0.1], [0.4, 0.2, 0.2, 0.1], [0.05, 0.1, 0.2, 0.4]])
def test_correspondence_needs_decreasing_list(tmp_path, hbars):
    """Test the ħ list guard."""
    config = RunConfig(hbar_list=hbars, outdir=tmp_path)
    with pytest.raises(ConfigError):
        CorrespondenceService(config).run()


@pytest.mark.slow
def test_oscillator_run(mock_config, tmp_path):
    """Test a full oscillator period and its written outputs."""
    service = OscillatorService(mock_config)
    result = service.run(math.pi, math.pi / 400)
    assert result.passed, result.report.to_json()
    assert len(result.trajectory) == 51
    assert result.rows[-1]["recurrence_residual"] < 1e-5
    assert "heisenberg_residual" not in result.rows[0]
    assert result.rows[2]["heisenberg_residual"] < 1e-2
    files = service.write(result, tmp_path / "osc", timings=False)
    header = files["trajectory"].read_text().splitlines()[0]
    assert header == "t,l2_norm,transport_residual,heisenberg_residual,hamilton_residual,recurrence_residual"


def test_oscillator_argument_guard(mock_config):
    """Test negative final times and non-positive steps."""
    with pytest.raises(ConfigError):
        OscillatorService(mock_config).run(-0.1, 0.01)
    with pytest.raises(ConfigError):
        OscillatorService(mock_config).run(1.0, 0.0)


def test_oscillator_zero_time(mock_config, mocker):
    """Test that t_end = 0 returns the initial observable as the only snapshot."""
    mocker.patch.object(OscillatorService, "_period_residual", return_value=0.0)
    service = OscillatorService(mock_config)
    result = service.run(0.0, math.pi / 400)
    assert len(result.trajectory) == 1
    assert result.trajectory[0].t == 0.0
    assert result.trajectory[0].f.distance(service.initial_observable()) == 0.0
    assert result.rows[0]["transport_residual"] == 0.0
    assert not result.consistency.applicable
    assert result.passed


def test_oscillator_short_run_skips_consistency(mock_config, mocker, tmp_path):
    """Test that a run with fewer than five snapshots reports no consistency checks."""
    mocker.patch.object(OscillatorService, "_period_residual", return_value=0.0)
    service = OscillatorService(mock_config)
    dt = math.pi / 400
    result = service.run(3 * dt, dt)
    assert len(result.trajectory) == 4
    names = {r.check for r in result.report.results}
    assert names == {"oscillator_transport", "oscillator_period"}
    assert result.consistency.as_dict()["heisenberg_residual"] is None
    files = service.write(result, tmp_path / "osc", timings=False)
    summary = json.loads(files["report"].read_text())
    assert summary["consistency"]["applicable"] is False
    assert summary["snapshots"] == 4
