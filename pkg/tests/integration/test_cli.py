"""Integration tests for the command-line interface."""

import json

import pandas as pd
import pytest
from click.testing import CliRunner

from aimkit.cli import cli

FAST_CONFIG = "start_iterations=10\nescalation_step=5\nscan_iterations=10\nscan_hi=8\n"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def fast_config(tmp_path):
    path = tmp_path / "fast.cfg"
    path.write_text(FAST_CONFIG, encoding="utf-8")
    return str(path)


@pytest.mark.integration
def test_diagnose_distinct_moduli(runner, tmp_path):
    """Test diagnose on lambda0 = 3, s0 = -2."""
    result = runner.invoke(cli, ["diagnose", "--lambda0", "3", "--s0", "-2", "--n", "40", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert "DISTINCT_MODULI" in result.output
    frame = pd.read_csv(tmp_path / "diagnostics.csv", dtype=str)
    assert len(frame) == 40
    assert abs(float(frame["Re(alpha)"].iloc[-1]) + 1) < 1e-10
    assert "DISTINCT_MODULI" in (tmp_path / "notes.txt").read_text(encoding="utf-8")


@pytest.mark.integration
def test_diagnose_equal_moduli_fails(runner, tmp_path):
    """Test that equal moduli are predicted to fail with exit 3."""
    result = runner.invoke(
        cli, ["diagnose", "--lambda0", "2*cos(pi/8)", "--s0", "-1", "--n", "150", "--out", str(tmp_path)]
    )
    assert result.exit_code == 3
    assert "EQUAL_MODULI_FAILURE" in result.output


@pytest.mark.integration
def test_diagnose_complex_family(runner, tmp_path):
    """Test that alpha_n approaches 2 for lambda0 = 2i, s0 = 4 + 4i."""
    result = runner.invoke(
        cli, ["diagnose", "--lambda0", "2*i", "--s0", "4+4*i", "--n", "50", "--out", str(tmp_path), "--plot"]
    )
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "diagnostics.csv", dtype=str)
    assert abs(float(frame["Re(alpha)"].iloc[-1]) - 2) < 1e-6
    assert abs(float(frame["Im(alpha)"].iloc[-1])) < 1e-6
    assert "exp(-2x)" in (tmp_path / "notes.txt").read_text(encoding="utf-8")
    assert (tmp_path / "alpha.svg").exists()
    assert (tmp_path / "metric.svg").exists()


@pytest.mark.integration
def test_diagnose_terminating_ladder(runner, tmp_path):
    """Test the terminated verdict for lambda0 = 2x, s0 = -4."""
    result = runner.invoke(cli, ["diagnose", "--lambda0", "2*x", "--s0", "-4", "--n", "10", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert "TERMINATED" in result.output


@pytest.mark.integration
def test_diagnose_taylor_method(runner, tmp_path):
    """Test the series method on a non-constant problem."""
    result = runner.invoke(
        cli,
        ["diagnose", "--lambda0", "2*x", "--s0", "-5 + x^2/3", "--n", "10", "--method", "taylor", "--out", str(tmp_path)],
    )
    assert result.exit_code in (0, 3)
    assert len(pd.read_csv(tmp_path / "diagnostics.csv")) == 10


@pytest.mark.integration
def test_diagnose_parse_error(runner, tmp_path):
    """Test exit 2 on a malformed expression."""
    result = runner.invoke(cli, ["diagnose", "--lambda0", "2*x +", "--s0", "1", "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert "position" in result.output


@pytest.mark.integration
def test_diagnose_missing_argument(runner, tmp_path):
    """Test exit 2 when s0 is missing."""
    result = runner.invoke(cli, ["diagnose", "--lambda0", "3", "--out", str(tmp_path)])
    assert result.exit_code == 2


@pytest.mark.integration
def test_degenerate_lambda0(runner, tmp_path):
    """Test exit 5 for lambda0 = 0."""
    result = runner.invoke(cli, ["diagnose", "--lambda0", "0", "--s0", "1", "--out", str(tmp_path)])
    assert result.exit_code == 5


@pytest.mark.integration
def test_config_file_supplies_flags(runner, tmp_path):
    """Test that non-setting keys in --config fill missing flags."""
    config = tmp_path / "problem.cfg"
    config.write_text("lambda0=3\ns0=-2\nprec=128\n", encoding="utf-8")
    result = runner.invoke(cli, ["diagnose", "--config", str(config), "--n", "5", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output


@pytest.mark.integration
def test_config_file_uses_flag_spelling(runner, tmp_path):
    """Test that a config key named after a flag (n for --n) fills it."""
    config = tmp_path / "problem.cfg"
    config.write_text("lambda0=3\ns0=-2\nn=7\n", encoding="utf-8")
    result = runner.invoke(cli, ["diagnose", "--config", str(config), "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert len(pd.read_csv(tmp_path / "diagnostics.csv", dtype=str)) == 7

    config.write_text("lambda0=2*x\ns0=-5\nn=2\n", encoding="utf-8")
    result = runner.invoke(cli, ["chain", "--config", str(config), "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    payload = json.loads((tmp_path / "chain.json").read_text(encoding="utf-8"))
    assert [link["level"] for link in payload["links"]] == [1, 2]


@pytest.mark.integration
def test_config_file_unknown_key(runner, tmp_path):
    """Test exit 2 for an unknown config key."""
    config = tmp_path / "bad.cfg"
    config.write_text("colour=blue\n", encoding="utf-8")
    result = runner.invoke(cli, ["diagnose", "--config", str(config), "--lambda0", "3", "--s0", "-2"])
    assert result.exit_code == 2
    assert "colour" in result.output
    assert "n_max" not in result.output


@pytest.mark.integration
def test_classify(runner):
    """Test classify exit codes."""
    assert runner.invoke(cli, ["classify", "--lambda0", "3", "--s0", "-2"]).exit_code == 0
    result = runner.invoke(cli, ["classify", "--lambda0", "2", "--s0", "-2"])
    assert result.exit_code == 3
    assert "EqualModuliDistinct" in result.output
    assert runner.invoke(cli, ["classify", "--lambda0", "2*x", "--s0", "1"]).exit_code == 2


@pytest.mark.integration
def test_chain_hermite_links(runner, tmp_path):
    """Test chain.json for lambda0 = 2x, s0 = -5."""
    result = runner.invoke(cli, ["chain", "--lambda0", "2*x", "--s0", "-5", "--n", "3", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    payload = json.loads((tmp_path / "chain.json").read_text(encoding="utf-8"))
    assert [link["level"] for link in payload["links"]] == [1, 2, 3]
    first = payload["links"][0]
    assert first["deltaNumeratorCoeffs"] == ["15/4"]
    assert first["deltaDenominatorCoeffs"] == ["0", "0", "1"]
    assert payload["terminatedAt"] is None
    assert payload["rounding"] == "truncate"


@pytest.mark.integration
def test_chain_terminates(runner, tmp_path):
    """Test that s0 = -3 mu terminates the chain at level 3."""
    result = runner.invoke(cli, ["chain", "--lambda0", "2*x", "--s0", "-6", "--n", "3", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    payload = json.loads((tmp_path / "chain.json").read_text(encoding="utf-8"))
    assert payload["terminatedAt"] == 3
    assert payload["links"][2]["terminated"]
    assert payload["links"][2]["deltaNumeratorCoeffs"] == []


@pytest.mark.integration
def test_chain_is_deterministic(runner, tmp_path):
    """Test byte-identical output across runs."""
    args = ["chain", "--lambda0", "2*x", "--s0", "1 - x^2", "--n", "2"]
    runner.invoke(cli, args + ["--out", str(tmp_path / "a")])
    runner.invoke(cli, args + ["--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "chain.json").read_bytes() == (tmp_path / "b" / "chain.json").read_bytes()


@pytest.mark.integration
def test_solve_eigen_harmonic(runner, tmp_path, fast_config):
    """Test the harmonic spectrum 1, 3, 5."""
    result = runner.invoke(
        cli,
        ["solve-eigen", "--A", "0", "--levels", "3", "--digits", "12", "--prec", "256", "--trace",
         "--config", fast_config, "--out", str(tmp_path)],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads((tmp_path / "spectrum.json").read_text(encoding="utf-8"))
    assert payload["A"] == "0"
    assert payload["digits"] == 12
    energies = [float(level["E"]) for level in payload["levels"]]
    assert energies == pytest.approx([1, 3, 5], abs=1e-12)
    assert all(level["seconds"] is None for level in payload["levels"])
    assert (tmp_path / "escalation.csv").read_text(encoding="utf-8").startswith("k,n,E\n")


@pytest.mark.integration
def test_solve_eigen_potential(runner, tmp_path, fast_config):
    """Test --potential x^2 with timing."""
    result = runner.invoke(
        cli,
        ["solve-eigen", "--potential", "x^2", "--levels", "1", "--digits", "12", "--prec", "256", "--timing",
         "--config", fast_config, "--out", str(tmp_path)],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads((tmp_path / "spectrum.json").read_text(encoding="utf-8"))
    assert payload["potential"] == "x^2"
    assert payload["levels"][0]["seconds"] is not None


@pytest.mark.integration
def test_solve_eigen_input_errors(runner, tmp_path):
    """Test exit 2 for conflicting or impossible requests."""
    both = runner.invoke(cli, ["solve-eigen", "--A", "0", "--potential", "x^2", "--out", str(tmp_path)])
    assert both.exit_code == 2
    neither = runner.invoke(cli, ["solve-eigen", "--out", str(tmp_path)])
    assert neither.exit_code == 2
    digits = runner.invoke(cli, ["solve-eigen", "--A", "0", "--digits", "100", "--prec", "256"])
    assert digits.exit_code == 2
    negative = runner.invoke(cli, ["solve-eigen", "--A", "-1", "--out", str(tmp_path)])
    assert negative.exit_code == 2


@pytest.mark.integration
def test_solve_eigen_not_stable(runner, tmp_path, fast_config):
    """Test exit 4 when the iteration cap is too low."""
    config = tmp_path / "capped.cfg"
    config.write_text(FAST_CONFIG + "max_iterations=15\n", encoding="utf-8")
    result = runner.invoke(
        cli,
        ["solve-eigen", "--A", "0.1", "--levels", "1", "--digits", "40", "--prec", "256",
         "--config", str(config), "--out", str(tmp_path)],
    )
    assert result.exit_code == 4
