"""Tests for wdd_retrieval.cli."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from wdd_retrieval.cli import MASK_FIELDS, REPORT_FIELDS, main

# ---------------------------------------------------------------------------
# Helpers / fixtures
# ---------------------------------------------------------------------------


@pytest.fixture()
def runner():
    return CliRunner()


def _report_line(output: str) -> list[str]:
    """The values line printed after the report header."""
    lines = output.splitlines()
    return lines[lines.index(REPORT_FIELDS) + 1].split(",")


def _simulate(runner, *args):
    result = runner.invoke(main, ["simulate", *args, "--out", "sim"])
    assert result.exit_code == 0, result.output
    return result


def _recover(runner, *args):
    return runner.invoke(
        main,
        [
            "recover",
            "--measurements",
            "sim/measurements.csv",
            "--mask",
            "sim/mask.csv",
            *args,
        ],
    )


# ---------------------------------------------------------------------------
# simulate / recover
# ---------------------------------------------------------------------------


class TestSimulateRecover:
    def test_alg1_round_trip(self, runner):
        with runner.isolated_filesystem():
            _simulate(runner, "--preset", "alg1-d60", "--seed", "4")
            result = _recover(runner, "--truth", "sim/truth.csv", "--out", "est.csv")
            assert result.exit_code == 0, result.output
            alg, d, K, L, error, runtime = _report_line(result.output)
            assert (alg, d, K, L) == ("alg1", "60", "60", "15")
            assert float(error) <= -120
            assert float(runtime) >= 0
            assert Path("est.csv").exists()

    def test_lemma11_inferred_from_layout(self, runner):
        with runner.isolated_filesystem():
            _simulate(runner, "--preset", "lemma11-d247", "--seed", "3")
            result = _recover(runner, "--truth", "sim/truth.csv")
            assert result.exit_code == 0, result.output
            fields = _report_line(result.output)
            assert fields[0] == "lemma11"
            assert float(fields[4]) <= -120

    def test_alg2_pinv(self, runner):
        with runner.isolated_filesystem():
            _simulate(runner, "--preset", "alg2-d190", "--seed", "1")
            result = _recover(runner, "--truth", "sim/truth.csv", "--solver", "pinv")
            assert result.exit_code == 0, result.output
            fields = _report_line(result.output)
            assert fields[:4] == ["alg2", "190", "95", "19"]
            assert float(fields[4]) <= -100

    def test_without_truth_error_is_blank(self, runner):
        with runner.isolated_filesystem():
            _simulate(runner, "--alg", "alg1", "--d", "60", "--L", "15", "--seed", "2")
            result = _recover(runner)
            assert result.exit_code == 0, result.output
            assert _report_line(result.output)[4] == ""

    def test_summary_panel(self, runner):
        with runner.isolated_filesystem():
            _simulate(runner, "--preset", "alg1-d60", "--seed", "4", "--snr", "40")
            result = _recover(runner, "--truth", "sim/truth.csv", "--summary")
            assert result.exit_code == 0, result.output
            assert "Recovery Summary" in result.output

    def test_noiseless_header_records_trial_seed(self, runner):
        with runner.isolated_filesystem():
            _simulate(runner, "--preset", "alg1-d60", "--seed", "4")
            header = Path("sim/measurements.csv").read_text().splitlines()[0]
            assert "seed=none" in header
            assert header.endswith("trial_seed=4")

    def test_fresh_seed_is_reported(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ["simulate", "--preset", "alg1-d60", "--out", "sim"])
            assert result.exit_code == 0, result.output
            assert "seed=" in result.output

    def test_non_divisor_exits_2(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(
                main, ["simulate", "--alg", "alg1", "--d", "60", "--L", "7", "--seed", "1"]
            )
            assert result.exit_code == 2
            assert "error: L must divide d" in result.output

    def test_missing_mask_file_exits_2(self, runner):
        with runner.isolated_filesystem():
            _simulate(runner, "--preset", "alg1-d60", "--seed", "4")
            result = runner.invoke(
                main, ["recover", "--measurements", "sim/measurements.csv", "--mask", "nope.csv"]
            )
            assert result.exit_code == 2

    def test_wrong_algorithm_for_mask_exits_2(self, runner):
        with runner.isolated_filesystem():
            _simulate(runner, "--preset", "alg1-d60", "--seed", "4")
            result = _recover(runner, "--alg", "lemma11")
            assert result.exit_code == 2
            assert "error: [lemma11/setup]" in result.output


# ---------------------------------------------------------------------------
# sweep / bench
# ---------------------------------------------------------------------------


class TestSweep:
    def test_json_rows_and_csv(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(
                main,
                [
                    "sweep",
                    "--alg",
                    "alg1",
                    "--d",
                    "60",
                    "--L",
                    "15",
                    "--snr",
                    "40",
                    "--snr",
                    "60",
                    "--trials",
                    "2",
                    "--seed",
                    "1",
                    "--threads",
                    "2",
                    "--json",
                ],
            )
            assert result.exit_code == 0, result.output
            rows = json.loads(result.output)
            assert [r["snr_db"] for r in rows] == [40.0, 60.0]
            assert all(r["trials"] == 2 for r in rows)
            assert Path("sweep.csv").read_text().splitlines()[0] == (
                "snr_db,algorithm,mean_error_db,median_error_db,trials"
            )

    def test_config_file(self, runner):
        with runner.isolated_filesystem():
            Path("sweep.cfg").write_text(
                "# tiny sweep\nalg = alg1\nd = 60\nL = 15\nsnr = 30, 50\n"
                "trials = 1\nseed = 2\nthreads = 1\n"
            )
            result = runner.invoke(main, ["sweep", "--config", "sweep.cfg", "--out", "s.csv"])
            assert result.exit_code == 0, result.output
            assert "Noise Sweep" in result.output
            assert len(Path("s.csv").read_text().splitlines()) == 3

    def test_invalid_config_exits_2(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(
                main, ["sweep", "--alg", "alg1", "--d", "60", "--L", "20", "--seed", "1"]
            )
            assert result.exit_code == 2
            assert "error:" in result.output


class TestBench:
    def test_requires_d(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ["bench"])
            assert result.exit_code == 2

    def test_writes_rows(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ["bench", "--d", "64", "--trials", "1", "--seed", "0"])
            assert result.exit_code == 0, result.output
            assert "Runtime Benchmark" in result.output
            lines = Path("bench.csv").read_text().splitlines()
            assert lines[0] == "d,algorithm,mean_runtime_s"
            assert lines[1].startswith("66,alg1,")


# ---------------------------------------------------------------------------
# masks / selfcheck
# ---------------------------------------------------------------------------


class TestMasks:
    def test_default_mask_line(self, runner):
        result = runner.invoke(main, ["masks"])
        assert result.exit_code == 0, result.output
        lines = result.output.splitlines()
        assert lines[0] == MASK_FIELDS
        kind, d, support, mu, admissible = lines[1].split(",")
        assert (kind, d, support, admissible) == ("exp_bandlimited", "60", "8", "false")
        assert float(mu) == pytest.approx(2.267e-2, rel=0.02)

    def test_writes_mask_file(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(
                main,
                ["masks", "--kind", "exp_compact", "--d", "247", "--delta", "10", "--out", "m.csv"],
            )
            assert result.exit_code == 0, result.output
            assert float(result.output.splitlines()[1].split(",")[3]) == pytest.approx(
                1.392e-2, rel=0.02
            )
            assert Path("m.csv").read_text().startswith("# kind=exp_compact")

    def test_bad_length_exits_2(self, runner):
        result = runner.invoke(main, ["masks", "--d", "10", "--rho", "20"])
        assert result.exit_code == 2


class TestSelfcheck:
    def test_passing_suites(self, runner):
        result = runner.invoke(main, ["selfcheck", "--suite", "transforms", "--suite", "swap"])
        assert result.exit_code == 0, result.output
        assert "PASS" in result.output

    def test_injected_failure(self, runner):
        result = runner.invoke(
            main, ["selfcheck", "--suite", "lag_spectrum", "--inject", "lag_spectrum"]
        )
        assert result.exit_code == 1
        assert "FAILED: lag_spectrum" in result.output

    def test_inject_rejects_suites_without_sign_hook(self, runner):
        result = runner.invoke(main, ["selfcheck", "--suite", "swap", "--inject", "swap"])
        assert result.exit_code == 2

    def test_json_output(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(
                main, ["selfcheck", "--suite", "convolution", "--json", "--out", "checks.json"]
            )
            assert result.exit_code == 0, result.output
            payload = json.loads(result.output)
            assert payload[0]["name"] == "convolution"
            assert payload[0]["passed"] is True
            assert json.loads(Path("checks.json").read_text()) == payload
