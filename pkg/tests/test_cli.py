import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from rovecover.cli import main
from rovecover.combinatorics import rational_from_json
from rovecover.subset_scheme import Params, coverage_pmf


def run_cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "rovecover", *argv],
        capture_output=True,
        text=True,
    )


def run_main(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDist:
    def test_json_envelope(self, capsys):
        code, out, err = run_main(
            capsys, "dist", "--scheme", "subset", "--n", "4", "--m", "2", "--k", "2"
        )
        assert code == 0
        assert err == ""
        envelope = json.loads(out)
        assert envelope["command"] == "dist"
        assert envelope["format_version"] == "1.0.0"
        assert envelope["params_echo"] == {"n": 4, "m": 2, "k": 2, "scheme": "subset"}
        pmf = {
            entry["t"]: rational_from_json(entry)
            for entry in envelope["result"]["pmf"]
        }
        assert pmf == {2: Fraction(1, 6), 3: Fraction(2, 3), 4: Fraction(1, 6)}

    def test_json_round_trip_is_exact(self, capsys):
        code, out, _ = run_main(
            capsys, "dist", "--scheme", "multinomial", "--n", "6", "--m", "3", "--k", "2"
        )
        assert code == 0
        envelope = json.loads(out)
        from rovecover.multinomial_scheme import multinomial_coverage_pmf

        exact = multinomial_coverage_pmf(Params(6, 3, 2))
        for entry in envelope["result"]["pmf"]:
            assert rational_from_json(entry) == exact.pmf[entry["t"]]

    def test_csv_output(self, capsys):
        code, out, _ = run_main(
            capsys, "dist", "--n", "4", "--m", "2", "--k", "2", "--format", "csv"
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [row["t"] for row in rows] == ["2", "3", "4"]
        reconstructed = {
            int(row["t"]): Fraction(int(row["num"]), int(row["den"])) for row in rows
        }
        assert reconstructed == dict(coverage_pmf(Params(4, 2, 2)).pmf)

    def test_ascending_t_order(self, capsys):
        _, out, _ = run_main(capsys, "dist", "--n", "9", "--m", "3", "--k", "3")
        ts = [entry["t"] for entry in json.loads(out)["result"]["pmf"]]
        assert ts == sorted(ts)

    def test_point_query(self, capsys):
        code, out, _ = run_main(
            capsys, "dist", "--n", "4", "--m", "2", "--k", "2", "--t", "3"
        )
        assert code == 0
        result = json.loads(out)["result"]
        assert result["t"] == 3
        assert rational_from_json(result["probability"]) == Fraction(2, 3)

    def test_point_query_outside_support_is_zero(self, capsys):
        code, out, _ = run_main(
            capsys, "dist", "--n", "4", "--m", "2", "--k", "2", "--t", "1"
        )
        assert code == 0
        assert rational_from_json(json.loads(out)["result"]["probability"]) == 0


class TestScalarCommands:
    def test_mean(self, capsys):
        code, out, _ = run_main(capsys, "mean", "--n", "4", "--m", "2", "--k", "2")
        assert code == 0
        assert rational_from_json(json.loads(out)["result"]["mean"]) == 3

    def test_tail(self, capsys):
        code, out, _ = run_main(
            capsys, "tail", "--n", "4", "--m", "2", "--k", "2", "--tau", "4"
        )
        assert code == 0
        assert rational_from_json(json.loads(out)["result"]["probability"]) == Fraction(1, 6)

    def test_stirling(self, capsys):
        code, out, _ = run_main(capsys, "stirling", "--N", "3", "--K", "2")
        assert code == 0
        assert json.loads(out)["result"]["value"] == "3"

    def test_bounds(self, capsys):
        code, out, _ = run_main(capsys, "bounds", "--n", "100", "--m", "5", "--k", "3")
        assert code == 0
        result = json.loads(out)["result"]
        assert rational_from_json(result["all_stages_markov_bound"]) == Fraction(3, 10)
        assert result["all_stages_clamped"] is False

    def test_theorem2(self, capsys):
        code, out, _ = run_main(capsys, "theorem2", "--n", "4", "--m", "2", "--k", "2")
        assert code == 0
        result = json.loads(out)["result"]
        assert result["all_hold"] is True
        assert [row["t"] for row in result["rows"]] == [2, 3, 4]

    def test_plan_expected(self, capsys):
        code, out, _ = run_main(capsys, "plan", "--n", "4", "--m", "2", "--alpha", "3/4")
        assert code == 0
        result = json.loads(out)["result"]
        assert result["k"] == 2
        assert result["verified_at_k_minus_1"] is True

    def test_plan_confident(self, capsys):
        code, out, _ = run_main(
            capsys, "plan", "--n", "4", "--m", "2", "--tau", "4", "--p", "1/6"
        )
        assert code == 0
        assert json.loads(out)["result"]["k"] == 2

    def test_plan_cap_exceeded_exit(self, capsys):
        code, out, _ = run_main(
            capsys,
            "plan", "--n", "4", "--m", "2", "--tau", "4", "--p", "1",
            "--k-max", "10",
        )
        assert code == 3
        result = json.loads(out)["result"]
        assert result["cap_exceeded"] is True
        assert result["k"] is None


class TestErrorHandling:
    def test_validation_error_exit_2(self):
        proc = run_cli("dist", "--n", "0", "--m", "2", "--k", "2")
        assert proc.returncode == 2
        assert proc.stdout == ""
        assert len(proc.stderr.strip().splitlines()) == 1
        assert "Traceback" not in proc.stderr

    def test_unknown_flag_single_line(self):
        proc = run_cli("dist", "--n", "4", "--m", "2", "--k", "2", "--bogus", "1")
        assert proc.returncode == 2
        assert len(proc.stderr.strip().splitlines()) == 1

    def test_invalid_numeric_single_line(self):
        proc = run_cli("dist", "--n", "four", "--m", "2", "--k", "2")
        assert proc.returncode == 2
        assert len(proc.stderr.strip().splitlines()) == 1

    def test_budget_refusal_exit_3(self):
        proc = run_cli("enumerate", "--scheme", "subset", "--n", "50", "--m", "10", "--k", "5")
        assert proc.returncode == 3
        assert "budget" in proc.stderr.lower()

    def test_nested_requires_k4(self):
        proc = run_cli("crosscheck", "--n", "4", "--m", "2", "--k", "3")
        assert proc.returncode == 2

    def test_env_budget_applies(self):
        proc = subprocess.run(
            [sys.executable, "-m", "rovecover", "enumerate",
             "--n", "4", "--m", "2", "--k", "2"],
            capture_output=True,
            text=True,
            env={"PATH": "/usr/bin:/bin", "ROVE_COVER_BUDGET": "10"},
        )
        assert proc.returncode == 3

    def test_budget_flag_overrides_env(self):
        proc = subprocess.run(
            [sys.executable, "-m", "rovecover", "enumerate",
             "--n", "4", "--m", "2", "--k", "2", "--budget", "100"],
            capture_output=True,
            text=True,
            env={"PATH": "/usr/bin:/bin", "ROVE_COVER_BUDGET": "10"},
        )
        assert proc.returncode == 0

    def test_bad_env_budget_rejected(self):
        proc = subprocess.run(
            [sys.executable, "-m", "rovecover", "enumerate",
             "--n", "4", "--m", "2", "--k", "2"],
            capture_output=True,
            text=True,
            env={"PATH": "/usr/bin:/bin", "ROVE_COVER_BUDGET": "lots"},
        )
        assert proc.returncode == 2


class TestSimulationCommands:
    def test_simulate_json(self, capsys):
        code, out, _ = run_main(
            capsys,
            "simulate", "--scheme", "multinomial", "--n", "6", "--m", "2", "--k", "2",
            "--trials", "5000", "--seed", "9",
        )
        assert code == 0
        result = json.loads(out)["result"]
        assert sum(entry["count"] for entry in result["counts"]) == 5000
        assert "repetition_event_count" in result

    def test_simulate_deterministic_bytes(self):
        argv = ["simulate", "--n", "5", "--m", "2", "--k", "2",
                "--trials", "20000", "--seed", "42"]
        first = run_cli(*argv)
        second = run_cli(*argv)
        assert first.returncode == second.returncode == 0
        assert first.stdout == second.stdout

    def test_simulate_csv(self, capsys):
        code, out, _ = run_main(
            capsys,
            "simulate", "--n", "5", "--m", "2", "--k", "2",
            "--trials", "1000", "--seed", "1", "--format", "csv",
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert sum(int(row["count"]) for row in rows) == 1000

    def test_compare_reports_distance(self, capsys):
        code, out, _ = run_main(
            capsys,
            "compare", "--n", "6", "--m", "2", "--k", "2",
            "--trials", "50000", "--seed", "4",
        )
        assert code == 0
        comparison = json.loads(out)["result"]["comparison"]
        assert 0 <= comparison["total_variation_distance"] <= 0.05

    def test_enumerate_json(self, capsys):
        code, out, _ = run_main(
            capsys, "enumerate", "--scheme", "subset", "--n", "4", "--m", "2", "--k", "2"
        )
        assert code == 0
        result = json.loads(out)["result"]
        assert result["total_outcomes"] == 36
        assert {entry["t"]: entry["count"] for entry in result["counts"]} == {
            2: 6, 3: 24, 4: 6,
        }

    def test_crosscheck_agrees(self, capsys):
        code, out, _ = run_main(capsys, "crosscheck", "--n", "6", "--m", "2", "--k", "4")
        assert code == 0
        result = json.loads(out)["result"]
        assert result["nested_vs_closed_agree"] is True
        assert result["discrepancies"] == []
        assert result["enumeration_agrees_closed"] is True
