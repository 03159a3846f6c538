"""CLI suites: record/summary consistency, determinism, and the win report."""

import json

import pytest
from click.testing import CliRunner

from conftest import FIXTURES
from wsrobust.cli import compare_wins, main
from wsrobust.errors import PairingError
from wsrobust.io import read_records


def run_cli(args):
    runner = CliRunner()
    result = runner.invoke(main, args, catch_exceptions=False)
    return result


def backend_args():
    return ["--toy-model", str(FIXTURES / "toy_model.json")]


def data_args(dataset="dataset_small.jsonl"):
    return ["--dataset", str(FIXTURES / dataset), "--lexicon", str(FIXTURES / "lexicon.json")]


def parse_summary(output: str) -> dict:
    return json.loads(output)


class TestAttackSuite:
    def test_summary_consistent_with_records(self, tmp_path):
        out = tmp_path / "attack.jsonl"
        result = run_cli(
            ["attack", *data_args(), *backend_args(), "--seed", "1", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        summary = parse_summary(result.output)
        records = read_records(out)
        assert summary["attacks"] == len(records)
        succ = [r for r in records if r["success"]]
        assert summary["successes"] == len(succ)
        recomputed = sum(100.0 * r["ratio"] for r in succ) / len(succ)
        assert abs(summary["percent_substituted"] - recomputed) < 1e-9
        mean = sum(r["substitutions"] for r in succ) / len(succ)
        assert abs(summary["mean_substitutions"] - mean) < 1e-9

    def test_empty_dataset(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        out = tmp_path / "attack.jsonl"
        result = run_cli(
            ["attack", "--dataset", str(empty), "--lexicon",
             str(FIXTURES / "lexicon.json"), *backend_args(), "--out", str(out)]
        )
        assert result.exit_code == 0
        summary = parse_summary(result.output)
        assert summary["attacks"] == 0
        assert summary["success_rate"] is None

    def test_misclassified_instances_skipped_and_listed(self, tmp_path):
        dataset = tmp_path / "mixed.jsonl"
        lines = (FIXTURES / "dataset_small.jsonl").read_text().splitlines()[:3]
        records = [json.loads(s) for s in lines]
        records[1]["label"] = (records[1]["label"] + 1) % 3  # force a skip
        dataset.write_text("\n".join(json.dumps(r) for r in records) + "\n")
        out = tmp_path / "attack.jsonl"
        result = run_cli(
            ["attack", "--dataset", str(dataset), "--lexicon",
             str(FIXTURES / "lexicon.json"), *backend_args(), "--out", str(out)]
        )
        summary = parse_summary(result.output)
        assert summary["skipped"] == 1
        assert summary["skipped_ids"] == [1]
        assert summary["attacks"] == 2
        assert {r["id"] for r in read_records(out)} == {0, 2}

    def test_greedy_method(self, tmp_path):
        out = tmp_path / "greedy.jsonl"
        result = run_cli(
            ["attack", *data_args(), *backend_args(), "--method", "greedy",
             "--out", str(out)]
        )
        assert result.exit_code == 0
        assert parse_summary(result.output)["method"] == "greedy"

    def test_workers_do_not_change_results(self, tmp_path):
        outs = []
        for i, workers in enumerate(("1", "4")):
            out = tmp_path / f"attack{i}.jsonl"
            run_cli(["attack", *data_args(), *backend_args(), "--seed", "3",
                     "--workers", workers, "--out", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]


class TestCertifySuite:
    def test_dichotomy_without_budget(self, tmp_path):
        out = tmp_path / "verdicts.jsonl"
        result = run_cli(
            ["certify", *data_args(), *backend_args(), "--max-radius", "2",
             "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        summary = parse_summary(result.output)
        for r in ("1", "2"):
            assert summary["percent_falsified"][r] + summary["percent_certified"][r] == 100.0
            assert summary["percent_budget"][r] == 0.0

    def test_single_radius_flag(self, tmp_path):
        out = tmp_path / "verdicts.jsonl"
        result = run_cli(
            ["certify", *data_args(), *backend_args(), "--radius", "1",
             "--out", str(out)]
        )
        assert result.exit_code == 0
        records = read_records(out)
        assert {r["radius"] for r in records} == {1}

    def test_records_have_no_timing_by_default(self, tmp_path):
        out = tmp_path / "verdicts.jsonl"
        run_cli(["certify", *data_args(), *backend_args(), "--radius", "1",
                 "--out", str(out)])
        assert all("elapsed_ms" not in r for r in read_records(out))
        out2 = tmp_path / "timed.jsonl"
        run_cli(["certify", *data_args(), *backend_args(), "--radius", "1",
                 "--timing", "--out", str(out2)])
        assert all("elapsed_ms" in r for r in read_records(out2))


class TestPrSuite:
    def test_csv_row_count_matches_instances(self, tmp_path):
        out = tmp_path / "pr.jsonl"
        result = run_cli(
            ["pr", *data_args(), *backend_args(), "--epsilon", "0.1",
             "--delta", "0.1", "--seed", "2", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        records = read_records(out)
        csv_lines = (tmp_path / "pr.csv").read_text().splitlines()
        assert csv_lines[0] == "pr_hat"
        assert len(csv_lines) - 1 == len(records)

    def test_exact_mode(self, tmp_path):
        out = tmp_path / "pr.jsonl"
        result = run_cli(
            ["pr", *data_args(), *backend_args(), "--radius", "1", "--exact",
             "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        records = read_records(out)
        assert all(r["exact"] for r in records)
        assert all(r["pr_hat"] == r["successes"] / r["samples"] for r in records)

    def test_fraction_above_threshold_recomputable(self, tmp_path):
        out = tmp_path / "pr.jsonl"
        result = run_cli(
            ["pr", *data_args(), *backend_args(), "--epsilon", "0.1",
             "--delta", "0.1", "--threshold", "0.5", "--out", str(out)]
        )
        summary = parse_summary(result.output)
        records = read_records(out)
        frac = sum(r["pr_hat"] > 0.5 for r in records) / len(records)
        assert summary["fraction_above_threshold"] == pytest.approx(frac)


class TestRadiusSuite:
    def test_bracket_records(self, tmp_path):
        out = tmp_path / "brackets.jsonl"
        result = run_cli(
            ["radius", *data_args(), *backend_args(), "--seed", "1",
             "--max-radius", "2", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        records = read_records(out)
        assert records
        for r in records:
            assert r["status"] in ("bracketed", "lower_only", "inconsistent")
            if r["upper"] is not None and r["status"] != "inconsistent":
                assert r["lower"] <= r["upper"]


class TestReport:
    def make_file(self, tmp_path, name, rows):
        path = tmp_path / name
        path.write_text(
            "\n".join(json.dumps(r, sort_keys=True) for r in rows) + "\n"
        )
        return path

    def test_identical_files_all_ties(self, tmp_path):
        rows = [
            {"id": 0, "success": True, "substitutions": 2},
            {"id": 1, "success": True, "substitutions": 3},
        ]
        a = self.make_file(tmp_path, "a.jsonl", rows)
        b = self.make_file(tmp_path, "b.jsonl", rows)
        result = run_cli(["report", "--a", str(a), "--b", str(b)])
        summary = parse_summary(result.output)
        assert summary["wins_a"] == summary["wins_b"] == 0
        assert summary["ties"] == 2

    def test_strict_wins_and_ties(self, tmp_path):
        a = self.make_file(tmp_path, "a.jsonl", [
            {"id": 0, "success": True, "substitutions": 3},
            {"id": 1, "success": True, "substitutions": 5},
        ])
        b = self.make_file(tmp_path, "b.jsonl", [
            {"id": 0, "success": True, "substitutions": 4},
            {"id": 1, "success": True, "substitutions": 5},
        ])
        result = run_cli(["report", "--a", str(a), "--b", str(b)])
        summary = parse_summary(result.output)
        assert summary["wins_a"] == 1
        assert summary["ties"] == 1
        assert summary["wins_b"] == 0

    def test_single_sided_success_counted_separately(self):
        a = [{"id": 0, "success": True, "substitutions": 1}]
        b = [{"id": 0, "success": False, "substitutions": None}]
        summary = compare_wins(a, b)
        assert summary["only_a"] == 1
        assert summary["wins_a"] == 0

    def test_id_mismatch_rejected(self):
        with pytest.raises(PairingError):
            compare_wins(
                [{"id": 0, "success": False, "substitutions": None}],
                [{"id": 1, "success": False, "substitutions": None}],
            )
