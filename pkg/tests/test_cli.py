"""Command-line surface: flags, outputs, exit codes, config files."""

import json

import numpy as np
import pytest

from episcope.cli import main
from episcope.episodes import EpisodeResult, read_episodes, write_results_csv
from episcope.featureio import save_features_csv, save_features_fsfe


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def index_file(tmp_path):
    path = tmp_path / "index.json"
    mapping = {f"c{i}": [f"c{i}_e{j}" for j in range(40)] for i in range(8)}
    path.write_text(json.dumps(mapping))
    return str(path)


class TestVariance:
    def test_single_trial(self, capsys):
        code, out, _ = run(
            capsys, "variance", "--a", "0.5", "--sigma", "0", "--kp", "1", "--kq", "1"
        )
        assert code == 0
        assert "exact_var 0.25" in out

    def test_json_schema(self, capsys):
        code, out, _ = run(
            capsys,
            "variance", "--a", "0.87", "--sigma", "0.05", "--kp", "600", "--kq", "75",
            "--json",
        )
        assert code == 0
        payload = json.loads(out)
        assert list(payload) == ["exact_var", "approx_var", "asymptote_var", "ci95_halfwidth"]
        assert payload["exact_var"] == pytest.approx(6.624444444444444e-06, rel=1e-9)

    def test_missing_flag_names_it(self, capsys):
        code, _, err = run(capsys, "variance", "--a", "0.5", "--sigma", "0", "--kp", "1")
        assert code == 2
        assert "--kq" in err

    def test_invalid_prior_is_usage_error(self, capsys):
        code, _, err = run(
            capsys, "variance", "--a", "0.9", "--sigma", "0.5", "--kp", "1", "--kq", "1"
        )
        assert code == 2
        assert "--a/--sigma" in err

    def test_non_numeric_flag(self, capsys):
        code, _, err = run(
            capsys, "variance", "--a", "zero", "--sigma", "0", "--kp", "1", "--kq", "1"
        )
        assert code == 2
        assert "--a" in err


class TestPlan:
    def test_episodes_for_target_variance(self, capsys):
        code, out, _ = run(
            capsys,
            "plan", "episodes", "--a", "0.93", "--sigma", "0.028", "--kq", "2975",
            "--target-var", "7e-6",
        )
        assert code == 0
        assert out.strip() == "116"

    def test_episodes_for_target_ci(self, capsys):
        code, out, _ = run(
            capsys,
            "plan", "episodes", "--a", "0.93", "--sigma", "0.028", "--kq", "2975",
            "--target-ci", "0.0051",
        )
        assert code == 0
        assert out.strip() == "119"

    def test_exactly_one_target_required(self, capsys):
        base = ["plan", "episodes", "--a", "0.9", "--sigma", "0.02", "--kq", "100"]
        code, _, err = run(capsys, *base)
        assert code == 2 and "target" in err
        code, _, err = run(capsys, *base, "--target-var", "1e-5", "--target-ci", "0.01")
        assert code == 2 and "target" in err

    def test_cost_json(self, capsys):
        code, out, _ = run(
            capsys,
            "plan", "cost", "--a", "0.93", "--sigma", "0.028",
            "--cost-episode", "5.59", "--cost-query", "0",
            "--target-var", "7e-6", "--kq-max", "2975",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["episodes"] == 116
        assert payload["queries_per_episode"] == 2975
        assert payload["total_cost"] == pytest.approx(648.44, abs=0.01)

    def test_table_csv(self, capsys, tmp_path):
        out_path = tmp_path / "table.csv"
        code, _, _ = run(
            capsys,
            "plan", "table", "--a", "0.9", "--sigma", "0.02",
            "--kp-list", "100,200", "--kq-list", "10,75", "--out", str(out_path),
        )
        assert code == 0
        lines = out_path.read_text().strip().split("\n")
        assert lines[0] == "kp,kq,exact_var,approx_var,asymptote_var,ci95"
        assert len(lines) == 5

    def test_table_stdout(self, capsys):
        code, out, _ = run(
            capsys,
            "plan", "table", "--a", "0.9", "--sigma", "0.02",
            "--kp-list", "100", "--kq-list", "10",
        )
        assert code == 0
        assert out.startswith("kp,kq,")


class TestSimulate:
    def test_json_report(self, capsys):
        code, out, _ = run(
            capsys,
            "simulate", "--a", "0.9", "--sigma", "0.02", "--kp", "20", "--kq", "30",
            "--reps", "2000", "--seed", "7", "--json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["replications"] == 2000
        assert payload["rel_var_error"] < 0.2

    def test_byte_identical_repeat(self, capsys):
        argv = [
            "simulate", "--a", "0.9", "--sigma", "0.02", "--kp", "10", "--kq", "10",
            "--reps", "500", "--seed", "42",
        ]
        code1, out1, _ = run(capsys, *argv)
        code2, out2, _ = run(capsys, *argv)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_thread_env_does_not_change_output(self, capsys, monkeypatch):
        argv = [
            "simulate", "--a", "0.9", "--sigma", "0.02", "--kp", "10", "--kq", "10",
            "--reps", "9000", "--seed", "42", "--json",
        ]
        monkeypatch.setenv("EPISCOPE_THREADS", "1")
        _, out1, _ = run(capsys, *argv)
        monkeypatch.setenv("EPISCOPE_THREADS", "4")
        _, out2, _ = run(capsys, *argv)
        assert out1 == out2

    def test_boundary_prior_rejected(self, capsys):
        code, _, err = run(
            capsys,
            "simulate", "--a", "0.5", "--sigma", "0.5", "--kp", "10", "--kq", "10",
            "--reps", "100", "--seed", "0",
        )
        assert code == 2

    def test_full_size_run_matches_theory(self, capsys):
        """200k replications of the 600x75 design: within 2% of closed form."""
        code, out, _ = run(
            capsys,
            "simulate", "--a", "0.87", "--sigma", "0.05", "--kp", "600", "--kq", "75",
            "--reps", "200000", "--seed", "7",
        )
        assert code == 0
        fields = dict(line.split(" ", 1) for line in out.strip().split("\n"))
        assert float(fields["rel_var_error"]) < 0.02


class TestEpisodes:
    def test_sample_writes_jsonl(self, capsys, index_file, tmp_path):
        out_path = tmp_path / "episodes.jsonl"
        code, _, _ = run(
            capsys,
            "episodes", "sample", "--index", index_file, "--ways", "3", "--shots", "2",
            "--queries", "5", "--count", "4", "--seed", "11", "--out", str(out_path),
        )
        assert code == 0
        episodes = read_episodes(out_path)
        assert len(episodes) == 4
        assert all(len(e.per_class) == 3 for e in episodes)

    def test_sample_all_queries_to_stdout(self, capsys, index_file):
        code, out, _ = run(
            capsys,
            "episodes", "sample", "--index", index_file, "--ways", "2", "--shots", "3",
            "--queries", "all", "--count", "2", "--seed", "5", "--out", "-",
        )
        assert code == 0
        lines = [l for l in out.split("\n") if l]
        assert len(lines) == 2
        first = json.loads(lines[0])
        assert len(first["per_class"][0]["query_ids"]) == 37

    def test_sample_deterministic_bytes(self, capsys, index_file):
        argv = [
            "episodes", "sample", "--index", index_file, "--ways", "3", "--shots", "2",
            "--queries", "all", "--count", "3", "--seed", "9", "--out", "-",
        ]
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        assert out1 == out2

    def test_sample_missing_index_is_runtime_error(self, capsys, tmp_path):
        code, _, err = run(
            capsys,
            "episodes", "sample", "--index", str(tmp_path / "nope.json"), "--ways", "2",
            "--shots", "1", "--queries", "1", "--count", "1", "--seed", "0",
            "--out", "-",
        )
        assert code == 1

    def test_aggregate_with_prior(self, capsys, tmp_path):
        results_path = tmp_path / "results.csv"
        write_results_csv(results_path, [EpisodeResult(0, 92, 100), EpisodeResult(1, 94, 100)])
        code, out, _ = run(
            capsys, "episodes", "aggregate", "--results", str(results_path), "--prior"
        )
        assert code == 0
        assert "accuracy 93.00 ± 12.71" in out
        assert "prior_mean 0.93" in out
        assert "prior_std 0.01414213562" in out

    def test_aggregate_single_result_fails_at_runtime(self, capsys, tmp_path):
        results_path = tmp_path / "one.csv"
        write_results_csv(results_path, [EpisodeResult(0, 9, 10)])
        code, _, err = run(capsys, "episodes", "aggregate", "--results", str(results_path))
        assert code == 1
        assert "at least 2" in err


class TestFid:
    def test_same_file_is_zero(self, capsys, tmp_path):
        rng = np.random.default_rng(3)
        path = tmp_path / "x.csv"
        save_features_csv(path, rng.normal(size=(50, 8)))
        code, out, _ = run(capsys, "fid", "--a", str(path), "--b", str(path))
        assert code == 0
        assert float(out) < 1e-8

    def test_mixed_formats(self, capsys, tmp_path):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(60, 6)).astype(np.float32).astype(np.float64)
        csv_path = tmp_path / "x.csv"
        bin_path = tmp_path / "x.fsfe"
        save_features_csv(csv_path, x)
        save_features_fsfe(bin_path, x)
        code, out, _ = run(capsys, "fid", "--a", str(csv_path), "--b", str(bin_path))
        assert code == 0
        assert float(out) == pytest.approx(0.0, abs=1e-8)


class TestBlend:
    def test_emits_requested_count(self, capsys, tmp_path):
        rng = np.random.default_rng(5)
        latents_path = tmp_path / "latents.csv"
        save_features_csv(latents_path, rng.normal(size=(3, 16)))
        code, out, _ = run(
            capsys,
            "blend", "--latents", str(latents_path), "--alpha", "0.5", "--seed", "12",
            "--count", "4",
        )
        assert code == 0
        rows = [r for r in out.strip().split("\n") if r]
        assert len(rows) == 4
        assert all(len(r.split(",")) == 16 for r in rows)

    def test_deterministic_bytes(self, capsys, tmp_path):
        rng = np.random.default_rng(6)
        latents_path = tmp_path / "latents.csv"
        save_features_csv(latents_path, rng.normal(size=(2, 8)))
        argv = ["blend", "--latents", str(latents_path), "--alpha", "0.3", "--seed", "77"]
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        assert out1 == out2

    def test_alpha_validation(self, capsys, tmp_path):
        latents_path = tmp_path / "latents.csv"
        save_features_csv(latents_path, np.ones((2, 4)))
        code, _, err = run(
            capsys, "blend", "--latents", str(latents_path), "--alpha", "1.5", "--seed", "0"
        )
        assert code == 2
        assert "--alpha" in err


class TestConfigFile:
    def test_config_supplies_missing_flags(self, capsys, tmp_path):
        config_path = tmp_path / "run.json"
        config_path.write_text(json.dumps({"a": 0.93, "sigma": 0.028, "kq": 2975}))
        code, out, _ = run(
            capsys,
            "plan", "episodes", "--config", str(config_path), "--target-var", "7e-6",
        )
        assert code == 0
        assert out.strip() == "116"

    def test_explicit_flags_win(self, capsys, tmp_path):
        config_path = tmp_path / "run.json"
        config_path.write_text(
            json.dumps({"a": 0.5, "sigma": 0.0, "kp": 1, "kq": 1})
        )
        code, out, _ = run(
            capsys, "variance", "--config", str(config_path), "--kq", "4"
        )
        assert code == 0
        assert "exact_var 0.0625" in out

    def test_hyphenated_keys_accepted(self, capsys, tmp_path):
        config_path = tmp_path / "run.json"
        config_path.write_text(
            json.dumps({"a": 0.93, "sigma": 0.028, "kq": 2975, "target-var": 7e-6})
        )
        code, out, _ = run(capsys, "plan", "episodes", "--config", str(config_path))
        assert code == 0
        assert out.strip() == "116"

    def test_malformed_config_is_usage_error(self, capsys, tmp_path):
        config_path = tmp_path / "broken.json"
        config_path.write_text("{not json")
        code, _, err = run(
            capsys,
            "variance", "--config", str(config_path), "--a", "0.5", "--sigma", "0",
            "--kp", "1", "--kq", "1",
        )
        assert code == 2
        assert "--config" in err


class TestParserBehavior:
    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["frobnicate"])
        assert excinfo.value.code == 2

    def test_no_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == 2
