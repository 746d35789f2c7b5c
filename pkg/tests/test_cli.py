from __future__ import annotations

import json
from datetime import date
from pathlib import Path

from narranet.cli import main
from narranet.ingest import save_tuples
from narranet.pipeline import (
    EXIT_CONFIG,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_STAGE,
    RunConfig,
    derive_seed,
    simulate,
)
from narranet.synthetic import make_model, sample_coupled_streams


SIM = {"k": 2, "n": 10, "r": 2, "news": True, "posts_per_day": 8, "num_days": 20, "lag": 0}


def write_config(path: Path, **overrides) -> Path:
    cfg = {
        "output_dir": str(path.parent / "out"),
        "master_seed": 7,
        "runs": 10,
        "baseline_samples": 4,
        "baseline_size": 10,
        "max_lag": 4,
        "top_communities": 2,
        "simulate": SIM,
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg), "utf-8")
    return path


def simulate_inputs(tmp_path: Path) -> dict:
    cfg_path = write_config(tmp_path / "sim.json")
    config = RunConfig.from_file(cfg_path)
    paths = simulate(config, tmp_path / "inputs")
    return {name: str(p) for name, p in paths.items()}


def full_config(tmp_path: Path, **overrides) -> Path:
    inputs = simulate_inputs(tmp_path)
    cfg_path = tmp_path / "run.json"
    return write_config(cfg_path, **{**inputs, **overrides})


class TestSeedDerivation:
    def test_distinct_labels_distinct_seeds(self):
        assert derive_seed(7, "kmeans") != derive_seed(7, "communities")

    def test_stable(self):
        assert derive_seed(7, "kmeans") == derive_seed(7, "kmeans")


class TestConfig:
    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text('{"bogus_key": 1}', "utf-8")
        assert main(["run", "-c", str(path)]) == EXIT_CONFIG

    def test_invalid_thresholds_exit_config(self, tmp_path):
        path = write_config(tmp_path / "c.json", tau_core=0.5, tau_relax=0.9)
        assert main(["run", "-c", str(path)]) == EXIT_CONFIG

    def test_invalid_json_exit_config(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("{oops", "utf-8")
        assert main(["run", "-c", str(path)]) == EXIT_CONFIG

    def test_missing_input_exit_input(self, tmp_path):
        path = write_config(tmp_path / "c.json", social_tuples=str(tmp_path / "nope.jsonl"))
        assert main(["ingest", "-c", str(path)]) == EXIT_INPUT

    def test_missing_embeddings_fails_at_ingest(self, tmp_path):
        inputs = simulate_inputs(tmp_path)
        inputs["embeddings"] = str(tmp_path / "missing.tsv")
        path = write_config(tmp_path / "c.json", **inputs)
        assert main(["ingest", "-c", str(path)]) == EXIT_INPUT

    def test_env_var_overrides_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("NARRANET_OUTPUT_DIR", str(tmp_path / "envout"))
        path = write_config(tmp_path / "c.json")
        cfg = RunConfig.from_file(path)
        assert cfg.output_dir == str(tmp_path / "envout")

    def test_flag_overrides_config(self, tmp_path):
        path = full_config(tmp_path)
        assert main(["group", "-c", str(path), "--min-cooc", "999999"]) == EXIT_OK
        groups = json.loads((tmp_path / "out" / "groups.json").read_text())
        assert groups["min_cooc"] == 999999
        non_residual = [g for g in groups["groups"] if g["id"] != -1]
        assert all(len(g["seeds"]) == 1 for g in non_residual)


class TestStages:
    def test_stage_chain_and_artifacts(self, tmp_path):
        cfg = full_config(tmp_path)
        out = tmp_path / "out"
        for stage in ("ingest", "group", "cluster", "graph", "communities", "newsnet", "coverage", "evaluate"):
            assert main([stage, "-c", str(cfg)]) == EXIT_OK, stage
        for artifact in (
            "ingest.json",
            "groups.json",
            "subnodes.json",
            "graph.graphml",
            "graph.json",
            "communities.json",
            "windows.json",
            "xcorr.csv",
            "agreement.csv",
            "planted_eval.json",
        ):
            assert (out / artifact).is_file(), artifact

    def test_downstream_stage_without_upstream_exit_input(self, tmp_path):
        cfg = full_config(tmp_path)
        assert main(["cluster", "-c", str(cfg)]) == EXIT_INPUT

    def test_stale_upstream_refused_without_force(self, tmp_path):
        cfg = full_config(tmp_path)
        assert main(["group", "-c", str(cfg)]) == EXIT_OK
        stale = full_config(tmp_path, master_seed=99)
        assert main(["cluster", "-c", str(stale)]) == EXIT_STAGE
        assert main(["cluster", "-c", str(stale), "--force"]) == EXIT_OK

    def test_simulate_then_evaluate_produces_planted_report(self, tmp_path):
        cfg = full_config(tmp_path)
        assert main(["run", "-c", str(cfg)]) == EXIT_OK
        payload = json.loads((tmp_path / "out" / "planted_eval.json").read_text())
        assert "v_measure" in payload
        assert 0.0 <= payload["v_measure"] <= 1.0

    def test_newsnet_105_day_span_emits_101_networks(self, tmp_path):
        model = make_model(2, 8, 2, seed=1)
        _, news_c, _ = sample_coupled_streams(
            model, posts_per_day=2, num_days=105, seed=2, start=date(2020, 1, 1)
        )
        assert news_c.t_min == date(2020, 1, 1)
        assert news_c.t_max == date(2020, 4, 14)
        inputs = simulate_inputs(tmp_path)
        news_path = tmp_path / "inputs" / "news105.jsonl"
        save_tuples(news_c, news_path)
        cfg = write_config(
            tmp_path / "run105.json", **{**inputs, "news_tuples": str(news_path)}
        )
        assert main(["newsnet", "-c", str(cfg)]) == EXIT_OK
        files = sorted((tmp_path / "out" / "newsnet").glob("window_*.csv"))
        assert len(files) == 101


class TestDeterminism:
    def test_rerun_manifest_identical(self, tmp_path):
        cfg = full_config(tmp_path)
        assert main(["run", "-c", str(cfg)]) == EXIT_OK
        first = (tmp_path / "out" / "manifest.json").read_bytes()
        assert main(["run", "-c", str(cfg)]) == EXIT_OK
        second = (tmp_path / "out" / "manifest.json").read_bytes()
        assert first == second

    def test_worker_count_does_not_change_outputs(self, tmp_path):
        cfg = full_config(tmp_path)
        assert main(["run", "-c", str(cfg), "--workers", "1"]) == EXIT_OK
        first = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert main(["run", "-c", str(cfg), "--workers", "2"]) == EXIT_OK
        second = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert first["outputs"] == second["outputs"]

    def test_manifest_reconstructs_run(self, tmp_path):
        cfg = full_config(tmp_path)
        assert main(["run", "-c", str(cfg)]) == EXIT_OK
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["config"]["master_seed"] == 7
        assert "social_tuples" in manifest["inputs"]
        for name, entry in manifest["inputs"].items():
            assert len(entry["sha256"]) == 64
        assert "communities.json" in manifest["outputs"]
