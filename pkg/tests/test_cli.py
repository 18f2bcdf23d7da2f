import json

import pandas as pd
import pytest

from pipeline_cli.cli import build_parser, main
from pipeline_cli.manifest import LOCK_NAME, RunManifest, verify_manifest

SMALL = {"cohort": {"n_patients": 30}}


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(SMALL))
    return path


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_synth_tokenize_stats(tmp_path, config):
    out = tmp_path / "out"
    common = ["--config", str(config), "--out", str(out), "--quiet"]
    assert main(["synth", *common, "--seed", "3"]) == 0
    assert main(["tokenize", str(out / "events.jsonl"), *common, "--verify"]) == 0
    for name in ("tokens.bin", "vocab.txt", "patients.csv", "stats.csv", "run.log"):
        assert (out / name).is_file()

    patients = pd.read_csv(out / "patients.csv")
    assert len(patients) == 30
    assert set(patients["split"]) <= {"train", "validation", "test"}

    manifest = RunManifest.load(out / "manifest-tokenize.json")
    assert set(manifest.outputs) == {"tokens.bin", "vocab.txt", "patients.csv", "stats.csv"}
    assert verify_manifest(manifest, out) == []

    stats_out = tmp_path / "stats"
    assert main(["stats", str(out), "--out", str(stats_out), "--quiet"]) == 0
    pd.testing.assert_frame_equal(pd.read_csv(stats_out / "stats.csv"), pd.read_csv(out / "stats.csv"))
    assert not (out / LOCK_NAME).exists()


def test_synth_is_reproducible(tmp_path, config):
    for name in ("a", "b"):
        assert main(["synth", "--config", str(config), "--seed", "5", "--out", str(tmp_path / name), "--quiet"]) == 0
    assert (tmp_path / "a" / "events.jsonl").read_bytes() == (tmp_path / "b" / "events.jsonl").read_bytes()


def test_malformed_events_exit_1(tmp_path, capsys):
    events = tmp_path / "events.jsonl"
    events.write_text('{"patient_id": "P1", "kind": "Admission"\n')
    assert main(["tokenize", str(events), "--out", str(tmp_path / "out"), "--quiet"]) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_held_lock_exit_1(tmp_path, capsys):
    out = tmp_path / "out"
    out.mkdir()
    (out / LOCK_NAME).write_text("123")
    assert main(["synth", "--out", str(out), "--quiet"]) == 1
    assert "in use" in capsys.readouterr().err


def test_unknown_config_key_exit_1(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"cohort": {"patients": 3}}))
    assert main(["synth", "--config", str(path), "--out", str(tmp_path / "out"), "--quiet"]) == 1
    assert "unknown keys" in capsys.readouterr().err


def test_report_flops_tables(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["report", "--vocab-size", "300", "--out", str(out), "--quiet"]) == 0
    flops = pd.read_csv(out / "flops.csv")
    assert {"config_id", "params", "training_flops_per_token", "palm_ratio"} <= set(flops.columns)
    assert len(pd.read_csv(out / "flops_2048.csv")) == len(flops)
    assert main(["report", "--out", str(tmp_path / "none"), "--quiet"]) == 1
    assert "--vocab-size" in capsys.readouterr().err


@pytest.mark.slow
def test_full_pipeline(tmp_path):
    cfg = {
        "cohort": {"n_patients": 200},
        "model": {"d_model": 32, "n_layers": 1, "context_len": 64},
        "train": {"tokens_per_batch": 512, "max_steps": 30, "validation_interval": 10, "patience": 2},
        "rollout": {"n_rollouts": 4, "max_generated_tokens": 64},
        "evaluation": {"n_resamples": 20},
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    common = ["--config", str(path), "--out", str(out), "--quiet", "--seed", "1"]

    assert main(["synth", *common]) == 0
    assert main(["tokenize", str(out / "events.jsonl"), *common]) == 0
    assert main(["train", str(out), *common, "--name", "tiny"]) == 0
    assert (out / "tiny.ckpt").is_file() and (out / "tiny.loss.svg").is_file()

    assert main(["evaluate", str(out), str(out / "tiny.ckpt"), "--split", "train", *common]) == 0
    metrics = pd.read_csv(out / "metrics.csv")
    assert set(metrics["task"]) == {"icu_mortality", "readmission_30d"}
    assert metrics["roc_auc"].between(0, 1).all()
    assert (out / "roc-tiny-icu_mortality.svg").is_file()
