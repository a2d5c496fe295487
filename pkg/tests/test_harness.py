"""Experiment harness: manifests, stratified splits, seed derivation,
the feature cache, config round-trips, and a miniature sweep."""

import csv
import shutil

import numpy as np
import pytest
import yaml

from quanvaudio import harness
from quanvaudio.corrupt import CorruptionKind
from quanvaudio.harness import (
    DatasetManifest,
    ExperimentConfig,
    FeatureCache,
    FeaturePipeline,
    ManifestError,
    ManifestRow,
    derive_seed,
    grids_from_accuracy_csv,
    load_manifest,
    model_instances,
    run_experiment,
    split,
    write_reports,
)


def _manifest(counts: dict[str, int]) -> DatasetManifest:
    rows = []
    for label, n in counts.items():
        rows += [ManifestRow(f"/data/{label}/{i}.wav", label) for i in range(n)]
    m = DatasetManifest.__new__(DatasetManifest)
    object.__setattr__(m, "rows", tuple(rows))
    m.__post_init__()
    return m


# ---------------------------------------------------------------------------
# Splits


def test_split_100_balanced_is_65_15_20():
    train, val, test = split(_manifest({"a": 50, "b": 50}), seed=0)
    assert (len(train), len(val), len(test)) == (65, 15, 20)


def test_split_disjoint_and_exhaustive():
    m = _manifest({"a": 23, "b": 31, "c": 17})
    train, val, test = split(m, seed=1)
    parts = [{r.path for r in part} for part in (train, val, test)]
    assert sum(len(p) for p in parts) == len(m.rows)
    assert parts[0] | parts[1] | parts[2] == {r.path for r in m.rows}
    assert not (parts[0] & parts[1] or parts[0] & parts[2] or parts[1] & parts[2])


def test_split_stratified_every_class_everywhere():
    m = _manifest({"a": 10, "b": 40, "c": 25})
    for part in split(m, seed=2):
        assert {r.label for r in part} == {"a", "b", "c"}


def test_split_seed_determinism():
    m = _manifest({"a": 30, "b": 30})
    assert split(m, seed=3) == split(m, seed=3)
    assert split(m, seed=3) != split(m, seed=4)


def test_split_small_class_rejected():
    with pytest.raises(ValueError, match="'b'"):
        split(_manifest({"a": 30, "b": 2}), seed=0)


def test_split_bad_ratios():
    with pytest.raises(ValueError):
        split(_manifest({"a": 10, "b": 10}), ratios=(0.5, 0.2, 0.2), seed=0)


# ---------------------------------------------------------------------------
# Seeds & cache


def test_derive_seed_deterministic_and_tag_sensitive():
    assert derive_seed(0, "x") == derive_seed(0, "x")
    assert derive_seed(0, "x") != derive_seed(0, "y")
    assert derive_seed(0, "x") != derive_seed(1, "x")


def test_cache_key_sensitivity():
    key = FeatureCache.key("corrupt", {"file": "abc", "severity": 3})
    assert key == FeatureCache.key("corrupt", {"severity": 3, "file": "abc"})
    assert key != FeatureCache.key("corrupt", {"file": "abc", "severity": 4})
    assert key != FeatureCache.key("featurize", {"file": "abc", "severity": 3})


def test_cache_hit_skips_recompute(tmp_path):
    cache = FeatureCache(tmp_path)
    calls = []

    def compute():
        calls.append(1)
        return np.arange(6.0).reshape(2, 3)

    a = cache.get_or_compute("k1", compute)
    b = cache.get_or_compute("k1", compute)
    assert len(calls) == 1
    np.testing.assert_array_equal(a, b)


def test_cache_corrupt_entry_recomputed(tmp_path):
    cache = FeatureCache(tmp_path)
    cache.get_or_compute("k2", lambda: np.ones((2, 2)))
    (tmp_path / "k2.t64").write_bytes(b"garbage")
    with pytest.warns(UserWarning, match="recomputing"):
        out = cache.get_or_compute("k2", lambda: np.ones((2, 2)))
    np.testing.assert_array_equal(out, np.ones((2, 2)))


def test_cache_disabled_passthrough(monkeypatch):
    monkeypatch.delenv(harness.CACHE_ENV_VAR, raising=False)
    cache = FeatureCache(None)
    calls = []
    cache.get_or_compute("k", lambda: calls.append(1) or np.zeros(2))
    cache.get_or_compute("k", lambda: calls.append(1) or np.zeros(2))
    assert len(calls) == 2


def test_cache_hit_skips_quanvolution(tmp_path, toy_root):
    from quanvaudio.qsim import build_beqc

    pipeline = FeaturePipeline(FeatureCache(tmp_path))
    wav = next(toy_root.rglob("*.wav"))
    gram = pipeline.clean_gram(str(wav))
    spec = build_beqc(4, 1, seed=0)
    calls = []
    orig = harness.quanv_forward

    def counting(*args, **kwargs):
        calls.append(1)
        return orig(*args, **kwargs)

    try:
        harness.quanv_forward = counting
        pipeline.quanv_features(gram, "gk", spec)
        pipeline.quanv_features(gram, "gk", spec)
    finally:
        harness.quanv_forward = orig
    assert len(calls) == 1


# ---------------------------------------------------------------------------
# Manifests


def test_load_manifest_directory_layout(toy_root):
    manifest = load_manifest(toy_root)
    assert manifest.n_classes == 2
    assert manifest.label_map == {"high": 0, "low": 1}
    assert all(r.path.endswith(".wav") for r in manifest.rows)


def test_load_manifest_csv_override(toy_root, tmp_path):
    csv_path = tmp_path / "manifest.csv"
    wavs = sorted(toy_root.rglob("*.wav"))[:6]
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "label", "group"])
        for i, wav in enumerate(wavs):
            writer.writerow([str(wav), "x" if i % 2 else "y", f"g{i}"])
    manifest = load_manifest(toy_root, csv_path)
    assert len(manifest.rows) == 6
    assert manifest.rows[0].group == "g0"


def test_load_manifest_missing_file(toy_root, tmp_path):
    csv_path = tmp_path / "m.csv"
    csv_path.write_text("path,label\n/nonexistent/a.wav,x\n/nonexistent/b.wav,y\n")
    with pytest.raises(ManifestError, match="missing"):
        load_manifest(toy_root, csv_path)


def test_manifest_needs_two_classes(toy_root, tmp_path):
    (tmp_path / "only").mkdir()
    shutil.copy(next(toy_root.rglob("*.wav")), tmp_path / "only" / "a.wav")
    with pytest.raises(ManifestError):
        load_manifest(tmp_path)


def test_manifest_empty_directory(tmp_path):
    with pytest.raises(ManifestError, match="no audio"):
        load_manifest(tmp_path)


# ---------------------------------------------------------------------------
# Config


def test_config_yaml_round_trip(tmp_path):
    cfg = ExperimentConfig(
        data_root="/data",
        output_dir="/out",
        models=("cnn_base", "qnn_random"),
        depths=(1, 4),
        severities=(1, 2, 3),
        n_seeds=2,
    )
    path = tmp_path / "cfg.yaml"
    cfg.to_yaml(path)
    assert ExperimentConfig.from_yaml(path) == cfg
    doc = yaml.safe_load(path.read_text())
    assert doc["models"] == ["cnn_base", "qnn_random"]


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(data_root="/d", output_dir="/o", models=("resnet",))
    with pytest.raises(ValueError):
        ExperimentConfig(data_root="/d", output_dir="/o", n_seeds=0)
    with pytest.raises(ValueError):
        ExperimentConfig(data_root="/d", output_dir="/o", corruptions=("blur",))


def test_model_instances_ids():
    cfg = ExperimentConfig(
        data_root="/d", output_dir="/o",
        models=("cnn_base", "qnn_basic", "qnn_strongly"), depths=(1, 4),
    )
    ids = [inst.model_id for inst in model_instances(cfg)]
    assert ids == ["cnn_base", "qnn_basic_d1", "qnn_basic_d4",
                   "qnn_strongly_d1", "qnn_strongly_d4"]


# ---------------------------------------------------------------------------
# Miniature sweep


@pytest.fixture(scope="module")
def mini_result(toy_root, tmp_path_factory):
    out = tmp_path_factory.mktemp("mini_out")
    cfg = ExperimentConfig(
        data_root=str(toy_root),
        output_dir=str(out),
        cache_dir=str(tmp_path_factory.mktemp("mini_cache")),
        models=("cnn_base", "qnn_basic"),
        depths=(1,),
        corruptions=("gaussian_noise", "temporal_shift"),
        severities=(2,),
        n_seeds=1,
        lr=1e-3,
        max_epochs=4,
        patience=3,
        batch_size=8,
    )
    return cfg, run_experiment(cfg)


def test_mini_sweep_accuracy_rows(mini_result):
    cfg, result = mini_result
    assert not result.failures
    # per model: 1 clean + 2 kinds x 1 severity
    assert len(result.accuracy_rows) == 2 * (1 + 2)
    for row in result.accuracy_rows:
        seed, model, template, depth, kind, sev, acc = row
        assert model in ("cnn_base", "qnn_basic_d1")
        assert 0.0 <= acc <= 1.0
    with open(result.out_dir / "accuracy.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(result.accuracy_rows)
    assert set(rows[0]) == set(harness.ACCURACY_HEADER)


def test_mini_sweep_artifacts(mini_result):
    cfg, result = mini_result
    out = result.out_dir
    assert (out / "config.yaml").exists()
    assert (out / "circuit_qnn_basic_d1.json").exists()
    assert (out / "checkpoint_cnn_base_seed0.bin").exists()
    assert (out / "history_qnn_basic_d1_seed0.csv").exists()
    assert any((out / "confusion").glob("*_clean.csv"))
    # partial corruption coverage -> no complete grids -> problems recorded
    assert (out / "report_problems.csv").exists()


def test_rerun_reuses_checkpoints(mini_result, tmp_path):
    cfg, result = mini_result
    ckpt = result.out_dir / "checkpoint_qnn_basic_d1_seed0.bin"
    before = ckpt.read_bytes()
    rerun = run_experiment(cfg, reuse_checkpoints=True, models_filter=["qnn_basic_d1"])
    assert not rerun.failures
    assert ckpt.read_bytes() == before


def test_models_filter_unknown(mini_result):
    cfg, _ = mini_result
    with pytest.raises(ValueError):
        run_experiment(cfg, models_filter=["nope"])


# ---------------------------------------------------------------------------
# Report plumbing


def _full_accuracy_csv(path, models=("cnn_base", "qnn_basic_d1"), n_seeds=2):
    rng = np.random.default_rng(0)
    rows = []
    for seed in range(n_seeds):
        for model in models:
            rows.append([seed, model, "-", 0, "clean", 0, 0.95])
            for kind in CorruptionKind:
                for sev in range(1, 7):
                    acc = float(np.round(0.9 - 0.05 * sev - 0.05 * rng.random(), 6))
                    rows.append([seed, model, "-", 0, kind.value, sev, acc])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(harness.ACCURACY_HEADER)
        writer.writerows(rows)


def test_grids_from_accuracy_csv_and_reports(tmp_path):
    acc_csv = tmp_path / "accuracy.csv"
    _full_accuracy_csv(acc_csv)
    grids = grids_from_accuracy_csv(acc_csv)
    assert set(grids) == {(s, m) for s in (0, 1) for m in ("cnn_base", "qnn_basic_d1")}
    problems = write_reports(tmp_path, grids, ["cnn_base", "qnn_basic_d1"], 2)
    assert not problems
    with open(tmp_path / "report_per_seed.csv") as fh:
        per_seed = list(csv.DictReader(fh))
    assert len(per_seed) == 2 * 2 * 4  # seeds x models x kinds
    base_rows = [r for r in per_seed if r["model"] == "cnn_base"]
    assert all(float(r["CE"]) == 1.0 for r in base_rows)
    with open(tmp_path / "report.csv") as fh:
        agg = list(csv.DictReader(fh))
    summary = [r for r in agg if r["kind"] == "mCE/RmCE"]
    assert {r["model"] for r in summary} == {"cnn_base", "qnn_basic_d1"}
    base_summary = next(r for r in summary if r["model"] == "cnn_base")
    assert float(base_summary["CE_mean"]) == 1.0


def test_grids_skip_incomplete(tmp_path):
    acc_csv = tmp_path / "accuracy.csv"
    _full_accuracy_csv(acc_csv, n_seeds=1)
    text = acc_csv.read_text().splitlines()
    # drop one corrupted cell of qnn_basic_d1 -> its grid is incomplete
    dropped = next(
        i for i, line in enumerate(text)
        if "qnn_basic_d1" in line and ",6," in line
    )
    acc_csv.write_text("\n".join(text[:dropped] + text[dropped + 1:]) + "\n")
    grids = grids_from_accuracy_csv(acc_csv)
    assert (0, "cnn_base") in grids
    assert (0, "qnn_basic_d1") not in grids
