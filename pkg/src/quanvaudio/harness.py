"""Experiment orchestration: manifests, stratified splits, seeded
clean-train/corrupted-test sweeps, caching, and CSV reporting.

Corruption is applied only to the held-out test split; training and
validation always see clean audio. All randomness is derived from the
master seed via purpose-tagged hashing, so adding a corruption kind or
model never perturbs existing draws, and re-running an identical config
reproduces every output byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import warnings
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import corrupt as corruptmod
from . import metrics as metricsmod
from . import nn as nnmod
from .audio import Waveform, load_wav, log_mel, mel_bank
from .corrupt import CorruptionKind, CorruptionSpec
from .qsim import CircuitSpec, build_circuit
from .quanv import quanv_forward
from .tensorio import load_tensor, save_tensor

log = logging.getLogger(__name__)

CACHE_ENV_VAR = "QUANVAUDIO_CACHE_DIR"
DEFAULT_DEPTHS = (1, 4, 10, 15, 20, 25, 30, 50)
DEFAULT_RATIOS = (0.65, 0.15, 0.20)
BASELINE_MODEL = "cnn_base"


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class ManifestRow:
    path: str
    label: str
    group: str | None = None


@dataclass(frozen=True)
class DatasetManifest:
    rows: tuple[ManifestRow, ...]

    def __post_init__(self):
        labels = sorted({r.label for r in self.rows})
        if len(labels) < 2:
            raise ManifestError(f"need at least 2 classes, found {labels}")
        object.__setattr__(self, "_label_map", {lab: i for i, lab in enumerate(labels)})

    @property
    def label_map(self) -> dict[str, int]:
        return dict(self._label_map)

    @property
    def n_classes(self) -> int:
        return len(self._label_map)

    def label_index(self, row: ManifestRow) -> int:
        return self._label_map[row.label]


def load_manifest(root: str | Path, manifest_csv: str | Path | None = None) -> DatasetManifest:
    """Dataset layout root/<label>/<file>.wav, or an explicit CSV with
    columns path,label[,group] overriding it."""
    root = Path(root)
    rows: list[ManifestRow] = []
    if manifest_csv is not None:
        with open(manifest_csv, newline="") as fh:
            for rec in csv.DictReader(fh):
                path = rec["path"]
                if not os.path.isabs(path):
                    path = str(root / path)
                rows.append(ManifestRow(path, rec["label"], rec.get("group") or None))
    else:
        for label_dir in sorted(p for p in root.iterdir() if p.is_dir()):
            for wav in sorted(label_dir.glob("*.wav")):
                rows.append(ManifestRow(str(wav), label_dir.name))
    if not rows:
        raise ManifestError(f"no audio files found under {root}")
    missing = [r.path for r in rows if not os.path.exists(r.path)]
    if missing:
        raise ManifestError(f"missing files: {missing[:5]}{'...' if len(missing) > 5 else ''}")
    return DatasetManifest(tuple(rows))


def split(
    manifest: DatasetManifest,
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
    seed: int = 0,
) -> tuple[list[ManifestRow], list[ManifestRow], list[ManifestRow]]:
    """Stratified-by-label shuffled split; disjoint and exhaustive.

    Split sizes are apportioned by largest remainder so the global counts
    match the ratios exactly (e.g. 100 samples -> 65/15/20) while staying
    as close to proportional as possible within each class.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {ratios}")
    rng = np.random.default_rng(seed)
    by_label: dict[str, list[ManifestRow]] = defaultdict(list)
    for row in manifest.rows:
        by_label[row.label].append(row)
    labels = sorted(by_label)
    counts = _apportion_splits({lab: len(by_label[lab]) for lab in labels}, ratios)
    for label in labels:
        n_train, n_val, n_test = counts[label]
        if min(n_train, n_val, n_test) < 1:
            raise ValueError(
                f"class {label!r} has only {len(by_label[label])} samples; "
                "cannot fill all three splits"
            )
    train, val, test = [], [], []
    for label in labels:
        rows = by_label[label]
        n_train, n_val, _ = counts[label]
        order = rng.permutation(len(rows))
        train += [rows[i] for i in order[:n_train]]
        val += [rows[i] for i in order[n_train : n_train + n_val]]
        test += [rows[i] for i in order[n_train + n_val :]]
    return train, val, test


def _apportion_splits(
    class_sizes: dict[str, int], ratios: tuple[float, float, float]
) -> dict[str, tuple[int, int, int]]:
    """Largest-remainder allocation of each class over the three splits,
    constrained so global split sizes hit round(ratio * N)."""
    total = sum(class_sizes.values())
    targets = [int(np.floor(r * total)) for r in ratios]
    fracs = sorted(
        range(3), key=lambda s: (ratios[s] * total - targets[s], -s), reverse=True
    )
    for s in fracs[: total - sum(targets)]:
        targets[s] += 1

    base = {
        lab: [int(np.floor(r * n)) for r in ratios]
        for lab, n in class_sizes.items()
    }
    left = {lab: class_sizes[lab] - sum(base[lab]) for lab in class_sizes}
    deficit = [targets[s] - sum(base[lab][s] for lab in class_sizes) for s in range(3)]
    remainders = sorted(
        (
            (ratios[s] * class_sizes[lab] - base[lab][s], lab, s)
            for lab in class_sizes
            for s in range(3)
        ),
        key=lambda item: (-item[0], item[1], item[2]),
    )
    for _, lab, s in remainders:
        if left[lab] > 0 and deficit[s] > 0:
            base[lab][s] += 1
            left[lab] -= 1
            deficit[s] -= 1
    return {lab: tuple(vals) for lab, vals in base.items()}


def derive_seed(master: int, tag: str) -> int:
    digest = hashlib.sha256(f"{master}/{tag}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class ExperimentConfig:
    data_root: str
    output_dir: str
    manifest_csv: str | None = None
    cache_dir: str | None = None
    models: tuple[str, ...] = ("cnn_base", "qnn_basic")
    depths: tuple[int, ...] = DEFAULT_DEPTHS
    corruptions: tuple[str, ...] = tuple(k.value for k in CorruptionKind)
    severities: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    n_seeds: int = 10
    master_seed: int = 0
    circuit_seed: int = 1234
    split_ratios: tuple[float, float, float] = DEFAULT_RATIOS
    lr: float = 1e-5
    weight_decay: float = 1e-2
    batch_size: int = 20
    max_epochs: int = 10000
    patience: int = 30

    def __post_init__(self):
        if self.n_seeds < 1:
            raise ValueError("n_seeds must be >= 1")
        if any(d < 1 for d in self.depths):
            raise ValueError("depths must be >= 1")
        for m in self.models:
            if m not in nnmod.MODEL_KINDS:
                raise ValueError(f"unknown model {m!r}")
        for c in self.corruptions:
            CorruptionKind(c)

    def train_config(self, seed: int) -> nnmod.TrainConfig:
        return nnmod.TrainConfig(
            lr=self.lr,
            weight_decay=self.weight_decay,
            batch_size=self.batch_size,
            max_epochs=self.max_epochs,
            patience=self.patience,
            seed=seed,
        )

    @staticmethod
    def from_yaml(path: str | Path) -> "ExperimentConfig":
        with open(path) as fh:
            doc = yaml.safe_load(fh)
        for key in ("models", "depths", "corruptions", "severities", "split_ratios"):
            if key in doc and doc[key] is not None:
                doc[key] = tuple(doc[key])
        return ExperimentConfig(**doc)

    def to_yaml(self, path: str | Path) -> None:
        doc = asdict(self)
        for key, val in doc.items():
            if isinstance(val, tuple):
                doc[key] = list(val)
        with open(path, "w") as fh:
            yaml.safe_dump(doc, fh, sort_keys=True)


@dataclass(frozen=True)
class ModelInstance:
    """A concrete trainable model: kind plus circuit template/depth."""

    kind: str
    depth: int = 0  # 0 for the classical baseline

    @property
    def model_id(self) -> str:
        if self.kind == BASELINE_MODEL:
            return self.kind
        return f"{self.kind}_d{self.depth}"

    @property
    def template(self) -> str:
        return nnmod.QNN_TEMPLATE.get(self.kind, "-")


def model_instances(cfg: ExperimentConfig) -> list[ModelInstance]:
    out = []
    for kind in cfg.models:
        if kind == BASELINE_MODEL:
            out.append(ModelInstance(kind))
        else:
            out.extend(ModelInstance(kind, d) for d in cfg.depths)
    return out


class FeatureCache:
    """Content-addressed cache of f64 tensors; corrupt entries recompute."""

    def __init__(self, cache_dir: str | Path | None):
        if cache_dir is None:
            cache_dir = os.environ.get(CACHE_ENV_VAR)
        self.dir = Path(cache_dir) if cache_dir else None
        if self.dir:
            self.dir.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(stage: str, payload: dict) -> str:
        blob = json.dumps({"stage": stage, **payload}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def get_or_compute(self, key: str, compute) -> np.ndarray:
        if self.dir is None:
            return compute()
        path = self.dir / f"{key}.t64"
        if path.exists():
            try:
                return load_tensor(path)
            except Exception as exc:  # corrupt cache entry
                warnings.warn(f"cache entry {path} unreadable ({exc}); recomputing")
        arr = np.asarray(compute(), dtype=np.float64)
        tmp = path.with_suffix(".tmp")
        save_tensor(tmp, arr, layout="raw")
        os.replace(tmp, path)
        return arr


def _file_sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class FeaturePipeline:
    """Waveform -> log-Mel gram -> (optionally) quanvolutional features."""

    def __init__(self, cache: FeatureCache):
        self.cache = cache
        self._file_hashes: dict[str, str] = {}
        self._banks: dict[int, object] = {}

    def file_hash(self, path: str) -> str:
        if path not in self._file_hashes:
            self._file_hashes[path] = _file_sha256(path)
        return self._file_hashes[path]

    def _gram_of(self, w: Waveform) -> np.ndarray:
        bank = self._banks.setdefault(w.sample_rate, mel_bank(w.sample_rate))
        return log_mel(w, bank).values

    def clean_gram(self, path: str) -> np.ndarray:
        key = self.cache.key("featurize", {"file": self.file_hash(path), "front": "gram"})
        return self.cache.get_or_compute(key, lambda: self._gram_of(load_wav(path)))

    def corrupted_gram(self, path: str, spec: CorruptionSpec) -> np.ndarray:
        key = self.cache.key(
            "corrupt",
            {
                "file": self.file_hash(path),
                "kind": spec.kind.value,
                "severity": spec.severity_index,
                "seed": spec.seed,
                "front": "gram",
            },
        )
        return self.cache.get_or_compute(
            key, lambda: self._gram_of(corruptmod.apply(spec, load_wav(path)))
        )

    def quanv_features(self, gram: np.ndarray, gram_key: str, spec: CircuitSpec) -> np.ndarray:
        key = self.cache.key("quanv", {"gram": gram_key, "circuit": spec.to_json()})
        return self.cache.get_or_compute(
            key, lambda: quanv_forward(gram, spec).values
        )


def _front_features(
    pipeline: FeaturePipeline,
    grams: dict[str, np.ndarray],
    gram_keys: dict[str, str],
    rows: list[ManifestRow],
    instance: ModelInstance,
    circuit: CircuitSpec | None,
) -> np.ndarray:
    if instance.kind == BASELINE_MODEL:
        return np.stack([grams[r.path][None, :, :] for r in rows])
    return np.stack(
        [
            pipeline.quanv_features(grams[r.path], gram_keys[r.path], circuit)
            for r in rows
        ]
    )


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    os.replace(tmp, path)


ACCURACY_HEADER = ["seed", "model", "template", "depth", "kind", "severity", "accuracy"]


@dataclass
class SweepResult:
    out_dir: Path
    accuracy_rows: list[list] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)


def corruption_cells(cfg: ExperimentConfig) -> list[tuple[CorruptionKind, int]]:
    return [
        (CorruptionKind(kind), sev)
        for kind in cfg.corruptions
        for sev in cfg.severities
    ]


def run_experiment(
    cfg: ExperimentConfig,
    *,
    evaluate_corrupted: bool = True,
    reuse_checkpoints: bool = False,
    models_filter: list[str] | None = None,
) -> SweepResult:
    """Full sweep over seeds x models x corruption cells.

    Per seed: split, featurize clean train/val, train every model, then
    evaluate clean and all (kind, severity) cells on corrupted test
    audio. Stage failures are recorded per cell and the run continues.
    With ``reuse_checkpoints`` an existing checkpoint file is loaded
    instead of retraining; ``models_filter`` restricts to the listed
    model ids.
    """
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "confusion").mkdir(exist_ok=True)
    cfg.to_yaml(out_dir / "config.yaml")

    manifest = load_manifest(cfg.data_root, cfg.manifest_csv)
    cache = FeatureCache(cfg.cache_dir)
    pipeline = FeaturePipeline(cache)
    instances = model_instances(cfg)
    if models_filter is not None:
        instances = [i for i in instances if i.model_id in models_filter]
        if not instances:
            raise ValueError(f"no configured model matches {models_filter}")
    cells = corruption_cells(cfg) if evaluate_corrupted else []
    result = SweepResult(out_dir)
    grids: dict[tuple[int, str], metricsmod.AccuracyGrid] = {}

    circuits = {
        inst.model_id: build_circuit(inst.template, 4, inst.depth, cfg.circuit_seed)
        for inst in instances
        if inst.kind != BASELINE_MODEL
    }
    for model_id, circ in circuits.items():
        (out_dir / f"circuit_{model_id}.json").write_text(circ.to_json())

    for seed_idx in range(cfg.n_seeds):
        train_rows, val_rows, test_rows = split(
            manifest, cfg.split_ratios, derive_seed(cfg.master_seed, f"{seed_idx}/split")
        )
        trainval_paths = {r.path for r in train_rows + val_rows}

        all_rows = train_rows + val_rows + test_rows
        grams = {r.path: pipeline.clean_gram(r.path) for r in all_rows}
        gram_keys = {
            r.path: f"clean/{pipeline.file_hash(r.path)}" for r in all_rows
        }
        labels = {
            name: np.array([manifest.label_index(r) for r in rows])
            for name, rows in (("train", train_rows), ("val", val_rows), ("test", test_rows))
        }

        for inst in instances:
            circuit = circuits.get(inst.model_id)
            feats = {
                name: _front_features(pipeline, grams, gram_keys, rows, inst, circuit)
                for name, rows in (
                    ("train", train_rows),
                    ("val", val_rows),
                    ("test", test_rows),
                )
            }
            model = nnmod.build_model(
                inst.kind,
                manifest.n_classes,
                derive_seed(cfg.master_seed, f"{seed_idx}/init/{inst.model_id}"),
            )
            ckpt_path = out_dir / f"checkpoint_{inst.model_id}_seed{seed_idx}.bin"
            if reuse_checkpoints and ckpt_path.exists():
                _, _, params = nnmod.load_checkpoint(ckpt_path)
                model.set_params(params)
            else:
                try:
                    train_result = nnmod.train(
                        model,
                        feats["train"],
                        labels["train"],
                        feats["val"],
                        labels["val"],
                        cfg.train_config(
                            derive_seed(cfg.master_seed, f"{seed_idx}/train/{inst.model_id}")
                        ),
                    )
                except nnmod.TrainingDiverged as exc:
                    result.failures.append(f"train/{seed_idx}/{inst.model_id}: {exc}")
                    continue
                _write_csv(
                    out_dir / f"history_{inst.model_id}_seed{seed_idx}.csv",
                    ["epoch", "train_loss", "val_loss", "val_acc"],
                    [
                        [h["epoch"], h["train_loss"], h["val_loss"], h["val_acc"]]
                        for h in train_result.history
                    ],
                )
                nnmod.save_checkpoint(
                    ckpt_path, inst.kind, manifest.n_classes, train_result.params
                )

            _, clean_acc, clean_preds = nnmod.evaluate(model, feats["test"], labels["test"])
            result.accuracy_rows.append(
                [seed_idx, inst.model_id, inst.template, inst.depth, "clean", 0, clean_acc]
            )
            _write_csv(
                out_dir / "confusion" / f"{inst.model_id}_seed{seed_idx}_clean.csv",
                [str(i) for i in range(manifest.n_classes)],
                metricsmod.confusion(clean_preds, labels["test"], manifest.n_classes)
                .counts.tolist(),
            )

            acc_by_kind: dict[CorruptionKind, list[float]] = defaultdict(list)
            complete = True
            for kind, sev in cells:
                try:
                    test_feats = []
                    for row in test_rows:
                        assert row.path not in trainval_paths
                        spec = CorruptionSpec(
                            kind,
                            sev,
                            derive_seed(
                                cfg.master_seed,
                                f"{seed_idx}/corrupt/{kind.value}/{sev}/"
                                f"{pipeline.file_hash(row.path)}",
                            ),
                        )
                        gram = pipeline.corrupted_gram(row.path, spec)
                        if inst.kind == BASELINE_MODEL:
                            test_feats.append(gram[None, :, :])
                        else:
                            gkey = (
                                f"{kind.value}/{sev}/{spec.seed}/"
                                f"{pipeline.file_hash(row.path)}"
                            )
                            test_feats.append(
                                pipeline.quanv_features(gram, gkey, circuit)
                            )
                    x = np.stack(test_feats)
                    _, acc, preds = nnmod.evaluate(model, x, labels["test"])
                except Exception as exc:  # cell failure; keep sweeping
                    log.exception(
                        "cell failed: seed=%d model=%s kind=%s sev=%d",
                        seed_idx, inst.model_id, kind.value, sev,
                    )
                    result.failures.append(
                        f"eval/{seed_idx}/{inst.model_id}/{kind.value}/{sev}: {exc}"
                    )
                    complete = False
                    continue
                result.accuracy_rows.append(
                    [seed_idx, inst.model_id, inst.template, inst.depth,
                     kind.value, sev, acc]
                )
                acc_by_kind[kind].append(acc)
                _write_csv(
                    out_dir / "confusion"
                    / f"{inst.model_id}_seed{seed_idx}_{kind.value}_s{sev}.csv",
                    [str(i) for i in range(manifest.n_classes)],
                    metricsmod.confusion(preds, labels["test"], manifest.n_classes)
                    .counts.tolist(),
                )

            if complete and all(
                len(acc_by_kind.get(k, [])) == corruptmod.N_SEVERITIES
                for k in CorruptionKind
            ):
                grids[(seed_idx, inst.model_id)] = metricsmod.AccuracyGrid(
                    model_id=inst.model_id,
                    clean_acc=clean_acc,
                    acc={k: tuple(acc_by_kind[k]) for k in CorruptionKind},
                    seed=seed_idx,
                )

    result.accuracy_rows.sort(key=lambda r: (r[0], r[1], r[4], r[5]))
    _write_csv(out_dir / "accuracy.csv", ACCURACY_HEADER, result.accuracy_rows)
    if evaluate_corrupted:
        write_reports(out_dir, grids, [i.model_id for i in instances], cfg.n_seeds)
    if result.failures:
        _write_csv(out_dir / "failures.csv", ["failure"], [[f] for f in result.failures])
        log.warning("sweep finished with %d failed cells", len(result.failures))
    return result


def write_reports(
    out_dir: Path,
    grids: dict[tuple[int, str], metricsmod.AccuracyGrid],
    model_ids: list[str],
    n_seeds: int,
) -> list[str]:
    """Per-seed CE/RCE reports against the baseline plus a seed-aggregated
    summary. Undefined cells are written out as 'undefined'."""
    rows: list[list] = []
    problems: list[str] = []
    for seed_idx in range(n_seeds):
        base = grids.get((seed_idx, BASELINE_MODEL))
        if base is None:
            problems.append(f"seed {seed_idx}: baseline grid incomplete; no report")
            continue
        for model_id in model_ids:
            grid = grids.get((seed_idx, model_id))
            if grid is None:
                problems.append(f"seed {seed_idx}: {model_id} grid incomplete")
                continue
            for kind in CorruptionKind:
                try:
                    ce = metricsmod.corruption_error(grid, base, kind)
                except metricsmod.UndefinedMetricError:
                    ce = "undefined"
                try:
                    rce = metricsmod.relative_corruption_error(grid, base, kind)
                except metricsmod.UndefinedMetricError:
                    rce = "undefined"
                rows.append([seed_idx, model_id, kind.value, ce, rce])
    _write_csv(
        out_dir / "report_per_seed.csv",
        ["seed", "model", "kind", "CE", "RCE"],
        rows,
    )

    def _mean_std(values: list) -> tuple:
        # any undefined per-seed cell poisons the aggregate for that metric
        if not values or any(v == "undefined" for v in values):
            return "undefined", "undefined"
        mean = float(np.mean(values))
        std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
        return mean, std

    agg_rows: list[list] = []
    for model_id in sorted({r[1] for r in rows}):
        model_rows = [r for r in rows if r[1] == model_id]
        for kind in CorruptionKind:
            kind_rows = [r for r in model_rows if r[2] == kind.value]
            ce_mean, ce_std = _mean_std([r[3] for r in kind_rows])
            rce_mean, rce_std = _mean_std([r[4] for r in kind_rows])
            agg_rows.append([model_id, kind.value, ce_mean, ce_std, rce_mean, rce_std])
        mces, rmces = [], []
        for seed_idx in sorted({r[0] for r in model_rows}):
            seed_rows = [r for r in model_rows if r[0] == seed_idx]
            for values, out in (([r[3] for r in seed_rows], mces),
                                ([r[4] for r in seed_rows], rmces)):
                if any(v == "undefined" for v in values):
                    out.append("undefined")
                else:
                    out.append(float(np.mean(values)))
        mce_mean, mce_std = _mean_std(mces)
        rmce_mean, rmce_std = _mean_std(rmces)
        agg_rows.append([model_id, "mCE/RmCE", mce_mean, mce_std, rmce_mean, rmce_std])
    _write_csv(
        out_dir / "report.csv",
        ["model", "kind", "CE_mean", "CE_std", "RCE_mean", "RCE_std"],
        agg_rows,
    )
    if problems:
        _write_csv(out_dir / "report_problems.csv", ["problem"], [[p] for p in problems])
    return problems


def grids_from_accuracy_csv(path: str | Path) -> dict[tuple[int, str], metricsmod.AccuracyGrid]:
    """Rebuild per-seed accuracy grids from an accuracy.csv file."""
    clean: dict[tuple[int, str], float] = {}
    acc: dict[tuple[int, str], dict[CorruptionKind, dict[int, float]]] = defaultdict(
        lambda: defaultdict(dict)
    )
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            key = (int(rec["seed"]), rec["model"])
            if rec["kind"] == "clean":
                clean[key] = float(rec["accuracy"])
            else:
                kind = CorruptionKind(rec["kind"])
                acc[key][kind][int(rec["severity"])] = float(rec["accuracy"])
    grids = {}
    for key, per_kind in acc.items():
        if key not in clean:
            continue
        if set(per_kind) != set(CorruptionKind):
            continue
        if any(sorted(row) != list(range(1, corruptmod.N_SEVERITIES + 1))
               for row in per_kind.values()):
            continue
        grids[key] = metricsmod.AccuracyGrid(
            model_id=key[1],
            clean_acc=clean[key],
            acc={
                k: tuple(per_kind[k][s] for s in range(1, corruptmod.N_SEVERITIES + 1))
                for k in CorruptionKind
            },
            seed=key[0],
        )
    return grids
