"""Accuracy grids, confusion matrices, and baseline-normalized
corruption-error metrics (CE, mCE, RCE, RmCE)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corrupt import N_SEVERITIES, CorruptionKind

N_KINDS = 4


class UndefinedMetricError(ArithmeticError):
    """A normalizing denominator is zero; the metric has no value."""


@dataclass(frozen=True)
class AccuracyGrid:
    model_id: str
    clean_acc: float
    acc: dict[CorruptionKind, tuple[float, ...]]  # severity 1..6 per kind
    seed: int = 0

    def __post_init__(self):
        for kind in CorruptionKind:
            if kind not in self.acc:
                raise ValueError(f"grid for {self.model_id} missing {kind.value}")
            if len(self.acc[kind]) != N_SEVERITIES:
                raise ValueError(
                    f"{self.model_id}/{kind.value}: expected {N_SEVERITIES} "
                    f"severities, got {len(self.acc[kind])}"
                )
        vals = [self.clean_acc] + [a for row in self.acc.values() for a in row]
        if any(not 0.0 <= v <= 1.0 for v in vals):
            raise ValueError(f"accuracies must lie in [0,1] for {self.model_id}")


def corruption_error(model: AccuracyGrid, base: AccuracyGrid,
                     kind: CorruptionKind) -> float:
    """Summed error rate over severities, normalized by the baseline's."""
    num = sum(1.0 - a for a in model.acc[kind])
    den = sum(1.0 - a for a in base.acc[kind])
    if den == 0.0:
        raise UndefinedMetricError(
            f"baseline {base.model_id} is perfect under {kind.value}; CE undefined"
        )
    return num / den


def relative_corruption_error(model: AccuracyGrid, base: AccuracyGrid,
                              kind: CorruptionKind) -> float:
    """Degradation from own clean accuracy, normalized by the baseline's.

    May be negative when corrupted accuracy exceeds clean accuracy; the
    sign is preserved.
    """
    num = sum(model.clean_acc - a for a in model.acc[kind])
    den = sum(base.clean_acc - a for a in base.acc[kind])
    if den == 0.0:
        raise UndefinedMetricError(
            f"baseline {base.model_id} shows no degradation under "
            f"{kind.value}; RCE undefined"
        )
    return num / den


def mean_metric(per_kind: dict[CorruptionKind, float]) -> float:
    if set(per_kind) != set(CorruptionKind):
        raise ValueError(f"need all {N_KINDS} corruption kinds, got {sorted(per_kind)}")
    return float(np.mean([per_kind[k] for k in CorruptionKind]))


@dataclass(frozen=True)
class RobustnessReport:
    model_id: str
    baseline_id: str
    seed: int
    ce: dict[CorruptionKind, float]
    rce: dict[CorruptionKind, float]
    mce: float
    rmce: float


def robustness_report(model: AccuracyGrid, base: AccuracyGrid) -> RobustnessReport:
    ce = {k: corruption_error(model, base, k) for k in CorruptionKind}
    rce = {k: relative_corruption_error(model, base, k) for k in CorruptionKind}
    return RobustnessReport(
        model_id=model.model_id,
        baseline_id=base.model_id,
        seed=model.seed,
        ce=ce,
        rce=rce,
        mce=mean_metric(ce),
        rmce=mean_metric(rce),
    )


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray = field(repr=False)  # rows true, columns predicted

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    def accuracy(self) -> float:
        return float(np.trace(self.counts) / self.counts.sum())

    def per_class_accuracy(self) -> np.ndarray:
        totals = self.counts.sum(axis=1)
        with np.errstate(invalid="ignore"):
            return np.where(totals > 0, np.diag(self.counts) / totals, np.nan)


def confusion(preds, labels, n_classes: int) -> ConfusionMatrix:
    preds = np.asarray(preds, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if preds.shape != labels.shape:
        raise ValueError(f"shape mismatch: {preds.shape} vs {labels.shape}")
    if preds.size and (max(preds.max(), labels.max()) >= n_classes
                       or min(preds.min(), labels.min()) < 0):
        raise ValueError(f"labels/predictions out of range for {n_classes} classes")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (labels, preds), 1)
    return ConfusionMatrix(counts)


@dataclass(frozen=True)
class AggregatedCell:
    mean: float
    std: float


def aggregate_seeds(reports: list[RobustnessReport]) -> dict[str, AggregatedCell]:
    """Per-cell mean and sample (n-1) standard deviation across seeds.

    Keys are 'ce/<kind>', 'rce/<kind>', 'mce', 'rmce'.
    """
    if len(reports) < 2:
        raise ValueError("need at least two reports to aggregate")
    ids = {(r.model_id, r.baseline_id) for r in reports}
    if len(ids) != 1:
        raise ValueError(f"mismatched report structure: {sorted(ids)}")

    def cell(values):
        arr = np.asarray(values, dtype=np.float64)
        return AggregatedCell(float(arr.mean()), float(arr.std(ddof=1)))

    out: dict[str, AggregatedCell] = {}
    for kind in CorruptionKind:
        out[f"ce/{kind.value}"] = cell([r.ce[kind] for r in reports])
        out[f"rce/{kind.value}"] = cell([r.rce[kind] for r in reports])
    out["mce"] = cell([r.mce for r in reports])
    out["rmce"] = cell([r.rmce for r in reports])
    return out
