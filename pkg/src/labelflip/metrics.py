"""Confusion matrices, recall/precision/F1 and rank-based AUROC."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, ScoreVector

CSV_COLUMNS = ("threshold", "tn", "fp", "fn", "tp", "recall", "precision", "f1", "auroc")


@dataclass(frozen=True)
class ConfusionMatrix:
    tn: int
    fp: int
    fn: int
    tp: int

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.fn + self.tp


def confusion_at_threshold(scores: ScoreVector, data: Dataset, threshold: float = 0.5) -> ConfusionMatrix:
    """Tally predictions against labels; predicted positive iff score > threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    p = scores.aligned_to(data)
    pred = p > threshold
    truth = data.y == 1
    return ConfusionMatrix(
        tn=int(np.sum(~pred & ~truth)),
        fp=int(np.sum(pred & ~truth)),
        fn=int(np.sum(~pred & truth)),
        tp=int(np.sum(pred & truth)),
    )


def recall(m: ConfusionMatrix) -> float:
    d = m.tp + m.fn
    return m.tp / d if d else 0.0


def precision(m: ConfusionMatrix) -> float:
    d = m.tp + m.fp
    return m.tp / d if d else 0.0


def f1_from(precision_value: float, recall_value: float) -> float:
    """Harmonic mean; 0 when both inputs are 0."""
    s = precision_value + recall_value
    return 2.0 * precision_value * recall_value / s if s else 0.0


def f1(m: ConfusionMatrix) -> float:
    return f1_from(precision(m), recall(m))


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    # boundaries of tie groups in sorted order
    starts = np.flatnonzero(np.r_[True, sorted_vals[1:] != sorted_vals[:-1]])
    ends = np.r_[starts[1:], values.shape[0]]
    avg = (starts + ends + 1) / 2.0  # 1-based mean rank of each group
    ranks = np.empty(values.shape[0])
    ranks[order] = np.repeat(avg, ends - starts)
    return ranks


def auroc(scores: ScoreVector, data: Dataset) -> float:
    """Probability a random positive outscores a random negative (ties count 1/2).

    Computed exactly from the Mann-Whitney rank sum of the positives.
    """
    p = scores.aligned_to(data)
    pos = data.y == 1
    n_pos = int(pos.sum())
    n_neg = pos.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUROC needs at least one positive and one negative example")
    ranks = _midranks(p)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass(frozen=True)
class MetricsReport:
    recall: float
    precision: float
    f1: float
    auroc: float
    matrix: ConfusionMatrix
    threshold: float

    def csv_row(self) -> list[str]:
        m = self.matrix
        return [
            format(self.threshold, "g"), str(m.tn), str(m.fp), str(m.fn), str(m.tp),
            f"{self.recall:.4f}", f"{self.precision:.4f}", f"{self.f1:.4f}", f"{self.auroc:.4f}",
        ]


def evaluate(scores: ScoreVector, data: Dataset, threshold: float = 0.5) -> MetricsReport:
    """All table metrics at ``threshold``. AUROC is NaN on single-class data."""
    m = confusion_at_threshold(scores, data, threshold)
    r, p = recall(m), precision(m)
    try:
        area = auroc(scores, data)
    except ValueError:
        area = float("nan")
    return MetricsReport(r, p, f1_from(p, r), area, m, float(threshold))
