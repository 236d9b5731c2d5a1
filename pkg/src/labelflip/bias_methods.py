"""Label-flip retraining plus the class-weight, threshold and ensemble baselines.

The label-flip method scores the training set with a pretrained model,
collects the examples it gets wrong in the direction we tolerate
(false positives when minimising false negatives, and vice versa),
overwrites the ground-truth label of a fraction of them with the
model's own prediction, and warm-start retrains on the altered labels.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import metrics
from .core import Dataset, ScoreVector, relabel, seed_to_uint
from .metrics import ConfusionMatrix
from .models import Classifier, ClassifierSpec, TrainConfig, predict_scores
from .models import train as train_model


class Direction(str, enum.Enum):
    MINIMIZE_FN = "minimize_fn"
    MINIMIZE_FP = "minimize_fp"


class SelectionPolicy(str, enum.Enum):
    SCORE_RANKED = "score_ranked"
    SEEDED_RANDOM = "seeded_random"


@dataclass(frozen=True)
class BiasPlan:
    direction: Direction = Direction.MINIMIZE_FN
    flip_fraction: float = 1.0
    selection_policy: SelectionPolicy = SelectionPolicy.SCORE_RANKED
    retrain: TrainConfig = field(default_factory=TrainConfig)
    threshold: float = 0.5
    selection_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        object.__setattr__(self, "selection_policy", SelectionPolicy(self.selection_policy))
        if not 0.0 <= self.flip_fraction <= 1.0:
            raise ValueError(f"flip_fraction must be in [0, 1], got {self.flip_fraction}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")


@dataclass(frozen=True)
class FlipPool:
    """Wrongly predicted training ids, most confidently wrong first."""

    ids: tuple[int, ...]
    scores: tuple[float, ...]
    direction: Direction
    matrix: ConfusionMatrix | None = None

    def __len__(self):
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)


@dataclass(frozen=True)
class FlipRecord:
    flipped_ids: tuple[int, ...]
    old_labels: tuple[int, ...]
    new_labels: tuple[int, ...]
    scores: tuple[float, ...]  # model score at selection time, NaN if unknown
    source_matrix: ConfusionMatrix | None
    pool_size: int

    def __len__(self):
        return len(self.flipped_ids)

    def to_csv(self, path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "old_label", "new_label", "score_at_selection"])
            for row in zip(self.flipped_ids, self.old_labels, self.new_labels, self.scores):
                w.writerow([row[0], row[1], row[2], format(row[3], ".17g")])


def round_half_up(x: float) -> int:
    # tolerance keeps products like 0.6 * 10 == 6.000000000000001 on the right side
    return int(math.floor(x + 0.5 + 1e-9))


def identify_pool(model: Classifier, train: Dataset, direction: Direction | str,
                  threshold: float = 0.5) -> FlipPool:
    """False positives (minimize_fn) or false negatives (minimize_fp) of ``model`` on ``train``.

    Ordered by descending score for FPs and ascending score for FNs; ties
    keep dataset order.
    """
    direction = Direction(direction)
    scores = predict_scores(model, train)
    p = scores.scores
    matrix = metrics.confusion_at_threshold(scores, train, threshold)
    if direction is Direction.MINIMIZE_FN:
        rows = np.flatnonzero((train.y == 0) & (p > threshold))
        rows = rows[np.argsort(-p[rows], kind="stable")]
    else:
        rows = np.flatnonzero((train.y == 1) & (p <= threshold))
        rows = rows[np.argsort(p[rows], kind="stable")]
    return FlipPool(
        tuple(int(i) for i in train.ids[rows]),
        tuple(float(s) for s in p[rows]),
        direction,
        matrix,
    )


def apply_label_flip(train: Dataset, pool: FlipPool | Sequence[int], plan: BiasPlan) -> tuple[Dataset, FlipRecord]:
    """Flip ``round_half_up(flip_fraction * len(pool))`` labels taken from ``pool``.

    score_ranked takes the head of the pool; seeded_random draws a uniform
    sample with ``plan.selection_seed`` and keeps it in pool order.
    """
    if isinstance(pool, FlipPool):
        ids, pool_scores, matrix = list(pool.ids), list(pool.scores), pool.matrix
    else:
        ids = [int(i) for i in pool]
        pool_scores, matrix = [float("nan")] * len(ids), None
    rows = train.index_of(ids)  # KeyError for foreign ids
    k = round_half_up(plan.flip_fraction * len(ids))
    if plan.selection_policy is SelectionPolicy.SCORE_RANKED:
        chosen = list(range(k))
    else:
        rng = np.random.default_rng(seed_to_uint(plan.selection_seed))
        chosen = sorted(int(c) for c in rng.choice(len(ids), size=k, replace=False))

    old_label, new_label = (0, 1) if plan.direction is Direction.MINIMIZE_FN else (1, 0)
    flipped = [ids[c] for c in chosen]
    current = train.y[rows[chosen]] if chosen else np.array([], dtype=np.int64)
    if np.any(current != old_label):
        raise ValueError(f"pool contains ids whose label is not {old_label}; wrong direction for this pool")
    record = FlipRecord(
        flipped_ids=tuple(flipped),
        old_labels=(old_label,) * k,
        new_labels=(new_label,) * k,
        scores=tuple(pool_scores[c] for c in chosen),
        source_matrix=matrix,
        pool_size=len(ids),
    )
    return relabel(train, [(i, new_label) for i in flipped]), record


def run_label_flip_method(pretrained: Classifier, train: Dataset, plan: BiasPlan,
                          retrain_if_unchanged: bool = False) -> tuple[Classifier, FlipRecord]:
    """Pool -> flip -> warm-start retrain.

    When no label ends up flipped the pretrained model is returned as is,
    unless ``retrain_if_unchanged`` asks for the extra epochs anyway.
    ``train`` itself is never modified.
    """
    config = plan.retrain
    if config.warm_start is None:
        config = replace(config, warm_start=pretrained)
    elif config.warm_start != pretrained:
        raise ValueError("plan.retrain.warm_start must be the pretrained model")
    pool = identify_pool(pretrained, train, plan.direction, plan.threshold)
    flipped_train, record = apply_label_flip(train, pool, plan)
    if not record.flipped_ids and not retrain_if_unchanged:
        return pretrained, record
    return train_model(flipped_train, pretrained.spec, config), record


def train_with_class_weights(data: Dataset, spec: ClassifierSpec, config: TrainConfig,
                             weights: tuple[float, float] | None = None) -> Classifier:
    """Train with (w_neg, w_pos) loss weights, e.g. (1, 50) for the '0:1, 1:50' setting."""
    if weights is not None:
        config = replace(config, class_weights=weights)
    return train_model(data, spec, config)


def threshold_shift_predict(model: Classifier, data: Dataset, threshold: float) -> ConfusionMatrix:
    return metrics.confusion_at_threshold(predict_scores(model, data), data, threshold)


def ensemble_scores(models: Sequence[Classifier], data: Dataset) -> ScoreVector:
    """Unweighted mean of member scores per example."""
    if not models:
        raise ValueError("ensemble needs at least one model")
    stacked = np.vstack([predict_scores(m, data).scores for m in models])
    mean = stacked.mean(axis=0)
    # float rounding can push the mean a hair outside the member range
    mean = np.clip(mean, stacked.min(axis=0), stacked.max(axis=0))
    return ScoreVector(data.ids, mean)
