"""Shared data types: datasets, score vectors, splits and seed derivation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Example:
    id: int
    features: tuple[float, ...]
    label: int


class Dataset:
    """Ordered, immutable collection of labelled examples.

    Stored column-wise: ``ids`` (int64), ``X`` (float64, n x d) and ``y``
    (int64 in {0, 1}). Arrays are read-only; every transformation returns a
    new Dataset.
    """

    __slots__ = ("ids", "X", "y")

    def __init__(self, ids, X, y, feature_dim: int | None = None):
        ids = np.asarray(ids, dtype=np.int64).reshape(-1)
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        n = ids.shape[0]
        if X.ndim == 1 and n == 0:
            X = X.reshape(0, feature_dim or 0)
        if X.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {X.shape}")
        if feature_dim is not None and X.shape[1] != feature_dim:
            raise ValueError(f"feature_dim {feature_dim} != feature columns {X.shape[1]}")
        if X.shape[0] != n or y.shape[0] != n:
            raise ValueError("ids, features and labels must have the same length")
        if not np.all(np.isfinite(X)):
            raise ValueError("features must be finite")
        if n and not np.all((y == 0) | (y == 1)):
            raise ValueError("labels must be 0 or 1")
        if np.unique(ids).shape[0] != n:
            raise ValueError("example ids must be unique")
        object.__setattr__(self, "ids", _frozen(ids))
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "y", _frozen(y.astype(np.int64)))

    def __setattr__(self, name, value):
        raise AttributeError("Dataset is immutable")

    @classmethod
    def from_examples(cls, examples: Iterable[Example], feature_dim: int | None = None) -> "Dataset":
        examples = list(examples)
        if not examples:
            return cls([], np.zeros((0, feature_dim or 0)), [], feature_dim)
        return cls(
            [e.id for e in examples],
            [e.features for e in examples],
            [e.label for e in examples],
            feature_dim,
        )

    @property
    def feature_dim(self) -> int:
        return self.X.shape[1]

    def __len__(self) -> int:
        return self.ids.shape[0]

    def __iter__(self) -> Iterator[Example]:
        for i in range(len(self)):
            yield Example(int(self.ids[i]), tuple(float(v) for v in self.X[i]), int(self.y[i]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.X.shape == other.X.shape
            and np.array_equal(self.ids, other.ids)
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Dataset(n={len(self)}, feature_dim={self.feature_dim}, positives={self.n_positive})"

    @property
    def n_positive(self) -> int:
        return int(self.y.sum())

    @property
    def n_negative(self) -> int:
        return len(self) - self.n_positive

    def index_of(self, ids: Sequence[int]) -> np.ndarray:
        """Row positions of ``ids``; raises KeyError on an unknown id."""
        lookup = {int(v): i for i, v in enumerate(self.ids)}
        try:
            return np.array([lookup[int(i)] for i in ids], dtype=np.int64)
        except KeyError as exc:
            raise KeyError(f"unknown example id {exc.args[0]}") from None

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.ids[rows], self.X[rows].reshape(-1, self.feature_dim), self.y[rows], self.feature_dim)

    def with_labels(self, y) -> "Dataset":
        return Dataset(self.ids, self.X, y, self.feature_dim)


class ScoreVector:
    """Per-example predicted probabilities, keyed by example id."""

    __slots__ = ("ids", "scores")

    def __init__(self, ids, scores):
        ids = np.asarray(ids, dtype=np.int64).reshape(-1)
        scores = np.asarray(scores, dtype=np.float64).reshape(-1)
        if ids.shape != scores.shape:
            raise ValueError("ids and scores must have the same length")
        if np.any(~np.isfinite(scores)) or np.any((scores < 0.0) | (scores > 1.0)):
            raise ValueError("scores must lie in [0, 1]")
        object.__setattr__(self, "ids", _frozen(ids))
        object.__setattr__(self, "scores", _frozen(scores))

    def __setattr__(self, name, value):
        raise AttributeError("ScoreVector is immutable")

    def __len__(self) -> int:
        return self.ids.shape[0]

    def as_dict(self) -> dict[int, float]:
        return {int(i): float(s) for i, s in zip(self.ids, self.scores)}

    def aligned_to(self, data: Dataset) -> np.ndarray:
        """Scores reordered to match ``data``'s row order.

        Raises ValueError unless the id sets are identical.
        """
        if np.array_equal(self.ids, data.ids):
            return self.scores
        if len(self) != len(data):
            raise ValueError(f"score ids do not match dataset ids ({len(self)} vs {len(data)} examples)")
        order = np.argsort(self.ids, kind="stable")
        pos = np.searchsorted(self.ids[order], data.ids)
        pos = np.clip(pos, 0, len(self) - 1)
        if not np.array_equal(self.ids[order][pos], data.ids):
            raise ValueError("score ids do not match dataset ids")
        return self.scores[order][pos]


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    val_fraction_of_train: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if not 0.0 <= self.val_fraction_of_train < 1.0:
            raise ValueError(f"val_fraction_of_train must be in [0, 1), got {self.val_fraction_of_train}")


def _floor(x: float) -> int:
    # absorb representation error such as 100 * (1 - 0.8) == 19.999999999999996
    return int(math.floor(x + 1e-9))


def split_dataset(data: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset, Dataset]:
    """Seeded shuffle of rows, then contiguous slices into (train, val, test).

    Test and validation sizes are floor-rounded; the remainder goes to
    train. Each part keeps the input's relative row order.
    """
    n = len(data)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    n_test = _floor(n * (1.0 - spec.train_fraction))
    n_val = _floor((n - n_test) * spec.val_fraction_of_train)
    perm = np.random.default_rng(seed_to_uint(spec.seed)).permutation(n)
    test_rows = np.sort(perm[:n_test])
    val_rows = np.sort(perm[n_test:n_test + n_val])
    train_rows = np.sort(perm[n_test + n_val:])
    return data.take(train_rows), data.take(val_rows), data.take(test_rows)


def relabel(data: Dataset, flips: Mapping[int, int] | Iterable[tuple[int, int]]) -> Dataset:
    """Copy of ``data`` with the listed labels replaced."""
    pairs = list(flips.items()) if isinstance(flips, Mapping) else list(flips)
    if not pairs:
        return data
    for _, label in pairs:
        if label not in (0, 1):
            raise ValueError(f"new label must be 0 or 1, got {label!r}")
    rows = data.index_of([i for i, _ in pairs])
    y = data.y.copy()
    y[rows] = [label for _, label in pairs]
    return data.with_labels(y)


def seed_to_uint(seed: int) -> int:
    """Map any Python int onto the unsigned 64-bit range numpy accepts."""
    return int(seed) & 0xFFFFFFFFFFFFFFFF


def derive_seed(base_seed: int, *keys: int) -> int:
    """Child seed for a (base_seed, *keys) counter tuple.

    Uses numpy's SeedSequence spawn-key hashing, so nearby counters give
    statistically independent streams and the mapping is stable across runs.
    """
    ss = np.random.SeedSequence(seed_to_uint(base_seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
