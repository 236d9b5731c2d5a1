"""Synthetic Gaussian tasks, minority oversampling and CSV I/O."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .core import Dataset, seed_to_uint


class CsvFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GaussianTaskSpec:
    """Two isotropic Gaussian clusters.

    ``n_per_class`` is the positive-class count; the negative class gets
    ``round(n_per_class * imbalance_ratio)`` examples.
    """

    n_per_class: int = 300
    mean_neg: tuple[float, ...] = (0.0, 0.0)
    mean_pos: tuple[float, ...] = (1.5, 1.5)
    cov_scale: float = 1.0
    imbalance_ratio: float = 3.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mean_neg", tuple(float(v) for v in self.mean_neg))
        object.__setattr__(self, "mean_pos", tuple(float(v) for v in self.mean_pos))
        if len(self.mean_neg) != len(self.mean_pos) or not self.mean_neg:
            raise ValueError("class means must be non-empty and of equal dimension")
        if not all(math.isfinite(v) for v in self.mean_neg + self.mean_pos):
            raise ValueError("class means must be finite")
        if not (math.isfinite(self.cov_scale) and self.cov_scale > 0):
            raise ValueError(f"degenerate covariance scale {self.cov_scale}")
        if not (math.isfinite(self.imbalance_ratio) and self.imbalance_ratio > 0):
            raise ValueError("imbalance_ratio must be positive")
        if self.n_per_class < 1:
            raise ValueError("n_per_class must be >= 1")

    @property
    def dim(self) -> int:
        return len(self.mean_neg)

    @property
    def n_negative(self) -> int:
        return max(1, int(math.floor(self.n_per_class * self.imbalance_ratio + 0.5)))


def generate_gaussian_task(spec: GaussianTaskSpec) -> Dataset:
    """Negatives first, then positives; ids 0..n-1 in that order."""
    rng = np.random.default_rng(seed_to_uint(spec.seed))
    sd = math.sqrt(spec.cov_scale)
    neg = rng.normal(0.0, sd, size=(spec.n_negative, spec.dim)) + np.array(spec.mean_neg)
    pos = rng.normal(0.0, sd, size=(spec.n_per_class, spec.dim)) + np.array(spec.mean_pos)
    X = np.vstack([neg, pos])
    y = np.r_[np.zeros(spec.n_negative, dtype=np.int64), np.ones(spec.n_per_class, dtype=np.int64)]
    return Dataset(np.arange(X.shape[0]), X, y)


def swap_labels(data: Dataset) -> Dataset:
    return data.with_labels(1 - data.y)


def balance_by_oversampling(train: Dataset, jitter_scale: float = 0.05, seed: int = 0,
                            id_start: int | None = None) -> Dataset:
    """Append jittered copies of minority examples until both classes are equal.

    Copies cycle through a seeded permutation of the minority class, so
    every minority example is reused before any is reused twice. Jitter is
    Gaussian with per-feature standard deviation ``jitter_scale`` times
    that feature's std over ``train``. New ids start at ``id_start``
    (default: one past the largest id in ``train``); pass a larger value
    when ``train`` is one split of a bigger dataset so minted ids stay
    unique across splits.
    """
    n_pos, n_neg = train.n_positive, train.n_negative
    if n_pos == 0 or n_neg == 0:
        raise ValueError("balancing needs both classes present")
    if jitter_scale < 0:
        raise ValueError("jitter_scale must be non-negative")
    deficit = abs(n_pos - n_neg)
    if deficit == 0:
        return train
    minority = 1 if n_pos < n_neg else 0
    rng = np.random.default_rng(seed_to_uint(seed))
    rows = np.flatnonzero(train.y == minority)
    picks = np.resize(rng.permutation(rows), deficit)
    noise = rng.normal(size=(deficit, train.feature_dim)) * (jitter_scale * train.X.std(axis=0))
    new_X = train.X[picks] + noise
    start = int(train.ids.max()) + 1 if id_start is None else int(id_start)
    if start <= int(train.ids.max()):
        raise ValueError("id_start must exceed every existing id")
    new_ids = np.arange(start, start + deficit)
    return Dataset(
        np.r_[train.ids, new_ids],
        np.vstack([train.X, new_X]),
        np.r_[train.y, np.full(deficit, minority)],
    )


Column = Union[str, int]


@dataclass(frozen=True)
class CsvSchema:
    """Column layout of a dataset CSV.

    Columns are header names when ``has_header`` is true, or zero-based
    positions (ints) in either case. ``id_column=None`` numbers rows from 0.
    """

    feature_columns: tuple[Column, ...]
    label_column: Column = "label"
    has_header: bool = True
    id_column: Column | None = "id"

    @classmethod
    def default(cls, feature_dim: int) -> "CsvSchema":
        return cls(tuple(f"x{i}" for i in range(feature_dim)))


def _resolve(col: Column, header: Sequence[str] | None) -> int:
    if isinstance(col, int):
        return col
    if header is None:
        raise CsvFormatError(f"column {col!r} given by name but the file has no header")
    try:
        return list(header).index(col)
    except ValueError:
        raise CsvFormatError(f"missing column {col!r}") from None


def load_csv(path, schema: CsvSchema) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = None
        if schema.has_header:
            header = next(reader, None)
            if header is None:
                raise CsvFormatError(f"{path}: empty file")
        feat_idx = [_resolve(c, header) for c in schema.feature_columns]
        label_idx = _resolve(schema.label_column, header)
        id_idx = None if schema.id_column is None else _resolve(schema.id_column, header)
        names = header or [str(i) for i in range(max([label_idx, *feat_idx, id_idx or 0]) + 1)]

        ids, X, y = [], [], []
        first_line = 2 if schema.has_header else 1
        for lineno, row in enumerate(reader, start=first_line):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                cell = label_idx
                label = row[label_idx].strip()
                if label not in ("0", "1"):
                    raise CsvFormatError(
                        f"{path}: line {lineno}, column {names[label_idx]!r}: label {label!r} is not 0 or 1")
                feats = []
                for cell in feat_idx:
                    v = float(row[cell])
                    if not math.isfinite(v):
                        raise ValueError
                    feats.append(v)
                if id_idx is None:
                    ident = len(ids)
                else:
                    cell = id_idx
                    ident = int(row[id_idx])
            except IndexError:
                raise CsvFormatError(f"{path}: line {lineno}: row has {len(row)} cells, missing column {cell}") from None
            except CsvFormatError:
                raise
            except ValueError:
                raise CsvFormatError(
                    f"{path}: line {lineno}, column {names[cell]!r}: cannot parse {row[cell]!r}") from None
            ids.append(ident)
            X.append(feats)
            y.append(int(label))
    if not ids:
        return Dataset([], np.zeros((0, len(feat_idx))), [], len(feat_idx))
    return Dataset(ids, X, y, len(feat_idx))


def save_csv(data: Dataset, path, schema: CsvSchema | None = None) -> None:
    """Write ``data`` so that ``load_csv(path, schema)`` reproduces it exactly."""
    schema = schema or CsvSchema.default(data.feature_dim)
    if len(schema.feature_columns) != data.feature_dim:
        raise ValueError("schema feature columns do not match dataset feature_dim")
    cols: dict[int, str] = {}
    header = {}
    slots: list[tuple[Column, str]] = [(c, f"f{i}") for i, c in enumerate(schema.feature_columns)]
    slots.append((schema.label_column, "label"))
    if schema.id_column is not None:
        slots.append((schema.id_column, "id"))
    # name-keyed schemas are written as id, features..., label
    if all(isinstance(c, str) for c, _ in slots):
        order = ([schema.id_column] if schema.id_column is not None else []) + list(schema.feature_columns) + [schema.label_column]
        position = {name: i for i, name in enumerate(order)}
    else:
        position = {c: c for c, _ in slots}
        if not all(isinstance(c, int) for c, _ in slots):
            raise ValueError("schema mixes named and positional columns")
    width = max(position.values()) + 1
    for c, role in slots:
        cols[position[c]] = role
        header[position[c]] = str(c)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if schema.has_header:
            w.writerow([header.get(i, "") for i in range(width)])
        for i in range(len(data)):
            out = [""] * width
            for pos, role in cols.items():
                if role == "id":
                    out[pos] = str(int(data.ids[i]))
                elif role == "label":
                    out[pos] = str(int(data.y[i]))
                else:
                    out[pos] = format(float(data.X[i, int(role[1:])]), ".17g")
            w.writerow(out)
