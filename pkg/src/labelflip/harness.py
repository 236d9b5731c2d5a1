"""Sweeps over flip fractions, class weights and thresholds, plus ensemble before/after runs.

Seed scheme: replicate ``r`` gets ``replicate_seed = derive_seed(base_seed, r)``.
Every random draw inside that replicate uses ``derive_seed(replicate_seed, purpose, ...)``
with purposes

    0  data generation          2  minority oversampling
    1  train/val/test split     3  model init and batch order (, model index)
    4  seeded_random flip selection

so ladder values within a replicate share data, split and base model.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from . import metrics
from .bias_methods import (BiasPlan, Direction, FlipRecord, SelectionPolicy, ensemble_scores,
                           run_label_flip_method, train_with_class_weights)
from .core import Dataset, SplitSpec, derive_seed, split_dataset
from .data import (CsvSchema, GaussianTaskSpec, balance_by_oversampling, generate_gaussian_task,
                   load_csv, save_csv, swap_labels)
from .metrics import MetricsReport
from .models import Classifier, ClassifierSpec, TrainConfig, TrainingDivergedError, predict_scores, save_classifier, train

log = logging.getLogger(__name__)

METHODS = ("label_flip", "class_weights", "threshold")
SEED_DATA, SEED_SPLIT, SEED_BALANCE, SEED_MODEL, SEED_SELECT = range(5)

# failures a sweep records as an error row instead of aborting
CELL_ERRORS = (TrainingDivergedError, ValueError, FloatingPointError, np.linalg.LinAlgError)


class HygieneError(AssertionError):
    """A flipped id reached val/test, or test labels changed during a run."""


@dataclass(frozen=True)
class TaskSetup:
    """Where the data comes from and how it is split and balanced.

    ``task`` is either a Gaussian task (its own ``seed`` is replaced per
    replicate) or a path to a CSV file read with ``csv_schema``.
    """

    task: Union[GaussianTaskSpec, str, Path] = field(default_factory=GaussianTaskSpec)
    csv_schema: CsvSchema | None = None
    swap_labels: bool = False
    train_fraction: float = 0.8
    val_fraction_of_train: float = 0.2
    balance: bool = True
    jitter_scale: float = 0.05


@dataclass(frozen=True)
class SweepSpec:
    setup: TaskSetup
    model: ClassifierSpec
    train: TrainConfig
    method: str
    ladder: tuple
    replicates: int = 1
    base_seed: int = 0
    direction: Direction = Direction.MINIMIZE_FN
    selection_policy: SelectionPolicy = SelectionPolicy.SCORE_RANKED
    pool_threshold: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "ladder", tuple(self.ladder))
        object.__setattr__(self, "direction", Direction(self.direction))
        object.__setattr__(self, "selection_policy", SelectionPolicy(self.selection_policy))
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.ladder:
            raise ValueError("ladder must be non-empty")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        for v in self.ladder:
            if self.method == "class_weights":
                if len(v) != 2 or min(v) <= 0:
                    raise ValueError(f"class weights must be a positive (w_neg, w_pos) pair, got {v!r}")
            elif not 0.0 <= v <= 1.0:
                raise ValueError(f"{self.method} ladder values must be in [0, 1], got {v!r}")


@dataclass(frozen=True)
class ReplicateData:
    replicate: int
    seed: int
    train: Dataset  # balanced when the setup asks for it; the set the model is fit on
    val: Dataset
    test: Dataset


@dataclass
class SweepRow:
    method: str
    parameter: str
    replicate: int
    replicate_seed: int
    recall: float = math.nan
    precision: float = math.nan
    f1: float = math.nan
    auroc: float = math.nan
    base_recall: float = math.nan
    base_precision: float = math.nan
    base_f1: float = math.nan
    n_flipped: int = 0
    pool_size: int = 0
    error: str = ""


@dataclass
class AggregateRow:
    stat: str  # "mean" or "std"
    method: str
    parameter: str
    recall: float
    precision: float
    f1: float
    auroc: float
    base_recall: float
    base_precision: float
    base_f1: float
    n_ok: int


METRIC_FIELDS = ("recall", "precision", "f1", "auroc", "base_recall", "base_precision", "base_f1")


@dataclass
class ScatterPoint:
    id: int
    x: float
    y: float
    true_label: int
    predicted_label: int
    outcome: str
    flipped: bool


@dataclass
class SweepReport:
    spec: SweepSpec
    rows: list[SweepRow]
    aggregates: list[AggregateRow]
    models: dict[str, Classifier] = field(default_factory=dict)
    flips: dict[str, FlipRecord] = field(default_factory=dict)
    replicate_data: list[ReplicateData] = field(default_factory=list)
    scatter_cell: str | None = None


# -- data preparation ---------------------------------------------------------

def _load_source(setup: TaskSetup, replicate_seed: int) -> Dataset:
    if isinstance(setup.task, GaussianTaskSpec):
        data = generate_gaussian_task(replace(setup.task, seed=derive_seed(replicate_seed, SEED_DATA)))
    else:
        schema = setup.csv_schema
        if schema is None:
            raise ValueError("CSV task needs a csv_schema")
        data = load_csv(setup.task, schema)
    return swap_labels(data) if setup.swap_labels else data


def prepare_replicate(setup: TaskSetup, base_seed: int, replicate: int) -> ReplicateData:
    seed = derive_seed(base_seed, replicate)
    data = _load_source(setup, seed)
    tr, va, te = split_dataset(data, SplitSpec(setup.train_fraction, setup.val_fraction_of_train,
                                               derive_seed(seed, SEED_SPLIT)))
    if setup.balance:
        tr = balance_by_oversampling(tr, setup.jitter_scale, derive_seed(seed, SEED_BALANCE),
                                     id_start=int(data.ids.max()) + 1)
    return ReplicateData(replicate, seed, tr, va, te)


def check_hygiene(rep: ReplicateData, record: FlipRecord | None, test_labels: bytes) -> None:
    """Flipped ids must be training ids only and test labels must be untouched."""
    if record is not None and record.flipped_ids:
        held_out = set(rep.val.ids.tolist()) | set(rep.test.ids.tolist())
        leaked = held_out.intersection(record.flipped_ids)
        if leaked:
            raise HygieneError(f"flipped ids reached val/test: {sorted(leaked)[:5]}")
    if rep.test.y.tobytes() != test_labels:
        raise HygieneError("test labels changed during the run")


# -- formatting ---------------------------------------------------------------

def format_parameter(method: str, value) -> str:
    if method == "class_weights":
        return f"{value[0]:g}:{value[1]:g}"
    return format(float(value), "g")


def _cell_name(rep: int, method: str, param: str) -> str:
    return f"r{rep:02d}_{method}_{param.replace(':', '-')}"


def _fmt(v: float) -> str:
    return "nan" if isinstance(v, float) and math.isnan(v) else format(float(v), ".17g")


# -- sweeps -------------------------------------------------------------------

def _model_config(base: TrainConfig, rep: ReplicateData, index: int = 0) -> TrainConfig:
    return replace(base, seed=derive_seed(rep.seed, SEED_MODEL, index), warm_start=None)


def _run_cell(spec: SweepSpec, rep: ReplicateData, base: Classifier, cfg: TrainConfig,
              value, row: SweepRow, report: SweepReport, cell: str) -> FlipRecord | None:
    test = rep.test
    threshold = 0.5
    record = None
    if spec.method == "label_flip":
        plan = BiasPlan(spec.direction, float(value), spec.selection_policy,
                        replace(cfg, warm_start=base), spec.pool_threshold,
                        derive_seed(rep.seed, SEED_SELECT))
        model, record = run_label_flip_method(base, rep.train, plan)
        row.n_flipped, row.pool_size = len(record), record.pool_size
        report.flips[cell] = record
        if model is not base:
            report.models[cell] = model
    elif spec.method == "class_weights":
        weights = tuple(float(w) for w in value)
        model = base if weights == cfg.class_weights else train_with_class_weights(rep.train, spec.model, cfg, weights)
        if model is not base:
            report.models[cell] = model
    else:
        model = base
        threshold = float(value)
    r = metrics.evaluate(predict_scores(model, test), test, threshold)
    row.recall, row.precision, row.f1, row.auroc = r.recall, r.precision, r.f1, r.auroc
    return record


def run_sweep(spec: SweepSpec) -> SweepReport:
    """Run every (ladder value, replicate) cell and evaluate on the untouched test split."""
    report = SweepReport(spec, [], [])
    params = [format_parameter(spec.method, v) for v in spec.ladder]
    for r in range(spec.replicates):
        try:
            rep = prepare_replicate(spec.setup, spec.base_seed, r)
            report.replicate_data.append(rep)
            cfg = _model_config(spec.train, rep)
            base = train(rep.train, spec.model, cfg)
            report.models[f"r{r:02d}_base"] = base
            b = metrics.evaluate(predict_scores(base, rep.test), rep.test)
        except CELL_ERRORS as exc:
            log.warning("replicate %d: data or base model failed: %s", r, exc)
            for p in params:
                report.rows.append(SweepRow(spec.method, p, r, derive_seed(spec.base_seed, r), error=f"base: {exc}"))
            continue
        test_labels = rep.test.y.tobytes()
        for value, p in zip(spec.ladder, params):
            row = SweepRow(spec.method, p, r, rep.seed, base_recall=b.recall,
                           base_precision=b.precision, base_f1=b.f1)
            cell = _cell_name(r, spec.method, p)
            try:
                record = _run_cell(spec, rep, base, cfg, value, row, report, cell)
            except CELL_ERRORS as exc:
                log.warning("cell %s failed: %s", cell, exc)
                row.error = str(exc) or type(exc).__name__
                record = None
            check_hygiene(rep, record, test_labels)
            report.rows.append(row)
    report.aggregates = aggregate(report.rows)
    if spec.method == "label_flip" and report.flips:
        # scatter shows the flips of the largest fraction in replicate 0
        cells = [_cell_name(0, spec.method, p) for p in
                 (format_parameter(spec.method, v) for v in sorted(spec.ladder))]
        report.scatter_cell = next((c for c in reversed(cells) if c in report.flips), None)
    return report


def aggregate(rows: Sequence[SweepRow]) -> list[AggregateRow]:
    """Mean and population std (ddof=0) per (method, parameter) over successful rows."""
    keys = []
    for row in rows:
        if (row.method, row.parameter) not in keys:
            keys.append((row.method, row.parameter))
    out = []
    for method, param in keys:
        ok = [r for r in rows if r.method == method and r.parameter == param and not r.error]
        for stat in ("mean", "std"):
            vals = {}
            for f in METRIC_FIELDS:
                col = np.array([getattr(r, f) for r in ok], dtype=np.float64)
                if col.size == 0:
                    vals[f] = math.nan
                else:
                    vals[f] = float(np.mean(col)) if stat == "mean" else float(np.std(col))
            out.append(AggregateRow(stat, method, param, n_ok=len(ok), **vals))
    return out


# -- before/after ensembles ---------------------------------------------------

@dataclass
class SummaryRow:
    label: str
    recall: float
    precision: float
    f1: float
    auroc: float
    recall_std: float
    precision_std: float
    f1_std: float
    auroc_std: float


@dataclass
class ComparisonReport:
    before: SummaryRow
    after: SummaryRow
    per_replicate: list[tuple[int, int, MetricsReport, MetricsReport]]  # (replicate, seed, before, after)
    model_specs: tuple[ClassifierSpec, ...]
    plan: BiasPlan
    models: dict[str, Classifier] = field(default_factory=dict)
    flips: dict[str, FlipRecord] = field(default_factory=dict)
    replicate_data: list[ReplicateData] = field(default_factory=list)
    scatter_cell: str | None = None


def _summary(label: str, reports: Sequence[MetricsReport]) -> SummaryRow:
    cols = {f: np.array([getattr(r, f) for r in reports]) for f in ("recall", "precision", "f1", "auroc")}
    return SummaryRow(label, *(float(c.mean()) for c in cols.values()), *(float(c.std()) for c in cols.values()))


def compare_before_after(setup: TaskSetup, model_specs: Sequence[ClassifierSpec], plan: BiasPlan,
                         replicates: int = 1, base_seed: int = 0) -> ComparisonReport:
    """Ensemble of base models ("Before") vs ensemble of label-flip retrained models ("After").

    Pre-training uses ``plan.retrain`` hyperparameters (its warm_start and
    seed are replaced per model). Rows are means over replicates.
    """
    if not model_specs:
        raise ValueError("need at least one model spec")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    out = ComparisonReport(None, None, [], tuple(model_specs), plan)
    for r in range(replicates):
        rep = prepare_replicate(setup, base_seed, r)
        out.replicate_data.append(rep)
        test_labels = rep.test.y.tobytes()
        bases, afters = [], []
        for i, mspec in enumerate(model_specs):
            cfg = _model_config(plan.retrain, rep, i)
            base = train(rep.train, mspec, cfg)
            cell_plan = replace(plan, retrain=replace(cfg, warm_start=base),
                                selection_seed=derive_seed(rep.seed, SEED_SELECT, i))
            after, record = run_label_flip_method(base, rep.train, cell_plan)
            check_hygiene(rep, record, test_labels)
            cell = f"r{r:02d}_m{i}_{mspec.describe().replace(':', '-')}"
            out.models[cell + "_before"] = base
            out.models[cell + "_after"] = after
            out.flips[cell] = record
            if out.scatter_cell is None:
                out.scatter_cell = cell
            bases.append(base)
            afters.append(after)
        b = metrics.evaluate(ensemble_scores(bases, rep.test), rep.test)
        a = metrics.evaluate(ensemble_scores(afters, rep.test), rep.test)
        out.per_replicate.append((r, rep.seed, b, a))
    out.before = _summary("Before", [b for _, _, b, _ in out.per_replicate])
    out.after = _summary("After", [a for _, _, _, a in out.per_replicate])
    return out


# -- exports ------------------------------------------------------------------

REPORT_COLUMNS = ("row", "method", "parameter", "replicate", "replicate_seed", *METRIC_FIELDS,
                  "n_flipped", "pool_size", "n_ok", "error")

_TABLE_HEADERS = {
    "label_flip": ("Model", "Percentage of Change", "Recall", "Precision", "F1 score"),
    "class_weights": ("Class Weight", "Recall", "Precision", "F1 score", "AUROC"),
    "threshold": ("Threshold Line", "Recall", "Precision", "F1 score"),
}


def _markdown(headers, rows) -> str:
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) for i, h in enumerate(headers)]
    line = lambda cells: "| " + " | ".join(str(c).ljust(w) for c, w in zip(cells, widths)) + " |"
    out = [line(headers), "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
    out += [line(r) for r in rows]
    return "\n".join(out) + "\n"


def _summary_cells(spec: SweepSpec, agg: AggregateRow) -> list[str]:
    m = [f"{agg.recall:.2f}", f"{agg.precision:.2f}", f"{agg.f1:.2f}"]
    if spec.method == "label_flip":
        return [spec.model.describe(), f"{float(agg.parameter) * 100:g}%", *m]
    if spec.method == "class_weights":
        w_neg, w_pos = agg.parameter.split(":")
        return [f"0:{w_neg}, 1:{w_pos}", *m, f"{agg.auroc:.2f}"]
    return [agg.parameter, *m]


def export_tables(report: SweepReport, outdir) -> list[Path]:
    """Write ``report.csv`` (full precision, per-cell rows then aggregates) and ``report.md``."""
    if not report.rows:
        raise ValueError("empty report")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path, md_path = outdir / "report.csv", outdir / "report.md"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in report.rows:
            w.writerow(["cell", r.method, r.parameter, r.replicate, r.replicate_seed,
                        *(_fmt(getattr(r, f)) for f in METRIC_FIELDS), r.n_flipped, r.pool_size, "", r.error])
        for a in report.aggregates:
            w.writerow([a.stat, a.method, a.parameter, "", "",
                        *(_fmt(getattr(a, f)) for f in METRIC_FIELDS), "", "", a.n_ok, ""])

    spec = report.spec
    means = [a for a in report.aggregates if a.stat == "mean"]
    text = [f"# {spec.method} sweep, {spec.replicates} replicate(s), mean over replicates\n",
            _markdown(_TABLE_HEADERS[spec.method], [_summary_cells(spec, a) for a in means]),
            "\n## Per-replicate rows\n",
            _markdown(("Parameter", "Replicate", "Recall", "Precision", "F1 score", "AUROC",
                       "Base recall", "Base precision", "Base F1", "Flipped", "Error"),
                      [[r.parameter, r.replicate, f"{r.recall:.4f}", f"{r.precision:.4f}", f"{r.f1:.4f}",
                        f"{r.auroc:.4f}", f"{r.base_recall:.4f}", f"{r.base_precision:.4f}",
                        f"{r.base_f1:.4f}", r.n_flipped, r.error] for r in report.rows])]
    md_path.write_text("".join(text))
    return [csv_path, md_path]


def export_comparison(report: ComparisonReport, outdir) -> list[Path]:
    """``report.csv`` with exactly the Before/After rows, ``replicates.csv``, and ``report.md``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = [outdir / "report.csv", outdir / "replicates.csv", outdir / "report.md"]
    fields = ("recall", "precision", "f1", "auroc")
    with open(paths[0], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model", *fields, *(f + "_std" for f in fields)])
        for s in (report.before, report.after):
            w.writerow([s.label, *(_fmt(getattr(s, f)) for f in fields),
                        *(_fmt(getattr(s, f + "_std")) for f in fields)])
    with open(paths[1], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["replicate", "replicate_seed", "model", *metrics.CSV_COLUMNS])
        for r, seed, b, a in report.per_replicate:
            w.writerow([r, seed, "Before", *b.csv_row()])
            w.writerow([r, seed, "After", *a.csv_row()])
    members = ", ".join(s.describe() for s in report.model_specs)
    rows = [[f"{s.label}:", f"{s.recall:.2f}", f"{s.precision:.2f}", f"{s.f1:.2f}", f"{s.auroc:.2f}"]
            for s in (report.before, report.after)]
    paths[2].write_text(
        f"# Ensemble of [{members}], {report.plan.direction.value}, flip fraction "
        f"{report.plan.flip_fraction:g}, {len(report.per_replicate)} replicate(s)\n"
        + _markdown(("Model", "Recall", "Precision", "F1 score", "AUROC"), rows))
    return paths


def project_2d(X: np.ndarray) -> np.ndarray:
    """Identity for 2-D features; otherwise scores on the first two principal axes.

    Axis signs are fixed so the largest-magnitude loading is positive.
    """
    if X.shape[1] == 2:
        return X.copy()
    if X.shape[1] == 1:
        return np.hstack([X, np.zeros_like(X)])
    centered = X - X.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    axes = vt[:2]
    signs = np.sign(axes[np.arange(2), np.argmax(np.abs(axes), axis=1)])
    signs[signs == 0] = 1.0
    return centered @ (axes * signs[:, None]).T


def scatter_points(model: Classifier, data: Dataset, flips: FlipRecord | Sequence[int] | None = None,
                   threshold: float = 0.5) -> list[ScatterPoint]:
    flipped = set(flips.flipped_ids if isinstance(flips, FlipRecord) else (flips or ()))
    p = predict_scores(model, data).scores
    pred = (p > threshold).astype(int)
    xy = project_2d(data.X)
    names = {(1, 1): "TP", (0, 0): "TN", (0, 1): "FP", (1, 0): "FN"}
    return [ScatterPoint(int(i), float(xy[k, 0]), float(xy[k, 1]), int(data.y[k]), int(pred[k]),
                         names[int(data.y[k]), int(pred[k])], int(i) in flipped)
            for k, i in enumerate(data.ids)]


_MARKERS = {
    "TP": ("#1b9e77", "circle"),
    "TN": ("#7570b3", "square"),
    "FP": ("#d95f02", "triangle"),
    "FN": ("#e7298a", "cross"),
}


def _svg(points: Sequence[ScatterPoint], size: int = 480, pad: int = 30) -> str:
    xs = np.array([p.x for p in points])
    ys = np.array([p.y for p in points])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    sx = (size - 2 * pad) / ((x1 - x0) or 1.0)
    sy = (size - 2 * pad) / ((y1 - y0) or 1.0)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size + 40}" '
           f'viewBox="0 0 {size} {size + 40}">',
           f'<rect x="0" y="0" width="{size}" height="{size + 40}" fill="white"/>']
    for p in points:
        cx = pad + (p.x - x0) * sx
        cy = size - pad - (p.y - y0) * sy
        color, shape = _MARKERS[p.outcome]
        stroke = ' stroke="black" stroke-width="1.2"' if p.flipped else ""
        if shape == "circle":
            out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="{color}"{stroke}/>')
        elif shape == "square":
            out.append(f'<rect x="{cx - 2.5:.2f}" y="{cy - 2.5:.2f}" width="5" height="5" fill="{color}"{stroke}/>')
        elif shape == "triangle":
            out.append(f'<polygon points="{cx:.2f},{cy - 3.5:.2f} {cx - 3.5:.2f},{cy + 3:.2f} '
                       f'{cx + 3.5:.2f},{cy + 3:.2f}" fill="{color}"{stroke}/>')
        else:
            out.append(f'<path d="M{cx - 3:.2f},{cy - 3:.2f}L{cx + 3:.2f},{cy + 3:.2f}'
                       f'M{cx - 3:.2f},{cy + 3:.2f}L{cx + 3:.2f},{cy - 3:.2f}" stroke="{color}" stroke-width="1.5"/>')
    for k, (name, (color, _)) in enumerate(_MARKERS.items()):
        out.append(f'<text x="{pad + k * 70}" y="{size + 25}" font-size="13" fill="{color}">{name}</text>')
    out.append(f'<text x="{pad + 4 * 70}" y="{size + 25}" font-size="13">outlined = flipped</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_scatter(model: Classifier, data: Dataset, flips, path, threshold: float = 0.5) -> list[Path]:
    """Write the per-example scatter CSV at ``path`` and an SVG plot beside it."""
    if len(data) == 0:
        raise ValueError("empty dataset")
    points = scatter_points(model, data, flips, threshold)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "x", "y", "true_label", "predicted_label", "outcome", "flipped"])
        for p in points:
            w.writerow([p.id, _fmt(p.x), _fmt(p.y), p.true_label, p.predicted_label, p.outcome, int(p.flipped)])
    svg_path = path.with_suffix(".svg")
    svg_path.write_text(_svg(points))
    return [path, svg_path]


def _write_artifacts(report, outdir: Path, scatter_model: Classifier | None) -> None:
    for name, model in report.models.items():
        (outdir / "models").mkdir(parents=True, exist_ok=True)
        save_classifier(model, outdir / "models" / f"{name}.txt")
    for name, record in report.flips.items():
        record.to_csv(outdir / "flips" / f"{name}.csv")
    for rep in report.replicate_data:
        for part in ("train", "val", "test"):
            save_csv(getattr(rep, part), outdir / "data" / f"r{rep.replicate:02d}_{part}.csv")
    if scatter_model is not None and report.replicate_data:
        flips = report.flips.get(report.scatter_cell) if report.scatter_cell else None
        export_scatter(scatter_model, report.replicate_data[0].train, flips, outdir / "scatter.csv")


def write_sweep_outputs(report: SweepReport, outdir) -> Path:
    outdir = Path(outdir)
    export_tables(report, outdir)
    _write_artifacts(report, outdir, report.models.get("r00_base"))
    return outdir


def write_comparison_outputs(report: ComparisonReport, outdir) -> Path:
    outdir = Path(outdir)
    export_comparison(report, outdir)
    scatter_model = report.models.get(report.scatter_cell + "_before") if report.scatter_cell else None
    _write_artifacts(report, outdir, scatter_model)
    return outdir
