"""Command-line entry point: ``labelflip generate | run | eval``.

Exit codes: 0 success, 2 configuration/usage error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import metrics
from .bias_methods import BiasPlan
from .data import CsvFormatError, CsvSchema, GaussianTaskSpec, generate_gaussian_task, load_csv, save_csv
from .harness import (SweepSpec, TaskSetup, compare_before_after, run_sweep, write_comparison_outputs,
                      write_sweep_outputs)
from .models import ClassifierSpec, TrainConfig, load_classifier, predict_scores

EXIT_CONFIG = 2
EXIT_RUNTIME = 3

DEFAULT_LADDERS = {
    "label_flip": "0, 0.2, 0.4, 0.6, 0.8, 1.0",
    "class_weights": "1:1, 1:2, 1:10, 1:25, 1:50",
    "threshold": "0.0, 0.1, 0.2, 0.3, 0.4, 0.5",
}

# key -> (default, help). An empty ladder means the method's default ladder.
CONFIG_KEYS = {
    "mode": ("sweep", "sweep | compare"),
    "method": ("label_flip", "sweep method: label_flip | class_weights | threshold"),
    "ladder": ("", "comma-separated method parameters; class weights as w_neg:w_pos"),
    "replicates": ("5", "number of replicate seeds"),
    "base_seed": ("0", "root seed for every derived seed"),
    "direction": ("minimize_fn", "minimize_fn | minimize_fp"),
    "selection_policy": ("score_ranked", "score_ranked | seeded_random"),
    "pool_threshold": ("0.5", "threshold defining the FP/FN pool"),
    "flip_fraction": ("1.0", "flip fraction for compare mode"),
    "model": ("logistic", "sweep model: logistic | mlp:W1-W2-..."),
    "models": ("logistic, mlp:8", "compare-mode ensemble members"),
    "epochs": ("50", "training epochs (pre-training and retraining)"),
    "learning_rate": ("0.1", "gradient-descent step size"),
    "batch_size": ("32", "mini-batch size"),
    "class_weights": ("1:1", "base training weights w_neg:w_pos"),
    "data_csv": ("", "CSV dataset path; empty uses the Gaussian task"),
    "csv_feature_columns": ("", "feature columns; empty = every column but id/label"),
    "csv_label_column": ("label", "label column name or index"),
    "csv_id_column": ("id", "id column name or index; empty numbers rows"),
    "csv_has_header": ("true", "whether the CSV has a header row"),
    "n_per_class": ("300", "positives in the Gaussian task"),
    "imbalance": ("3", "negatives per positive in the Gaussian task"),
    "sep": ("1.5", "per-coordinate offset of the positive mean"),
    "dim": ("2", "Gaussian feature dimension"),
    "cov_scale": ("1.0", "isotropic variance of each cluster"),
    "swap_labels": ("false", "swap 0/1 labels of the source data"),
    "train_fraction": ("0.8", "train (+val) share of the data"),
    "val_fraction": ("0.2", "validation share of the train part"),
    "balance": ("true", "oversample the minority class of the train split"),
    "jitter_scale": ("0.05", "oversampling jitter, times per-feature std"),
}


class ConfigError(ValueError):
    pass


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment. Unknown keys are errors."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate config key {key!r}")
        values[key] = value
    resolved = {k: d for k, (d, _) in CONFIG_KEYS.items()}
    resolved.update(values)
    if not resolved["ladder"]:
        resolved["ladder"] = DEFAULT_LADDERS.get(resolved["method"], "")
    return resolved


def format_config(cfg: dict[str, str]) -> str:
    return "".join(f"{k} = {cfg[k]}\n" for k in CONFIG_KEYS)


def _bool(key, v):
    low = v.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {v!r}")


def _num(key, v, kind=float):
    try:
        return kind(v)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {v!r} as {kind.__name__}") from None


def _weights(key, v):
    parts = v.split(":")
    if len(parts) != 2:
        raise ConfigError(f"{key}: class weights must look like w_neg:w_pos, got {v!r}")
    return (_num(key, parts[0]), _num(key, parts[1]))


def _column(v: str):
    return int(v) if v.lstrip("-").isdigit() else v


def parse_model(text: str, feature_dim: int) -> ClassifierSpec:
    text = text.strip()
    if text == "logistic":
        return ClassifierSpec.logistic(feature_dim)
    if text.startswith("mlp:"):
        try:
            widths = [int(w) for w in text[4:].split("-")]
        except ValueError:
            raise ConfigError(f"bad mlp widths in {text!r}") from None
        return ClassifierSpec.mlp(feature_dim, *widths)
    raise ConfigError(f"unknown model {text!r}; use logistic or mlp:W1-W2")


def _csv_schema(cfg) -> CsvSchema:
    has_header = _bool("csv_has_header", cfg["csv_has_header"])
    id_col = _column(cfg["csv_id_column"]) if cfg["csv_id_column"] else None
    label_col = _column(cfg["csv_label_column"])
    if cfg["csv_feature_columns"]:
        feats = tuple(_column(c.strip()) for c in cfg["csv_feature_columns"].split(","))
    else:
        path = Path(cfg["data_csv"])
        with open(path, newline="") as fh:
            first = next(csv.reader(fh), [])
        if has_header:
            feats = tuple(c for c in first if c not in (id_col, label_col))
        else:
            feats = tuple(i for i in range(len(first)) if i not in (id_col, label_col))
    return CsvSchema(feats, label_col, has_header, id_col)


def build_setup(cfg) -> tuple[TaskSetup, int]:
    common = dict(
        swap_labels=_bool("swap_labels", cfg["swap_labels"]),
        train_fraction=_num("train_fraction", cfg["train_fraction"]),
        val_fraction_of_train=_num("val_fraction", cfg["val_fraction"]),
        balance=_bool("balance", cfg["balance"]),
        jitter_scale=_num("jitter_scale", cfg["jitter_scale"]),
    )
    if cfg["data_csv"]:
        schema = _csv_schema(cfg)
        return TaskSetup(cfg["data_csv"], schema, **common), len(schema.feature_columns)
    dim = _num("dim", cfg["dim"], int)
    sep = _num("sep", cfg["sep"])
    task = GaussianTaskSpec(
        n_per_class=_num("n_per_class", cfg["n_per_class"], int),
        mean_neg=(0.0,) * dim,
        mean_pos=(sep,) * dim,
        cov_scale=_num("cov_scale", cfg["cov_scale"]),
        imbalance_ratio=_num("imbalance", cfg["imbalance"]),
    )
    return TaskSetup(task, **common), dim


def build_train_config(cfg) -> TrainConfig:
    return TrainConfig(
        epochs=_num("epochs", cfg["epochs"], int),
        learning_rate=_num("learning_rate", cfg["learning_rate"]),
        batch_size=_num("batch_size", cfg["batch_size"], int),
        class_weights=_weights("class_weights", cfg["class_weights"]),
    )


def build_sweep_spec(cfg) -> SweepSpec:
    setup, dim = build_setup(cfg)
    method = cfg["method"]
    items = [v.strip() for v in cfg["ladder"].split(",") if v.strip()]
    if method == "class_weights":
        ladder = [_weights("ladder", v) for v in items]
    else:
        ladder = [_num("ladder", v) for v in items]
    return SweepSpec(
        setup=setup,
        model=parse_model(cfg["model"], dim),
        train=build_train_config(cfg),
        method=method,
        ladder=tuple(ladder),
        replicates=_num("replicates", cfg["replicates"], int),
        base_seed=_num("base_seed", cfg["base_seed"], int),
        direction=cfg["direction"],
        selection_policy=cfg["selection_policy"],
        pool_threshold=_num("pool_threshold", cfg["pool_threshold"]),
    )


def build_comparison(cfg):
    setup, dim = build_setup(cfg)
    specs = [parse_model(m, dim) for m in cfg["models"].split(",") if m.strip()]
    plan = BiasPlan(
        direction=cfg["direction"],
        flip_fraction=_num("flip_fraction", cfg["flip_fraction"]),
        selection_policy=cfg["selection_policy"],
        retrain=build_train_config(cfg),
        threshold=_num("pool_threshold", cfg["pool_threshold"]),
    )
    return setup, specs, plan, _num("replicates", cfg["replicates"], int), _num("base_seed", cfg["base_seed"], int)


# -- commands -----------------------------------------------------------------

def cmd_generate(args) -> int:
    try:
        task = GaussianTaskSpec(
            n_per_class=args.n_per_class,
            mean_neg=(0.0,) * args.dim,
            mean_pos=(args.sep,) * args.dim,
            cov_scale=args.cov_scale,
            imbalance_ratio=args.imbalance,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        save_csv(generate_gaussian_task(task), args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


def cmd_run(args) -> int:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config_text(text)
        if cfg["mode"] == "sweep":
            job = build_sweep_spec(cfg)
        elif cfg["mode"] == "compare":
            job = build_comparison(cfg)
        else:
            raise ConfigError(f"mode must be sweep or compare, got {cfg['mode']!r}")
    except (ConfigError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    outdir = Path(args.out or Path(args.config).with_suffix(""))
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "config.resolved.cfg").write_text(format_config(cfg))
        if cfg["mode"] == "sweep":
            report = run_sweep(job)
            write_sweep_outputs(report, outdir)
            n_err = sum(1 for r in report.rows if r.error)
            if n_err:
                print(f"warning: {n_err} sweep cell(s) failed; see report.csv", file=sys.stderr)
        else:
            setup, specs, plan, reps, seed = job
            write_comparison_outputs(compare_before_after(setup, specs, plan, reps, seed), outdir)
    except Exception as exc:  # noqa: BLE001 - any failure past config validation is a runtime error
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(outdir)
    return 0


def cmd_eval(args) -> int:
    try:
        model = load_classifier(args.model)
    except (OSError, ValueError) as exc:
        print(f"error: cannot load model: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        if args.feature_columns:
            feats = tuple(_column(c.strip()) for c in args.feature_columns.split(","))
        else:
            with open(args.data, newline="") as fh:
                first = next(csv.reader(fh), [])
            id_col = _column(args.id_column) if args.id_column else None
            label_col = _column(args.label_column)
            feats = (tuple(c for c in first if c not in (id_col, label_col)) if not args.no_header
                     else tuple(i for i in range(len(first)) if i not in (id_col, label_col)))
        schema = CsvSchema(feats, _column(args.label_column), not args.no_header,
                           _column(args.id_column) if args.id_column else None)
        data = load_csv(args.data, schema)
        report = metrics.evaluate(predict_scores(model, data), data, args.threshold)
    except (OSError, CsvFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(metrics.CSV_COLUMNS)
        w.writerow(report.csv_row())
    finally:
        if args.out:
            out.close()
    return 0


def _threshold(v: str) -> float:
    t = float(v)
    if not 0.0 <= t <= 1.0:
        raise argparse.ArgumentTypeError("threshold must be in [0, 1]")
    return t


def build_parser() -> argparse.ArgumentParser:
    keys = "\n".join(f"  {k:<20} default {d!r:<12} {h}" for k, (d, h) in CONFIG_KEYS.items())
    parser = argparse.ArgumentParser(prog="labelflip", description="Label-flip retraining experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic two-Gaussian dataset as CSV")
    g.add_argument("--n-per-class", type=int, default=300, help="positive examples")
    g.add_argument("--imbalance", type=float, default=1.0, help="negatives per positive")
    g.add_argument("--sep", type=float, default=1.5, help="per-coordinate offset of the positive mean")
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--cov-scale", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run a sweep or before/after comparison from a config file",
                       formatter_class=argparse.RawDescriptionHelpFormatter,
                       epilog="config keys (flat 'key = value' lines):\n" + keys)
    r.add_argument("--config", required=True)
    r.add_argument("--out", help="output directory (default: config path without suffix)")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("eval", help="print a metrics row for a saved model on a CSV dataset")
    e.add_argument("--model", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--threshold", type=_threshold, default=0.5)
    e.add_argument("--label-column", default="label")
    e.add_argument("--id-column", default="id", help="empty string numbers rows instead")
    e.add_argument("--feature-columns", default="", help="comma-separated; default all but id/label")
    e.add_argument("--no-header", action="store_true")
    e.add_argument("--out", help="write the row to this file instead of stdout")
    e.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
