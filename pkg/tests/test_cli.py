import csv

import numpy as np
import pytest

from labelflip.cli import CONFIG_KEYS, ConfigError, main, parse_config_text
from labelflip.models import Classifier, ClassifierSpec, save_classifier

FAST = "epochs = 10\nn_per_class = 60\n"


def rows(path):
    return list(csv.reader(open(path)))


def write_cfg(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_generate_balanced_counts(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["generate", "--n-per-class", "200", "--seed", "7", "--out", str(out)]) == 0
    assert len(rows(out)) == 401


def test_generate_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        main(["generate", "--n-per-class", "50", "--seed", "7", "--out", str(p)])
    assert a.read_bytes() == b.read_bytes()


def test_generate_imbalance(tmp_path):
    out = tmp_path / "d.csv"
    main(["generate", "--imbalance", "3", "--n-per-class", "100", "--out", str(out)])
    labels = [r[-1] for r in rows(out)[1:]]
    assert labels.count("0") == 300 and labels.count("1") == 100


def test_generate_bad_flags(tmp_path, capsys):
    assert main(["generate", "--cov-scale", "0", "--out", str(tmp_path / "d.csv")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["generate", "--n-per-class", "abc", "--out", "x.csv"])
    assert exc.value.code == 2


def test_run_flip_sweep(tmp_path):
    cfg = write_cfg(tmp_path, "flip_sweep.cfg", FAST + "method = label_flip\nreplicates = 2\n")
    assert main(["run", "--config", str(cfg)]) == 0
    out = tmp_path / "flip_sweep"
    cells = [r for r in rows(out / "report.csv")[1:] if r[0] == "cell"]
    assert len(cells) == 6 * 2
    for name in ("report.md", "scatter.csv", "scatter.svg", "config.resolved.cfg"):
        assert (out / name).exists()
    assert (out / "flips").is_dir() and (out / "models").is_dir()


def test_run_table4(tmp_path):
    cfg = write_cfg(tmp_path, "table4.cfg", FAST + "mode = compare\nreplicates = 2\n")
    out = tmp_path / "t4"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    body = rows(out / "report.csv")
    assert [r[0] for r in body[1:]] == ["Before", "After"]
    assert body[0][:5] == ["model", "recall", "precision", "f1", "auroc"]


def test_invalid_key(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "bad.cfg", "learnin_rate = 0.1\n")
    assert main(["run", "--config", str(cfg)]) == 2
    assert "learnin_rate" in capsys.readouterr().err


def test_bad_values_are_config_errors(tmp_path):
    for text in ("epochs = many\n", "mode = other\n", "method = threshold\nladder = 0.1, 2\n",
                 "model = cnn\n", "class_weights = 1\n", "balance = maybe\n"):
        assert main(["run", "--config", str(write_cfg(tmp_path, "c.cfg", text))]) == 2, text


def test_missing_config(tmp_path):
    assert main(["run", "--config", str(tmp_path / "none.cfg")]) == 2


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = write_cfg(tmp_path, "c.cfg", FAST + "replicates = 1\n")
    assert main(["run", "--config", str(cfg), "--out", str(blocker / "sub")]) == 3


def test_resolved_config_has_every_key(tmp_path):
    cfg = write_cfg(tmp_path, "c.cfg", FAST + "replicates = 1\nmethod = threshold\n")
    main(["run", "--config", str(cfg)])
    resolved = parse_config_text((tmp_path / "c" / "config.resolved.cfg").read_text())
    assert set(resolved) == set(CONFIG_KEYS)
    assert resolved["ladder"] == "0.0, 0.1, 0.2, 0.3, 0.4, 0.5"
    # rerunning from the echoed config reproduces the report
    main(["run", "--config", str(tmp_path / "c" / "config.resolved.cfg"), "--out", str(tmp_path / "again")])
    assert (tmp_path / "c" / "report.csv").read_bytes() == (tmp_path / "again" / "report.csv").read_bytes()


def test_duplicate_key():
    with pytest.raises(ConfigError):
        parse_config_text("epochs = 1\nepochs = 2\n")


def test_eval_matches_harness_row(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "s.cfg", FAST + "replicates = 1\nladder = 0\n")
    main(["run", "--config", str(cfg)])
    out = tmp_path / "s"
    capsys.readouterr()
    assert main(["eval", "--model", str(out / "models" / "r00_base.txt"),
                 "--data", str(out / "data" / "r00_test.csv")]) == 0
    printed = list(csv.reader(capsys.readouterr().out.splitlines()))
    got = dict(zip(printed[0], printed[1]))
    ref = next(r for r in csv.DictReader(open(out / "report.csv")) if r["row"] == "cell")
    for key in ("recall", "precision", "f1", "auroc"):
        assert got[key] == f"{float(ref[key]):.4f}"


def test_eval_threshold_zero_recall_one(tmp_path, capsys):
    data = tmp_path / "d.csv"
    main(["generate", "--n-per-class", "30", "--out", str(data)])
    model = tmp_path / "m.txt"
    save_classifier(Classifier(ClassifierSpec.logistic(2), np.array([0.0, 0.0, 3.0])), model)
    capsys.readouterr()
    assert main(["eval", "--model", str(model), "--data", str(data), "--threshold", "0.0"]) == 0
    header, row = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert dict(zip(header, row))["recall"] == "1.0000"


def test_eval_missing_model(tmp_path):
    data = tmp_path / "d.csv"
    main(["generate", "--n-per-class", "5", "--out", str(data)])
    assert main(["eval", "--model", str(tmp_path / "none.txt"), "--data", str(data)]) != 0


def test_eval_dimension_mismatch(tmp_path):
    data = tmp_path / "d.csv"
    main(["generate", "--n-per-class", "5", "--dim", "3", "--out", str(data)])
    model = tmp_path / "m.txt"
    save_classifier(Classifier(ClassifierSpec.logistic(2), np.zeros(3)), model)
    assert main(["eval", "--model", str(model), "--data", str(data)]) == 3


def test_run_from_csv_data(tmp_path):
    data = tmp_path / "d.csv"
    main(["generate", "--n-per-class", "60", "--imbalance", "2", "--out", str(data)])
    cfg = write_cfg(tmp_path, "c.cfg", f"epochs = 10\nreplicates = 1\ndata_csv = {data}\nmodel = mlp:4\n")
    assert main(["run", "--config", str(cfg)]) == 0
    assert (tmp_path / "c" / "report.csv").exists()
