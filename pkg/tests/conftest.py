import numpy as np
import pytest

from labelflip.core import Dataset, ScoreVector


def make_dataset(X, y, ids=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    ids = np.arange(len(y)) if ids is None else ids
    return Dataset(ids, X, y)


def scored(scores, labels):
    """Dataset with a dummy feature plus a ScoreVector over the same ids."""
    data = make_dataset(np.zeros(len(labels)), labels)
    return ScoreVector(data.ids, scores), data


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_acceptance_lines = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
