"""Logistic regression and small tanh MLPs trained with weighted binary cross-entropy.

Parameters live in one flat float64 vector. Layer ``l`` contributes its
weight matrix (fan_out x fan_in, row-major) followed by its bias vector;
layers run input -> hidden... -> single sigmoid output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Dataset, ScoreVector, seed_to_uint

EPS = 1e-7
KINDS = ("logistic", "mlp")


class TrainingDivergedError(RuntimeError):
    """Loss or parameters became non-finite during training."""


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    feature_dim: int
    hidden_layers: tuple[int, ...] = ()
    activation: str = "tanh"

    def __post_init__(self):
        object.__setattr__(self, "hidden_layers", tuple(int(h) for h in self.hidden_layers))
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.feature_dim < 1:
            raise ValueError("feature_dim must be >= 1")
        if self.kind == "logistic" and self.hidden_layers:
            raise ValueError("logistic classifier takes no hidden layers")
        if self.kind == "mlp" and (not self.hidden_layers or min(self.hidden_layers) < 1):
            raise ValueError("mlp needs at least one hidden layer of width >= 1")
        if self.activation != "tanh":
            raise ValueError("only tanh hidden activation is supported")

    @classmethod
    def logistic(cls, feature_dim: int) -> "ClassifierSpec":
        return cls("logistic", feature_dim)

    @classmethod
    def mlp(cls, feature_dim: int, *hidden: int) -> "ClassifierSpec":
        return cls("mlp", feature_dim, tuple(hidden))

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.feature_dim, *self.hidden_layers, 1)

    @property
    def n_parameters(self) -> int:
        sizes = self.layer_sizes
        return sum(o * i + o for i, o in zip(sizes[:-1], sizes[1:]))

    def describe(self) -> str:
        if self.kind == "logistic":
            return "logistic"
        return "mlp:" + "-".join(str(h) for h in self.hidden_layers)


@dataclass(frozen=True, eq=False)
class Classifier:
    spec: ClassifierSpec
    parameters: np.ndarray

    def __post_init__(self):
        params = np.array(self.parameters, dtype=np.float64).reshape(-1)
        if params.shape[0] != self.spec.n_parameters:
            raise ValueError(f"{self.spec.describe()} needs {self.spec.n_parameters} parameters, got {params.shape[0]}")
        if not np.all(np.isfinite(params)):
            raise ValueError("parameters must be finite")
        params.setflags(write=False)
        object.__setattr__(self, "parameters", params)

    def __eq__(self, other):
        if not isinstance(other, Classifier):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.parameters, other.parameters)

    __hash__ = None


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    learning_rate: float = 0.1
    batch_size: int = 32
    class_weights: tuple[float, float] = (1.0, 1.0)  # (w_neg, w_pos)
    seed: int = 0
    warm_start: Classifier | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "class_weights", tuple(float(w) for w in self.class_weights))
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        # lr == 0 is accepted: it freezes a warm-started model
        if not self.learning_rate >= 0.0:
            raise ValueError("learning_rate must be non-negative")
        if len(self.class_weights) != 2 or min(self.class_weights) <= 0:
            raise ValueError("class weights must be a positive (w_neg, w_pos) pair")


def _unpack(spec: ClassifierSpec, params: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    layers = []
    at = 0
    sizes = spec.layer_sizes
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        W = params[at:at + fan_out * fan_in].reshape(fan_out, fan_in)
        at += fan_out * fan_in
        b = params[at:at + fan_out]
        at += fan_out
        layers.append((W, b))
    return layers


def init_parameters(spec: ClassifierSpec, seed: int) -> np.ndarray:
    """Zeros for logistic; uniform in +-0.5/sqrt(fan_in) for MLP weights and biases."""
    if spec.kind == "logistic":
        return np.zeros(spec.n_parameters)
    rng = np.random.default_rng(seed_to_uint(seed))
    chunks = []
    sizes = spec.layer_sizes
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 0.5 / np.sqrt(fan_in)
        chunks.append(rng.uniform(-bound, bound, size=fan_out * fan_in + fan_out))
    return np.concatenate(chunks)


def init_classifier(spec: ClassifierSpec, seed: int) -> Classifier:
    return Classifier(spec, init_parameters(spec, seed))


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _forward(spec, params, X):
    """Return (output probabilities, list of layer inputs, pre-sigmoid logit)."""
    layers = _unpack(spec, params)
    acts = [X]
    h = X
    for W, b in layers[:-1]:
        h = np.tanh(h @ W.T + b)
        acts.append(h)
    W, b = layers[-1]
    z = (h @ W.T + b)[:, 0]
    return sigmoid(z), acts, z


def _check_dims(spec: ClassifierSpec, data: Dataset):
    if data.feature_dim != spec.feature_dim:
        raise ValueError(f"model expects {spec.feature_dim} features, dataset has {data.feature_dim}")


def predict_scores(model: Classifier, data: Dataset) -> ScoreVector:
    _check_dims(model.spec, data)
    p, _, _ = _forward(model.spec, model.parameters, data.X)
    return ScoreVector(data.ids, p)


def _bce_terms(p: np.ndarray, y: np.ndarray, weights) -> np.ndarray:
    w_neg, w_pos = weights
    q = np.clip(p, EPS, 1.0 - EPS)
    return -(w_pos * y * np.log(q) + w_neg * (1 - y) * np.log(1.0 - q))


def weighted_bce_loss(scores: ScoreVector, data: Dataset, weights=(1.0, 1.0)) -> float:
    """Mean of -[w_pos*y*ln(p) + w_neg*(1-y)*ln(1-p)] with p clamped to [1e-7, 1-1e-7]."""
    p = scores.aligned_to(data)
    return float(np.mean(_bce_terms(p, data.y, weights)))


def _loss_and_grad(spec, params, X, y, weights):
    p, acts, _ = _forward(spec, params, X)
    n = X.shape[0]
    loss = float(np.mean(_bce_terms(p, y, weights)))
    w_neg, w_pos = weights
    # d loss / d logit; zero where the clamp is active
    dz = w_pos * y * (p - 1.0) + w_neg * (1 - y) * p
    dz = np.where((p < EPS) | (p > 1.0 - EPS), 0.0, dz) / n
    layers = _unpack(spec, params)
    grads = [None] * len(layers)
    delta = dz[:, None]
    for li in range(len(layers) - 1, -1, -1):
        W, _ = layers[li]
        a = acts[li]
        grads[li] = (delta.T @ a, delta.sum(axis=0))
        if li > 0:
            delta = (delta @ W) * (1.0 - a * a)
    flat = np.concatenate([np.concatenate([gW.reshape(-1), gb]) for gW, gb in grads])
    return loss, flat


def loss_and_gradient(model: Classifier, data: Dataset, weights=(1.0, 1.0)) -> tuple[float, np.ndarray]:
    """Weighted BCE of ``model`` on ``data`` and its gradient w.r.t. the flat parameters."""
    _check_dims(model.spec, data)
    return _loss_and_grad(model.spec, model.parameters, data.X, data.y.astype(np.float64), weights)


def train(data: Dataset, spec: ClassifierSpec, config: TrainConfig) -> Classifier:
    """Mini-batch gradient descent on weighted BCE.

    Starts from ``config.warm_start`` when given, else from seeded
    initial parameters. Batches are reshuffled every epoch from a
    generator seeded by ``config.seed``.
    """
    if len(data) == 0:
        raise ValueError("cannot train on an empty dataset")
    _check_dims(spec, data)
    if config.warm_start is not None:
        if config.warm_start.spec != spec:
            raise ValueError("warm_start spec does not match the requested spec")
        params = config.warm_start.parameters.copy()
    else:
        params = init_parameters(spec, config.seed)

    rng = np.random.default_rng(seed_to_uint(config.seed))
    X, y = data.X, data.y.astype(np.float64)
    n = len(data)
    lr = config.learning_rate
    epoch_loss = np.nan
    for _ in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        with np.errstate(over="ignore", invalid="ignore"):
            for start in range(0, n, config.batch_size):
                rows = order[start:start + config.batch_size]
                loss, grad = _loss_and_grad(spec, params, X[rows], y[rows], config.class_weights)
                total += loss * rows.shape[0]
                if lr:
                    params -= lr * grad
        epoch_loss = total / n
        if not np.isfinite(epoch_loss) or not np.all(np.isfinite(params)):
            raise TrainingDivergedError(f"non-finite loss or parameters (learning_rate={lr})")
    return Classifier(spec, params)


def gradient_check(spec: ClassifierSpec, data: Dataset, weights=(1.0, 1.0), seed: int = 0,
                   step: float = 1e-5) -> float:
    """Max relative error between backprop and central finite differences.

    Parameters are drawn uniformly in [-1, 1] from ``seed`` so that the
    check also exercises logistic models away from their zero init.
    """
    _check_dims(spec, data)
    params = np.random.default_rng(seed_to_uint(seed)).uniform(-1.0, 1.0, spec.n_parameters)
    X, y = data.X, data.y.astype(np.float64)
    _, analytic = _loss_and_grad(spec, params, X, y, weights)
    numeric = np.empty_like(params)
    for k in range(params.shape[0]):
        hi, lo = params.copy(), params.copy()
        hi[k] += step
        lo[k] -= step
        f_hi, _ = _loss_and_grad(spec, hi, X, y, weights)
        f_lo, _ = _loss_and_grad(spec, lo, X, y, weights)
        numeric[k] = (f_hi - f_lo) / (2 * step)
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-8)
    return float(np.max(np.abs(analytic - numeric) / denom))


# -- persistence -------------------------------------------------------------

def save_classifier(model: Classifier, path) -> None:
    spec = model.spec
    hidden = ",".join(str(h) for h in spec.hidden_layers) or "-"
    lines = [f"{spec.kind} feature_dim={spec.feature_dim} hidden={hidden} activation={spec.activation}"]
    lines += [format(float(v), ".17g") for v in model.parameters]
    Path(path).write_text("\n".join(lines) + "\n")


def load_classifier(path) -> Classifier:
    text = Path(path).read_text().splitlines()
    if not text:
        raise ValueError(f"{path}: empty model file")
    head = text[0].split()
    try:
        kind = head[0]
        fields = dict(tok.split("=", 1) for tok in head[1:])
        hidden = () if fields["hidden"] == "-" else tuple(int(h) for h in fields["hidden"].split(","))
        spec = ClassifierSpec(kind, int(fields["feature_dim"]), hidden, fields.get("activation", "tanh"))
        params = [float(line) for line in text[1:] if line.strip()]
    except (IndexError, KeyError, ValueError) as exc:
        raise ValueError(f"{path}: malformed model file ({exc})") from None
    return Classifier(spec, np.array(params))
