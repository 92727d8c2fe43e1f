"""Stacked ensemble: meta-dataset construction, a small feed-forward
meta-network trained from scratch, and prediction.

Feature rows concatenate the N base models' word-level outputs, either as
one-hot indicators of each model's label (N ones, N*19-N zeros) or as the
raw word-level logit vectors. A word only becomes an example when at
least min_non_O base models predict something other than "O"; words
failing that filter are labeled "O" directly at prediction time, the net
is never consulted.

The network is input -> ReLU hidden -> softmax with cross-entropy,
trained by plain mini-batch gradient descent. Everything is seeded and
single-threaded: two runs with the same config produce bit-identical
parameters.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from medner.core import SCHEME, WordPrediction
from medner.errors import (
    DimensionMismatch,
    EmptyDataset,
    LengthMismatch,
    MissingLogits,
    NonFiniteLoss,
)


class FeatureMode(enum.Enum):
    ONE_HOT = "one_hot"
    LOGITS = "logits"


@dataclass(frozen=True)
class StackedExample:
    features: tuple[float, ...]
    label: int


@dataclass(frozen=True)
class StackedDataset:
    train: tuple[StackedExample, ...]
    test: tuple[StackedExample, ...]
    feature_mode: FeatureMode
    n_models: int
    min_non_O: int = 2


@dataclass(frozen=True)
class TrainConfig:
    hidden_width: int = 128
    learning_rate: float = 1e-3
    epochs: int = 50
    batch_size: int = 64
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if min(self.hidden_width, self.epochs, self.batch_size) <= 0:
            raise ValueError("hidden_width, epochs, batch_size must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


def count_non_o(predictions: Sequence[WordPrediction]) -> int:
    return sum(1 for p in predictions if p.label != 0)


def build_stacked_dataset(
    per_model: Sequence[Sequence[WordPrediction]],
    gold: Sequence[int],
    mode: FeatureMode = FeatureMode.ONE_HOT,
    min_non_O: int = 2,
    train_fraction: float = 0.8,
    shuffle_split_seed: Optional[int] = None,
) -> StackedDataset:
    """One example per word position that passes the min_non_O filter.

    The split is positional (first floor(train_fraction * M) examples are
    the train set) unless shuffle_split_seed is given, which shuffles the
    example order first with that seed.
    """
    n_models = len(per_model)
    length = len(gold)
    for preds in per_model:
        if len(preds) != length:
            raise LengthMismatch(
                f"model predicts {len(preds)} words, gold has {length}"
            )
    examples: list[StackedExample] = []
    for i in range(length):
        column = [preds[i] for preds in per_model]
        if count_non_o(column) < min_non_O:
            continue
        if mode is FeatureMode.ONE_HOT:
            feats = [0.0] * (n_models * SCHEME.size)
            for m, wp in enumerate(column):
                feats[m * SCHEME.size + wp.label] = 1.0
        else:
            feats = []
            for m, wp in enumerate(column):
                if wp.logits is None:
                    raise MissingLogits(
                        f"model {m} word {i} has no logits (logit feature mode)"
                    )
                feats.extend(wp.logits)
        examples.append(StackedExample(features=tuple(feats), label=gold[i]))

    if shuffle_split_seed is not None:
        order = np.random.default_rng(shuffle_split_seed).permutation(len(examples))
        examples = [examples[k] for k in order]
    cut = int(train_fraction * len(examples))
    return StackedDataset(
        train=tuple(examples[:cut]),
        test=tuple(examples[cut:]),
        feature_mode=mode,
        n_models=n_models,
        min_non_O=min_non_O,
    )


class MetaNet:
    """input -> ReLU(hidden) -> softmax head, cross-entropy loss.

    Weights are float64 numpy arrays; w1 is (hidden, input), w2 is
    (output, hidden). Initialization is uniform +-sqrt(6/(fan_in+fan_out))
    from the given seed. Instances are treated as immutable once training
    finishes.
    """

    def __init__(
        self,
        input_width: int,
        hidden_width: int,
        output_width: int = SCHEME.size,
        seed: int = 0,
        feature_mode: FeatureMode = FeatureMode.ONE_HOT,
        n_models: int = 0,
        min_non_O: int = 2,
    ):
        self.input_width = input_width
        self.hidden_width = hidden_width
        self.output_width = output_width
        self.feature_mode = feature_mode
        self.n_models = n_models
        self.min_non_O = min_non_O
        rng = np.random.default_rng(seed)
        lim1 = np.sqrt(6.0 / (input_width + hidden_width))
        lim2 = np.sqrt(6.0 / (hidden_width + output_width))
        self.w1 = rng.uniform(-lim1, lim1, size=(hidden_width, input_width))
        self.b1 = np.zeros(hidden_width)
        self.w2 = rng.uniform(-lim2, lim2, size=(output_width, hidden_width))
        self.b2 = np.zeros(output_width)

    def parameters(self) -> list[np.ndarray]:
        return [self.w1, self.b1, self.w2, self.b2]

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Softmax probabilities for a batch (rows are examples)."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.input_width:
            raise DimensionMismatch(
                f"expected {self.input_width} features, got {x.shape[1]}"
            )
        h = np.maximum(x @ self.w1.T + self.b1, 0.0)
        z = h @ self.w2.T + self.b2
        z = z - z.max(axis=1, keepdims=True)
        e = np.exp(z)
        return e / e.sum(axis=1, keepdims=True)

    def loss_and_gradients(
        self, x: np.ndarray, y: np.ndarray
    ) -> tuple[float, list[np.ndarray]]:
        """Mean cross-entropy over the batch and gradients in parameter
        order (w1, b1, w2, b2)."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        y = np.asarray(y, dtype=np.int64).reshape(-1)
        n = x.shape[0]
        pre = x @ self.w1.T + self.b1
        h = np.maximum(pre, 0.0)
        z = h @ self.w2.T + self.b2
        z = z - z.max(axis=1, keepdims=True)
        e = np.exp(z)
        p = e / e.sum(axis=1, keepdims=True)
        loss = -np.mean(np.log(p[np.arange(n), y] + 1e-300))

        dz = p.copy()
        dz[np.arange(n), y] -= 1.0
        dz /= n
        dw2 = dz.T @ h
        db2 = dz.sum(axis=0)
        dh = dz @ self.w2
        dpre = dh * (pre > 0.0)
        dw1 = dpre.T @ x
        db1 = dpre.sum(axis=0)
        return float(loss), [dw1, db1, dw2, db2]


@dataclass
class TrainResult:
    net: MetaNet
    train_accuracy: float
    test_accuracy: Optional[float]
    epoch_losses: list[float] = field(default_factory=list)


def _as_arrays(examples: Sequence[StackedExample]) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([ex.features for ex in examples], dtype=np.float64)
    y = np.array([ex.label for ex in examples], dtype=np.int64)
    return x, y


def accuracy(net: MetaNet, examples: Sequence[StackedExample]) -> float:
    if not examples:
        return 0.0
    x, y = _as_arrays(examples)
    pred = net.forward(x).argmax(axis=1)
    return float((pred == y).mean())


def train(dataset: StackedDataset, config: TrainConfig = TrainConfig()) -> TrainResult:
    """Mini-batch gradient descent for config.epochs passes.

    Deterministic given config.seed (weight init and the per-epoch
    shuffles both derive from it). Aborts with NonFiniteLoss if the loss
    leaves the reals.
    """
    if not dataset.train:
        raise EmptyDataset("train split is empty")
    x, y = _as_arrays(dataset.train)
    net = MetaNet(
        input_width=x.shape[1],
        hidden_width=config.hidden_width,
        output_width=SCHEME.size,
        seed=config.seed,
        feature_mode=dataset.feature_mode,
        n_models=dataset.n_models,
        min_non_O=dataset.min_non_O,
    )
    rng = np.random.default_rng(config.seed + 1)
    n = x.shape[0]
    losses = []
    for _ in range(config.epochs):
        order = rng.permutation(n) if config.shuffle else np.arange(n)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            loss, grads = net.loss_and_gradients(x[idx], y[idx])
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"loss became {loss}")
            epoch_loss += loss * len(idx)
            for param, grad in zip(net.parameters(), grads):
                param -= config.learning_rate * grad
        losses.append(epoch_loss / n)
    return TrainResult(
        net=net,
        train_accuracy=accuracy(net, dataset.train),
        test_accuracy=accuracy(net, dataset.test) if dataset.test else None,
        epoch_losses=losses,
    )


def predict(net: MetaNet, features: Sequence[float]) -> int:
    """Label index for one feature row: argmax of the softmax output,
    lowest index on ties."""
    feats = np.asarray(features, dtype=np.float64)
    if feats.ndim != 1 or feats.shape[0] != net.input_width:
        raise DimensionMismatch(
            f"expected {net.input_width} features, got shape {feats.shape}"
        )
    return int(net.forward(feats)[0].argmax())


def predict_words(
    net: MetaNet, per_model: Sequence[Sequence[WordPrediction]]
) -> list[WordPrediction]:
    """Apply the stacked net across aligned per-model word predictions.

    Words with fewer than net.min_non_O non-O base predictions default to
    "O" without consulting the net, mirroring dataset construction.
    """
    if len(per_model) != net.n_models:
        raise DimensionMismatch(
            f"net was trained on {net.n_models} models, got {len(per_model)}"
        )
    length = len(per_model[0])
    for preds in per_model[1:]:
        if len(preds) != length:
            raise LengthMismatch("models disagree on word count")
    out = []
    for i in range(length):
        column = [preds[i] for preds in per_model]
        word_index = column[0].word_index
        if count_non_o(column) < net.min_non_O:
            out.append(WordPrediction(word_index=word_index, label=0))
            continue
        if net.feature_mode is FeatureMode.ONE_HOT:
            feats = [0.0] * (net.n_models * SCHEME.size)
            for m, wp in enumerate(column):
                feats[m * SCHEME.size + wp.label] = 1.0
        else:
            feats = []
            for m, wp in enumerate(column):
                if wp.logits is None:
                    raise MissingLogits(f"model {m} word {i} has no logits")
                feats.extend(wp.logits)
        out.append(WordPrediction(word_index=word_index, label=predict(net, feats)))
    return out


def gradient_check(
    net: MetaNet, example: StackedExample, eps: float = 1e-5
) -> float:
    """Max relative error between analytic gradients and central finite
    differences over every parameter entry.

    The denominator is max(|analytic|, |numeric|, 1), so finite-difference
    roundoff on vanishing gradients (saturated softmax entries) cannot
    swamp the result; a genuine backprop defect still shows up through the
    many O(1)-scale entries.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = np.asarray(example.features, dtype=np.float64).reshape(1, -1)
    y = np.asarray([example.label])
    _, grads = net.loss_and_gradients(x, y)
    worst = 0.0
    for param, grad in zip(net.parameters(), grads):
        flat = param.reshape(-1)
        gflat = grad.reshape(-1)
        for k in range(flat.shape[0]):
            orig = flat[k]
            flat[k] = orig + eps
            up, _ = net.loss_and_gradients(x, y)
            flat[k] = orig - eps
            down, _ = net.loss_and_gradients(x, y)
            flat[k] = orig
            numeric = (up - down) / (2.0 * eps)
            denom = max(abs(gflat[k]), abs(numeric), 1.0)
            worst = max(worst, abs(gflat[k] - numeric) / denom)
    return worst


# ---------------------------------------------------------------------------
# Serialization: versioned JSON record, bit-exact float round-trip (json
# floats serialize via repr, which Python guarantees to round-trip).

METANET_FORMAT_VERSION = 1


def save_metanet(net: MetaNet, path: str) -> None:
    record = {
        "format_version": METANET_FORMAT_VERSION,
        "layer_sizes": [net.input_width, net.hidden_width, net.output_width],
        "feature_mode": net.feature_mode.value,
        "n_models": net.n_models,
        "min_non_O": net.min_non_O,
        "labels": list(SCHEME.labels),
        "w1": net.w1.tolist(),
        "b1": net.b1.tolist(),
        "w2": net.w2.tolist(),
        "b2": net.b2.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh)
        fh.write("\n")


def load_metanet(path: str) -> MetaNet:
    with open(path, encoding="utf-8") as fh:
        record = json.load(fh)
    if record.get("format_version") != METANET_FORMAT_VERSION:
        raise DimensionMismatch(
            f"unsupported metanet format_version: {record.get('format_version')}"
        )
    if record["labels"] != list(SCHEME.labels):
        raise DimensionMismatch("metanet was trained against a different label scheme")
    d_in, hidden, d_out = record["layer_sizes"]
    net = MetaNet(
        input_width=d_in,
        hidden_width=hidden,
        output_width=d_out,
        feature_mode=FeatureMode(record["feature_mode"]),
        n_models=record["n_models"],
        min_non_O=record["min_non_O"],
    )
    net.w1 = np.array(record["w1"], dtype=np.float64).reshape(hidden, d_in)
    net.b1 = np.array(record["b1"], dtype=np.float64)
    net.w2 = np.array(record["w2"], dtype=np.float64).reshape(d_out, hidden)
    net.b2 = np.array(record["b2"], dtype=np.float64)
    return net
