"""Mini-batch training loop (Adam, Glorot init, seeded dropout and shuffling)."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .layers import softmax_xent
from .model import Model, ModelSpec
from .optim import AdamConfig, AdamState, adam_step

log = logging.getLogger(__name__)


@dataclass
class Dataset:
    """Images ``(N, rows, cols, channels)`` with integer labels, split train/test."""

    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray

    def __post_init__(self):
        if len(self.x_train) != len(self.y_train) or len(self.x_test) != len(self.y_test):
            raise ValueError("image and label counts differ")


@dataclass
class TrainConfig:
    epochs: int = 5
    batch_size: int = 32
    seed: int = 0
    adam: AdamConfig = field(default_factory=AdamConfig)

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


@dataclass
class TrainResult:
    model: Model
    history: list
    initial_loss: float
    test_accuracy: float


def evaluate(model: Model, x, y, batch_size: int = 256) -> tuple[float, float]:
    """(mean loss, accuracy) in inference mode."""
    if len(x) == 0:
        raise ValueError("empty evaluation set")
    loss_sum = 0.0
    correct = 0
    for i in range(0, len(x), batch_size):
        logits, _ = model.forward(x[i : i + batch_size])
        loss, _ = softmax_xent(logits, y[i : i + batch_size])
        loss_sum += loss * len(logits)
        correct += int(np.sum(np.argmax(logits, axis=1) == y[i : i + batch_size]))
    return loss_sum / len(x), correct / len(x)


def train(spec: ModelSpec, data: Dataset, cfg: TrainConfig = TrainConfig()) -> TrainResult:
    if len(data.x_train) == 0:
        raise ValueError("empty training set")
    model = Model.init(spec, cfg.seed)
    shuffle_rng = np.random.default_rng([cfg.seed, 1])
    dropout_rng = np.random.default_rng([cfg.seed, 2])
    state = AdamState()
    y_train = np.asarray(data.y_train, dtype=np.int64)
    initial_loss, _ = evaluate(model, data.x_train, y_train)
    history = []
    n = len(data.x_train)
    for epoch in range(cfg.epochs):
        t0 = time.perf_counter()
        order = shuffle_rng.permutation(n)
        loss_sum = 0.0
        correct = 0
        for s in range(0, n, cfg.batch_size):
            idx = order[s : s + cfg.batch_size]
            logits, cache = model.forward(data.x_train[idx], training=True, rng=dropout_rng)
            loss, grad = softmax_xent(logits, y_train[idx])
            grads, _ = model.backward(cache, grad)
            adam_step(model.params, grads, state, cfg.adam)
            loss_sum += loss * len(idx)
            correct += int(np.sum(np.argmax(logits, axis=1) == y_train[idx]))
        record = {
            "epoch": epoch + 1,
            "train_loss": loss_sum / n,
            "train_accuracy": correct / n,
            "seconds": time.perf_counter() - t0,
        }
        history.append(record)
        log.info("epoch %d: loss %.4f acc %.4f (%.1fs)", epoch + 1,
                 record["train_loss"], record["train_accuracy"], record["seconds"])
    test_acc = evaluate(model, data.x_test, np.asarray(data.y_test, np.int64))[1] if len(data.x_test) else float("nan")
    return TrainResult(model, history, initial_loss, test_acc)
