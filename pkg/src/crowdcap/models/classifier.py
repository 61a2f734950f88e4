"""Linear softmax classifier over whole-video features.

Class ids index :func:`crowdcap.grammar.all_labels`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyDataset, IncompatibleCheckpoint, NonFiniteLoss, ShapeMismatch
from ..grammar import all_labels
from ..numerics import (
    DEFAULT_CLIP_NORM,
    ParameterStore,
    StepDecaySchedule,
    Tensor,
    load_checkpoint,
    no_grad,
    save_checkpoint,
    sgd_step,
    softmax,
    softmax_cross_entropy,
)

log = logging.getLogger(__name__)

NUM_CLASSES = len(all_labels())


@dataclass
class ClassifierConfig:
    input_dim: int = 4096
    num_classes: int = NUM_CLASSES
    schedule: StepDecaySchedule = field(default_factory=lambda: StepDecaySchedule(1e-4, 0.5, 10))
    epochs: int = 200
    seed: int = 0
    clip_norm: float | None = DEFAULT_CLIP_NORM

    def __post_init__(self):
        if self.num_classes != NUM_CLASSES:
            raise ValueError(f"num_classes must equal the label count {NUM_CLASSES}")


class LinearClassifier:
    """``Z = softmax(x W + b)`` with ``W`` of shape ``(input_dim, num_classes)``."""

    def __init__(self, input_dim=4096, num_classes=NUM_CLASSES, seed=0):
        self.input_dim = input_dim
        self.num_classes = num_classes
        self.store = ParameterStore(seed)
        self.W = self.store.uniform("linear.W", (input_dim, num_classes))
        self.b = self.store.uniform("linear.b", (num_classes,), fan_in=input_dim)

    def logits(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[-1] != self.input_dim:
            raise ShapeMismatch(f"feature length {X.shape[-1]} != input_dim {self.input_dim}")
        return Tensor(X) @ self.W + self.b

    def predict_proba(self, X):
        with no_grad():
            return softmax(self.logits(X).data)

    def predict(self, X):
        return self.predict_proba(X).argmax(axis=-1)

    def loss(self, X, labels):
        """Mean cross-entropy over the rows of ``X``."""
        labels = np.asarray(labels)
        return softmax_cross_entropy(self.logits(X), labels, np.full(len(labels), 1.0 / len(labels)))

    def save(self, path):
        meta = {"model": "classifier", "input_dim": self.input_dim, "num_classes": self.num_classes}
        save_checkpoint(path, self.store.snapshot(), meta)

    @classmethod
    def load(cls, path):
        state, meta = load_checkpoint(path)
        if meta.get("model") != "classifier":
            raise IncompatibleCheckpoint(f"{path}: not a classifier checkpoint")
        model = cls(int(meta["input_dim"]), int(meta["num_classes"]))
        model.store.load_state(state)
        return model


def classify(features, model: LinearClassifier):
    """Return ``(probabilities, class_id)`` for one whole-video feature vector.

    Ties go to the lowest class id.
    """
    if hasattr(features, "video_feature"):
        features = features.video_feature()
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeMismatch(f"expected a single feature vector, got shape {x.shape}")
    z = model.predict_proba(x)[0]
    return z, int(np.argmax(z))


def one_hot(class_id, num_classes=NUM_CLASSES):
    out = np.zeros(num_classes)
    out[class_id] = 1.0
    return out


def _accuracy(model, X, y):
    if X is None or len(y) == 0:
        return float("nan")
    return float(np.mean(model.predict(X) == np.asarray(y)))


@dataclass
class ClassifierRun:
    model: LinearClassifier
    trace: list


def train_classifier(X, y, config: ClassifierConfig, val=None, test=None) -> ClassifierRun:
    """Full-batch gradient descent on mean cross-entropy.

    ``X`` is ``(N, input_dim)``, ``y`` holds class ids.  ``val``/``test`` are
    optional ``(X, y)`` pairs whose accuracy is traced.  Trace row ``e``
    describes the model as it enters epoch ``e`` plus the learning rate that
    epoch applies.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.intp)
    if len(X) == 0:
        raise EmptyDataset("no training examples")
    if y.min() < 0 or y.max() >= config.num_classes:
        raise ValueError("labels out of range")
    model = LinearClassifier(config.input_dim, config.num_classes, config.seed)
    vX, vy = val if val is not None else (None, [])
    tX, ty = test if test is not None else (None, [])
    trace = []
    for epoch in range(config.epochs):
        loss = model.loss(X, y)
        value = float(loss.data)
        if not np.isfinite(value):
            raise NonFiniteLoss(f"epoch {epoch}: loss {value}")
        row = {
            "epoch": epoch,
            "lr": config.schedule.lr(epoch),
            "loss": value,
            "train_acc": _accuracy(model, X, y),
            "val_acc": _accuracy(model, vX, vy),
            "test_acc": _accuracy(model, tX, ty),
        }
        loss.backward()
        sgd_step(model.store, config.schedule, epoch, config.clip_norm)
        trace.append(row)
        log.debug("epoch %d lr %.3g loss %.5f acc %.3f", epoch, row["lr"], value, row["train_acc"])
    return ClassifierRun(model, trace)
