"""Linear SVM trained by primal subgradient descent.

The decision function is ``w . x + b`` on raw features (identity feature
map at this scale). Training minimizes

    lambda/2 * ||w||^2 + mean_i max(0, 1 - y_i (w . x_i + b))

with full-batch subgradient steps on the Pegasos schedule eta_t = 1/(lambda*t)
and an optional norm projection. Full-batch steps keep training exactly
deterministic and invariant under duplicating the training set (the
objective is a mean). The returned classifier is the best iterate by
objective value, after two cheap deterministic refinements that the
1/(lambda*t) schedule alone converges too slowly for on nonsmooth
objectives: constant-step subgradient runs over a geometric ladder of step
sizes, and an exact line search over the (unregularized) bias, whose
one-dimensional objective is piecewise linear with its minimum at a hinge
kink.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from gaal.errors import ConfigError, ContractError, DimensionError, FormatError

SVM_MAGIC = b"GAALSVM1"


@dataclass
class SvmConfig:
    regularization: float = 0.001
    epochs: int = 2000
    schedule: str = "pegasos"  # "pegasos" or "constant:<rate>"
    project: bool = True  # keep ||w|| <= 1/sqrt(lambda)
    seed: int = 0  # reserved; the full-batch solver draws nothing

    def validate(self) -> None:
        if self.regularization <= 0:
            raise ConfigError(f"regularization must be positive, got {self.regularization}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.schedule != "pegasos" and not self.schedule.startswith("constant:"):
            raise ConfigError(f"unknown schedule {self.schedule!r}")


@dataclass
class LabeledSet:
    """Training instances with labels in {-1, +1}."""

    instances: np.ndarray  # [n, d]
    labels: np.ndarray  # [n]

    def __post_init__(self):
        self.instances = np.asarray(self.instances, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.float64)
        if self.instances.ndim != 2:
            raise DimensionError(f"instances must be [n, d], got {self.instances.shape}")
        if len(self.instances) != len(self.labels):
            raise DimensionError(
                f"{len(self.instances)} instances but {len(self.labels)} labels"
            )

    def __len__(self) -> int:
        return len(self.labels)

    def add(self, instances, labels) -> "LabeledSet":
        instances = np.atleast_2d(np.asarray(instances, dtype=np.float64))
        labels = np.atleast_1d(np.asarray(labels, dtype=np.float64))
        if len(self) == 0:
            return LabeledSet(instances, labels)
        return LabeledSet(
            np.concatenate([self.instances, instances]),
            np.concatenate([self.labels, labels]),
        )


def empty_labeled_set(dim: int) -> LabeledSet:
    return LabeledSet(np.zeros((0, dim)), np.zeros(0))


@dataclass
class LinearClassifier:
    w: np.ndarray
    b: float

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        self.b = float(self.b)
        if not (np.all(np.isfinite(self.w)) and np.isfinite(self.b)):
            raise ContractError("classifier parameters must be finite")


def hinge_objective(w: np.ndarray, b: float, data: LabeledSet, lam: float) -> float:
    margins = data.labels * (data.instances @ w + b)
    return float(0.5 * lam * np.dot(w, w) + np.mean(np.maximum(0.0, 1.0 - margins)))


def svm_train(data: LabeledSet, config: SvmConfig | None = None) -> LinearClassifier:
    """Fit a linear classifier on ``data``.

    A single-class set yields the constant classifier (w = 0, b = that
    label) so early active-learning iterations stay well-defined.
    """
    config = config or SvmConfig()
    config.validate()
    n = len(data)
    if n == 0:
        raise ContractError("svm_train needs at least one labeled instance")
    classes = np.unique(data.labels)
    if not np.all(np.isin(classes, (-1.0, 1.0))):
        raise ContractError(f"labels must be in {{-1, +1}}, got {classes}")
    dim = data.instances.shape[1]
    if len(classes) == 1:
        return LinearClassifier(np.zeros(dim), float(classes[0]))

    lam = config.regularization
    X, y = data.instances, data.labels
    if config.schedule.startswith("constant:"):
        rate = float(config.schedule.split(":", 1)[1])
        eta = lambda t: rate
    else:
        eta = lambda t: 1.0 / (lam * t)
    cap = 1.0 / np.sqrt(lam)

    def subgradient(w, b):
        viol = y * (X @ w + b) < 1.0
        gw = lam * w - (y[viol, None] * X[viol]).sum(axis=0) / n
        gb = -y[viol].sum() / n
        return gw, gb

    w = np.zeros(dim)
    b = 0.0
    best = [hinge_objective(w, b, data, lam), w, b]

    def track(w, b):
        obj = hinge_objective(w, b, data, lam)
        if obj < best[0]:
            best[0], best[1], best[2] = obj, w, b

    for t in range(1, config.epochs + 1):
        gw, gb = subgradient(w, b)
        step = eta(t)
        w = w - step * gw
        b = b - step * gb
        if config.project:
            norm = np.linalg.norm(w)
            if norm > cap:
                w = w * (cap / norm)
        track(w, b)

    ladder_steps = max(1, config.epochs // 10)
    for step in (1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001):
        w, b = best[1], best[2]
        for _ in range(ladder_steps):
            gw, gb = subgradient(w, b)
            w = w - step * gw
            b = b - step * gb
            track(w, b)

    w = best[1]
    kinks = np.unique(y - X @ w)
    if len(kinks) > 256:  # keep the scan O(n * 256) on big sets
        kinks = kinks[np.linspace(0, len(kinks) - 1, 256).astype(int)]
    objs = np.array([hinge_objective(w, float(kb), data, lam) for kb in kinks])
    i = int(np.argmin(objs))
    if objs[i] < best[0]:
        best = [objs[i], w, float(kinks[i])]
    return LinearClassifier(best[1], best[2])


def decision_value(clf: LinearClassifier, x) -> float:
    """``w . x + b`` for a single instance."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != clf.w.shape:
        raise DimensionError(f"instance of shape {x.shape} for classifier over {clf.w.shape}")
    return float(np.dot(clf.w, x) + clf.b)


def decision_values(clf: LinearClassifier, X) -> np.ndarray:
    """Vectorized decision values for a batch ``[n, d]``."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != clf.w.shape[0]:
        raise DimensionError(f"batch of shape {X.shape} for classifier over {clf.w.shape}")
    return X @ clf.w + clf.b


def predict(clf: LinearClassifier, x) -> int:
    """Sign of the decision value; an exact tie predicts +1."""
    return 1 if decision_value(clf, x) >= 0.0 else -1


def accuracy(clf: LinearClassifier, instances, labels) -> float:
    instances = np.asarray(instances, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if len(labels) == 0:
        raise ContractError("accuracy needs a non-empty test set")
    preds = np.where(decision_values(clf, instances) >= 0.0, 1.0, -1.0)
    return float(np.mean(preds == labels))


def save_classifier(clf: LinearClassifier, path) -> None:
    with open(path, "wb") as fh:
        fh.write(SVM_MAGIC)
        fh.write(struct.pack("<I", clf.w.shape[0]))
        fh.write(clf.w.astype("<f8").tobytes())
        fh.write(struct.pack("<d", clf.b))


def load_classifier(path) -> LinearClassifier:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != SVM_MAGIC:
            raise FormatError(f"expected magic {SVM_MAGIC!r}, got {magic!r}")
        (dim,) = struct.unpack("<I", fh.read(4))
        raw = fh.read(8 * dim + 8)
        if len(raw) != 8 * dim + 8:
            raise FormatError("classifier checkpoint truncated")
        w = np.frombuffer(raw[: 8 * dim], dtype="<f8").copy()
        (b,) = struct.unpack("<d", raw[8 * dim :])
    return LinearClassifier(w, b)
