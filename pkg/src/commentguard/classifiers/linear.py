"""Logistic regression trained by full-batch gradient descent.

The loss is mean cross-entropy plus an L2 penalty on the weights; the bias
is unregularized.  Weights start at zero, so the first prediction of an
untrained model is exactly 0.5.  Training asserts the loss stays finite,
and non-increasing whenever the learning rate is at most 0.1 (full-batch
descent on L2-normalized features is provably stable there).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..corpus import BinaryLabel
from ..errors import EmptyInputError, NonFiniteLossError, SingleClassInputError
from ..textproc import IdfTable, SparseVector, Vocabulary
from .model import (
    KIND_LOGISTIC_REGRESSION,
    ClassifierModel,
    LogisticParameters,
    TrainConfig,
)

# Loss comparisons tolerate accumulated float error this much above equal.
_MONOTONE_SLACK = 1e-12


def dense_matrix(vectors: Sequence[SparseVector], width: int) -> np.ndarray:
    matrix = np.zeros((len(vectors), width), dtype=np.float64)
    for row, vector in enumerate(vectors):
        for index, weight in vector.entries:
            matrix[row, index] = weight
    return matrix


def logistic_loss(
    weights: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray, l2: float
) -> float:
    """Mean cross-entropy + (l2/2)·||w||², computed in a stable form."""
    z = x @ weights + bias
    # log(1 + e^z) - y·z, via logaddexp to avoid overflow at large |z|.
    ce = float(np.mean(np.logaddexp(0.0, z) - y * z))
    return ce + 0.5 * l2 * float(weights @ weights)


def logistic_gradient(
    weights: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray, l2: float
) -> tuple[np.ndarray, float]:
    """Analytic gradient of logistic_loss in (weights, bias)."""
    z = x @ weights + bias
    residual = 1.0 / (1.0 + np.exp(-z)) - y
    grad_w = x.T @ residual / len(y) + l2 * weights
    grad_b = float(np.mean(residual))
    return grad_w, grad_b


def fit_logistic(
    x: np.ndarray, y: np.ndarray, cfg: TrainConfig
) -> tuple[np.ndarray, float, list[float]]:
    """Run gradient descent; returns weights, bias, and the loss trace.

    The trace holds epochs+1 entries: the loss before any update, then one
    after each epoch.
    """
    weights = np.zeros(x.shape[1], dtype=np.float64)
    bias = 0.0
    losses = [logistic_loss(weights, bias, x, y, cfg.l2)]
    check_monotone = cfg.learning_rate <= 0.1
    for _ in range(cfg.epochs):
        grad_w, grad_b = logistic_gradient(weights, bias, x, y, cfg.l2)
        weights = weights - cfg.learning_rate * grad_w
        bias = bias - cfg.learning_rate * grad_b
        loss = logistic_loss(weights, bias, x, y, cfg.l2)
        if not np.isfinite(loss):
            raise NonFiniteLossError("training loss became non-finite")
        if check_monotone and loss > losses[-1] + _MONOTONE_SLACK:
            raise NonFiniteLossError(
                f"training loss increased from {losses[-1]!r} to {loss!r}"
            )
        losses.append(loss)
    return weights, bias, losses


def train_logistic_regression(
    train: Sequence[tuple[SparseVector, BinaryLabel]],
    cfg: TrainConfig,
    vocabulary: Vocabulary,
    idf: IdfTable,
) -> ClassifierModel:
    if not train:
        raise EmptyInputError("logistic regression needs at least one training item")
    labels = {label for _, label in train}
    if len(labels) < 2:
        raise SingleClassInputError("training data contains a single class")
    x = dense_matrix([vector for vector, _ in train], len(vocabulary))
    y = np.array([float(label) for _, label in train], dtype=np.float64)
    weights, bias, _ = fit_logistic(x, y, cfg)
    return ClassifierModel(
        kind=KIND_LOGISTIC_REGRESSION,
        parameters=LogisticParameters(weights=tuple(float(w) for w in weights), bias=bias),
        vocabulary=vocabulary,
        idf=idf,
    )
