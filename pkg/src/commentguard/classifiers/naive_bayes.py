"""Multinomial naive Bayes over raw token counts, trained in log space."""

from __future__ import annotations

import math
from typing import Sequence

from ..corpus import BinaryLabel
from ..errors import EmptyInputError, SingleClassInputError
from ..textproc import IdfTable, SparseVector, Vocabulary
from .model import (
    KIND_NAIVE_BAYES,
    ClassifierModel,
    NaiveBayesParameters,
    TrainConfig,
)


def train_naive_bayes(
    train: Sequence[tuple[SparseVector, BinaryLabel]],
    cfg: TrainConfig,
    vocabulary: Vocabulary,
    idf: IdfTable | None = None,
) -> ClassifierModel:
    """Fit class priors and Laplace-smoothed term likelihoods from counts.

    Vectors must hold raw token counts, not tf-idf weights.  The idf table
    is accepted only so the embedded featurization state mirrors the other
    kinds; naive Bayes itself never uses it.
    """
    if not train:
        raise EmptyInputError("naive Bayes needs at least one training item")
    labels = {label for _, label in train}
    if len(labels) < 2:
        raise SingleClassInputError("training data contains a single class")
    size = len(vocabulary)
    doc_counts = [0, 0]
    term_counts = [[0.0] * size, [0.0] * size]
    for vector, label in train:
        cls = int(label)
        doc_counts[cls] += 1
        for index, count in vector.entries:
            term_counts[cls][index] += count
    total = len(train)
    log_prior = tuple(math.log(doc_counts[cls] / total) for cls in (0, 1))
    alpha = cfg.alpha
    log_likelihood = []
    for cls in (0, 1):
        mass = sum(term_counts[cls]) + alpha * size
        log_likelihood.append(
            tuple(math.log((count + alpha) / mass) for count in term_counts[cls])
        )
    return ClassifierModel(
        kind=KIND_NAIVE_BAYES,
        parameters=NaiveBayesParameters(
            log_prior=log_prior, log_likelihood=tuple(log_likelihood)
        ),
        vocabulary=vocabulary,
        idf=idf,
    )


def class_log_joint(params: NaiveBayesParameters, vector: SparseVector) -> tuple[float, float]:
    """Unnormalized log joint per class for a counts vector."""
    joints = []
    for cls in (0, 1):
        likelihood = params.log_likelihood[cls]
        joints.append(
            params.log_prior[cls]
            + sum(count * likelihood[index] for index, count in vector.entries)
        )
    return joints[0], joints[1]


def posteriors(params: NaiveBayesParameters, vector: SparseVector) -> tuple[float, float]:
    """Normalized (genuine, fraud) posterior; sums to 1 by construction."""
    lj_genuine, lj_fraud = class_log_joint(params, vector)
    peak = max(lj_genuine, lj_fraud)
    w_genuine = math.exp(lj_genuine - peak)
    w_fraud = math.exp(lj_fraud - peak)
    total = w_genuine + w_fraud
    return w_genuine / total, w_fraud / total


def posterior_fraud(params: NaiveBayesParameters, vector: SparseVector) -> float:
    return posteriors(params, vector)[1]
