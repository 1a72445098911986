"""End-to-end training from labeled comments: tokenize, fit features, train."""

from __future__ import annotations

from typing import Sequence

from ..corpus import LabeledComment
from ..errors import EmptyInputError, KindMismatchError
from ..textproc import build_vocabulary, count_vectorize, fit_idf, tfidf_vectorize, tokenize
from .forest import train_random_forest
from .linear import train_logistic_regression
from .model import (
    KIND_DECISION_TREE,
    KIND_LOGISTIC_REGRESSION,
    KIND_NAIVE_BAYES,
    KIND_RANDOM_FOREST,
    ClassifierModel,
    TrainConfig,
)
from .naive_bayes import train_naive_bayes
from .tree import train_decision_tree


def train_from_comments(
    kind: str,
    labeled: Sequence[LabeledComment],
    cfg: TrainConfig | None = None,
    min_df: int = 2,
    max_size: int = 50_000,
) -> ClassifierModel:
    """Fit vocabulary and idf on the given items, then train the chosen kind.

    Naive Bayes consumes raw counts; the other native kinds consume
    L2-normalized tf-idf vectors.  The fitted vocabulary and idf are
    embedded in the returned model so it can featurize on its own.
    """
    if not labeled:
        raise EmptyInputError("no labeled comments to train on")
    cfg = cfg or TrainConfig()
    documents = [tokenize(item.comment.text) for item in labeled]
    vocabulary = build_vocabulary(documents, min_df=min_df, max_size=max_size)
    idf = fit_idf(documents, vocabulary)
    labels = [item.binary for item in labeled]
    if kind == KIND_NAIVE_BAYES:
        train = [
            (count_vectorize(doc, vocabulary), label)
            for doc, label in zip(documents, labels)
        ]
        return train_naive_bayes(train, cfg, vocabulary, idf)
    train = [
        (tfidf_vectorize(doc, vocabulary, idf), label)
        for doc, label in zip(documents, labels)
    ]
    if kind == KIND_LOGISTIC_REGRESSION:
        return train_logistic_regression(train, cfg, vocabulary, idf)
    if kind == KIND_DECISION_TREE:
        return train_decision_tree(train, cfg, vocabulary, idf)
    if kind == KIND_RANDOM_FOREST:
        return train_random_forest(train, cfg, vocabulary, idf)
    raise KindMismatchError(f"cannot train model kind {kind!r}")
