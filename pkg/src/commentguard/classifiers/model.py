"""Model types shared by every classifier backend.

A ClassifierModel is a tagged union: the kind string selects the parameter
payload, and predict() dispatches on it.  Native kinds carry the vocabulary
(and idf where features are tf-idf) so a saved model is self-contained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

from ..corpus import BinaryLabel
from ..errors import KindMismatchError
from ..textproc import IdfTable, SparseVector, Vocabulary, count_vectorize, tfidf_vectorize, tokenize

KIND_NAIVE_BAYES = "naive_bayes"
KIND_LOGISTIC_REGRESSION = "logistic_regression"
KIND_DECISION_TREE = "decision_tree"
KIND_RANDOM_FOREST = "random_forest"
KIND_REMOTE = "remote"

NATIVE_KINDS = (
    KIND_NAIVE_BAYES,
    KIND_LOGISTIC_REGRESSION,
    KIND_DECISION_TREE,
    KIND_RANDOM_FOREST,
)
ALL_KINDS = NATIVE_KINDS + (KIND_REMOTE,)

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class Prediction:
    """A verdict: fraud probability plus the thresholded label."""

    label: BinaryLabel
    score: float


def label_for_score(score: float, threshold: float = DEFAULT_THRESHOLD) -> BinaryLabel:
    """Fraud strictly above the threshold; a tie stays genuine (prefer not
    flagging when the evidence is exactly ambiguous)."""
    return BinaryLabel.FRAUD if score > threshold else BinaryLabel.GENUINE


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for the native trainers; unrelated fields are ignored
    by each kind."""

    learning_rate: float = 0.1
    epochs: int = 200
    l2: float = 1e-4
    alpha: float = 1.0
    max_depth: int = 12
    min_leaf: int = 2
    n_trees: int = 100
    feature_subsample: float | None = None  # None = ceil(sqrt(d)) per split
    bootstrap: bool = True
    seed: int = 42

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs <= 0 or self.max_depth <= 0 or self.min_leaf <= 0 or self.n_trees <= 0:
            raise ValueError("epochs, max_depth, min_leaf, n_trees must be positive")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.feature_subsample is not None and not 0.0 < self.feature_subsample <= 1.0:
            raise ValueError("feature_subsample must lie in (0, 1]")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class TransformerJobConfig:
    """Serializable description of an external transformer fine-tune job.

    Training itself happens outside this package; the config exists so a job
    can be described and handed off reproducibly.
    """

    pretrained_name: str = "bert-base-cased"
    epochs: int = 10
    max_length: int = 512
    batch_size: int = 16
    optimizer: str = "AdamW"
    learning_rate: float = 2e-5
    correct_bias: bool = False
    scheduler: str = "linear"
    warmup_steps: int = 0
    loss: str = "cross-entropy"
    train_fraction: float = 0.8
    val_fraction: float = 0.1
    test_fraction: float = 0.1

    def to_dict(self) -> dict:
        return {
            "pretrained_name": self.pretrained_name,
            "epochs": self.epochs,
            "max_length": self.max_length,
            "batch_size": self.batch_size,
            "optimizer": self.optimizer,
            "learning_rate": self.learning_rate,
            "correct_bias": self.correct_bias,
            "scheduler": self.scheduler,
            "warmup_steps": self.warmup_steps,
            "loss": self.loss,
            "train_fraction": self.train_fraction,
            "val_fraction": self.val_fraction,
            "test_fraction": self.test_fraction,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TransformerJobConfig":
        return cls(**data)


# --- kind-specific parameter payloads ---------------------------------------

@dataclass(frozen=True)
class NaiveBayesParameters:
    """Log prior and per-term log likelihood for (genuine, fraud)."""

    log_prior: tuple[float, float]
    log_likelihood: tuple[tuple[float, ...], tuple[float, ...]]


@dataclass(frozen=True)
class LogisticParameters:
    weights: tuple[float, ...]
    bias: float


@dataclass(frozen=True)
class TreeNode:
    """One CART node; leaves have feature None.  Score is the fraud fraction
    of the training items that reached the node."""

    score: float
    n_samples: int
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass(frozen=True)
class DecisionTreeParameters:
    root: TreeNode


@dataclass(frozen=True)
class RandomForestParameters:
    trees: tuple[TreeNode, ...]


@dataclass(frozen=True)
class RemoteParameters:
    """Adapter for an externally served model speaking the /scam wire format."""

    endpoint_url: str
    timeout: float = 10.0


Parameters = Union[
    NaiveBayesParameters,
    LogisticParameters,
    DecisionTreeParameters,
    RandomForestParameters,
    RemoteParameters,
]


@dataclass
class ClassifierModel:
    """A trained (or remote) classifier plus everything needed to featurize."""

    kind: str
    parameters: Parameters
    vocabulary: Vocabulary | None = None
    idf: IdfTable | None = None
    threshold: float = DEFAULT_THRESHOLD
    version: str = "1.0"
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ALL_KINDS:
            raise KindMismatchError(f"unknown model kind: {self.kind!r}")
        native = self.kind in NATIVE_KINDS
        if native and self.vocabulary is None:
            raise ValueError("native models must embed their vocabulary")
        if not native and self.vocabulary is not None:
            raise ValueError("remote models carry no vocabulary")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if not self.name:
            self.name = self.kind


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    expz = math.exp(z)
    return expz / (1.0 + expz)


def _tree_score(node: TreeNode, dense: Sequence[float]) -> float:
    while not node.is_leaf:
        assert node.left is not None and node.right is not None
        node = node.left if dense[node.feature] <= node.threshold else node.right
    return node.score


def score_vector(model: ClassifierModel, vector: SparseVector) -> float:
    """Fraud probability for an already-featurized input."""
    if model.kind == KIND_NAIVE_BAYES:
        from .naive_bayes import posterior_fraud

        return posterior_fraud(model.parameters, vector)
    if model.kind == KIND_LOGISTIC_REGRESSION:
        params = model.parameters
        z = params.bias + sum(params.weights[i] * w for i, w in vector.entries)
        return sigmoid(z)
    dense = vector.to_dense(len(model.vocabulary))
    if model.kind == KIND_DECISION_TREE:
        return _tree_score(model.parameters.root, dense)
    if model.kind == KIND_RANDOM_FOREST:
        trees = model.parameters.trees
        return sum(_tree_score(tree, dense) for tree in trees) / len(trees)
    raise KindMismatchError(f"cannot score vectors with kind {model.kind!r}")


def featurize(model: ClassifierModel, text: str) -> SparseVector:
    """Tokenize and vectorize text the way the model was trained."""
    tokens = tokenize(text)
    if model.kind == KIND_NAIVE_BAYES:
        return count_vectorize(tokens, model.vocabulary)
    if model.idf is None:
        raise ValueError(f"model kind {model.kind!r} needs an idf table")
    return tfidf_vectorize(tokens, model.vocabulary, model.idf)


def predict(model: ClassifierModel, text: str) -> Prediction:
    """Classify one comment text with any model kind."""
    if model.kind == KIND_REMOTE:
        from ..llm_backend import classify_inference_endpoint

        return classify_inference_endpoint(text, model.parameters)
    score = score_vector(model, featurize(model, text))
    return Prediction(label=label_for_score(score, model.threshold), score=score)


def select_threshold(scores: Sequence[float], gold: Sequence[BinaryLabel]) -> float:
    """Pick the threshold maximizing F1 on held-out scores.

    Candidates are the distinct scores themselves (a fraud verdict needs
    score > threshold, so each distinct score is a meaningful cut) plus the
    0.5 default.  Ties prefer the threshold closest to 0.5, then the lower.
    """
    from ..metrics import confusion, derive_metrics

    candidates = sorted(set(scores) | {DEFAULT_THRESHOLD})
    best: tuple[float, float, float] | None = None
    for threshold in candidates:
        predicted = [label_for_score(s, threshold) for s in scores]
        f1 = derive_metrics(confusion(predicted, gold)).f1
        key = (-f1, abs(threshold - DEFAULT_THRESHOLD), threshold)
        if best is None or key < best:
            best = key
    assert best is not None
    return best[2]
