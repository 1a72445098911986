"""commentguard: comment-fraud classification, evaluation, and serving."""

from .corpus import (
    BinaryLabel,
    Comment,
    LabeledComment,
    RawLabel,
    SplitSpec,
    collapse_label,
    load_corpus,
    parse_corpus,
    split_dataset,
)
from .classifiers import (
    ClassifierModel,
    Prediction,
    TrainConfig,
    load_model,
    predict,
    save_model,
    train_from_comments,
)
from .metrics import ConfusionMatrix, MetricSet, confusion, derive_metrics

__version__ = "0.1.0"

__all__ = [
    "BinaryLabel",
    "ClassifierModel",
    "Comment",
    "ConfusionMatrix",
    "LabeledComment",
    "MetricSet",
    "Prediction",
    "RawLabel",
    "SplitSpec",
    "TrainConfig",
    "collapse_label",
    "confusion",
    "derive_metrics",
    "load_corpus",
    "load_model",
    "parse_corpus",
    "predict",
    "save_model",
    "split_dataset",
    "train_from_comments",
    "__version__",
]
