"""Classifier backends: native trainers, persistence, and prediction."""

from .forest import train_random_forest
from .linear import train_logistic_regression
from .model import (
    ALL_KINDS,
    KIND_DECISION_TREE,
    KIND_LOGISTIC_REGRESSION,
    KIND_NAIVE_BAYES,
    KIND_RANDOM_FOREST,
    KIND_REMOTE,
    NATIVE_KINDS,
    ClassifierModel,
    DecisionTreeParameters,
    LogisticParameters,
    NaiveBayesParameters,
    Prediction,
    RandomForestParameters,
    RemoteParameters,
    TrainConfig,
    TransformerJobConfig,
    TreeNode,
    label_for_score,
    predict,
    score_vector,
    select_threshold,
)
from .naive_bayes import train_naive_bayes
from .persistence import FORMAT_VERSION, load_model, save_model
from .pipeline import train_from_comments
from .tree import train_decision_tree

__all__ = [
    "ALL_KINDS",
    "KIND_DECISION_TREE",
    "KIND_LOGISTIC_REGRESSION",
    "KIND_NAIVE_BAYES",
    "KIND_RANDOM_FOREST",
    "KIND_REMOTE",
    "NATIVE_KINDS",
    "ClassifierModel",
    "DecisionTreeParameters",
    "FORMAT_VERSION",
    "LogisticParameters",
    "NaiveBayesParameters",
    "Prediction",
    "RandomForestParameters",
    "RemoteParameters",
    "TrainConfig",
    "TransformerJobConfig",
    "TreeNode",
    "label_for_score",
    "load_model",
    "predict",
    "save_model",
    "score_vector",
    "select_threshold",
    "train_decision_tree",
    "train_from_comments",
    "train_logistic_regression",
    "train_naive_bayes",
    "train_random_forest",
]
