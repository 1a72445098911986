"""Random forest: bagged CART trees with per-split feature subsampling.

Tree i draws every random decision from its own generator seeded with
cfg.seed + i, so training order (or a parallel map) cannot change the
result: the forest is a pure function of (data, cfg).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..corpus import BinaryLabel
from ..errors import EmptyInputError
from ..textproc import IdfTable, SparseVector, Vocabulary
from .linear import dense_matrix
from .model import (
    KIND_RANDOM_FOREST,
    ClassifierModel,
    RandomForestParameters,
    TrainConfig,
    TreeNode,
)
from .tree import build_tree, subsample_width


def _train_single_tree(
    x: np.ndarray, y: np.ndarray, cfg: TrainConfig, tree_index: int
) -> TreeNode:
    rng = np.random.default_rng(cfg.seed + tree_index)
    n = len(y)
    if cfg.bootstrap:
        rows = rng.integers(0, n, size=n)
        sample_x, sample_y = x[rows], y[rows]
    else:
        sample_x, sample_y = x, y
    return build_tree(
        sample_x,
        sample_y,
        cfg,
        rng=rng,
        features_per_split=subsample_width(x.shape[1], cfg),
    )


def train_random_forest(
    train: Sequence[tuple[SparseVector, BinaryLabel]],
    cfg: TrainConfig,
    vocabulary: Vocabulary,
    idf: IdfTable,
) -> ClassifierModel:
    if not train:
        raise EmptyInputError("random forest needs at least one training item")
    x = dense_matrix([vector for vector, _ in train], len(vocabulary))
    y = np.array([float(label) for _, label in train], dtype=np.float64)
    trees = tuple(
        _train_single_tree(x, y, cfg, tree_index) for tree_index in range(cfg.n_trees)
    )
    return ClassifierModel(
        kind=KIND_RANDOM_FOREST,
        parameters=RandomForestParameters(trees=trees),
        vocabulary=vocabulary,
        idf=idf,
    )
