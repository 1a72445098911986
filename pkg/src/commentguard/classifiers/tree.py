"""CART decision tree with Gini impurity on dense feature rows.

Split thresholds are midpoints between consecutive distinct sorted values;
rows with value <= threshold go left.  Gini-gain ties break toward the
lower feature index, then the lower threshold, so rebuilding from the same
data always yields the same tree.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..corpus import BinaryLabel
from ..errors import EmptyInputError
from ..textproc import IdfTable, SparseVector, Vocabulary
from .linear import dense_matrix
from .model import (
    KIND_DECISION_TREE,
    ClassifierModel,
    DecisionTreeParameters,
    TrainConfig,
    TreeNode,
)

# Gains below this are treated as zero so float dust cannot force a split.
_MIN_GAIN = 1e-12


def gini(n_pos: float, n_total: float) -> float:
    if n_total == 0:
        return 0.0
    p = n_pos / n_total
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _best_split_for_feature(
    values: np.ndarray, y: np.ndarray, min_leaf: int
) -> tuple[float, float] | None:
    """Best (gain, threshold) splitting one feature, or None if no valid cut.

    Within the feature, equal gains resolve to the lowest threshold because
    candidate cuts are scanned in ascending value order and only strict
    improvements are accepted.
    """
    n = len(y)
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    sorted_y = y[order]
    prefix_pos = np.cumsum(sorted_y)
    total_pos = prefix_pos[-1]
    parent = gini(float(total_pos), float(n))
    # Candidate cut after position i-1 (left size i), for i in [1, n).
    sizes = np.arange(1, n)
    boundary = sorted_values[1:] > sorted_values[:-1]
    valid = boundary & (sizes >= min_leaf) & (n - sizes >= min_leaf)
    if not np.any(valid):
        return None
    left_pos = prefix_pos[:-1]
    right_pos = total_pos - left_pos
    left_n = sizes.astype(np.float64)
    right_n = float(n) - left_n
    with np.errstate(invalid="ignore", divide="ignore"):
        p_left = left_pos / left_n
        p_right = right_pos / right_n
    gini_left = 1.0 - p_left * p_left - (1.0 - p_left) * (1.0 - p_left)
    gini_right = 1.0 - p_right * p_right - (1.0 - p_right) * (1.0 - p_right)
    weighted = (left_n * gini_left + right_n * gini_right) / float(n)
    gain = np.where(valid, parent - weighted, -np.inf)
    best = int(np.argmax(gain))
    best_gain = float(gain[best])
    if best_gain <= _MIN_GAIN:
        return None
    threshold = float((sorted_values[best] + sorted_values[best + 1]) / 2.0)
    return best_gain, threshold


def build_tree(
    x: np.ndarray,
    y: np.ndarray,
    cfg: TrainConfig,
    rng: np.random.Generator | None = None,
    features_per_split: int | None = None,
    depth: int = 0,
) -> TreeNode:
    """Recursive CART builder; rng drives per-split feature subsampling."""
    n = len(y)
    n_pos = float(np.sum(y))
    score = n_pos / n
    if (
        depth >= cfg.max_depth
        or n < 2 * cfg.min_leaf
        or n_pos == 0.0
        or n_pos == float(n)
    ):
        return TreeNode(score=score, n_samples=n)
    d = x.shape[1]
    if rng is not None and features_per_split is not None and features_per_split < d:
        candidates = np.sort(rng.choice(d, size=features_per_split, replace=False))
    else:
        candidates = np.arange(d)
    best: tuple[float, int, float] | None = None
    for feature in candidates:
        found = _best_split_for_feature(x[:, feature], y, cfg.min_leaf)
        if found is None:
            continue
        gain, threshold = found
        # Strict improvement keeps the lowest qualifying feature index.
        if best is None or gain > best[0]:
            best = (gain, int(feature), threshold)
    if best is None:
        return TreeNode(score=score, n_samples=n)
    _, feature, threshold = best
    left_mask = x[:, feature] <= threshold
    left = build_tree(
        x[left_mask], y[left_mask], cfg, rng, features_per_split, depth + 1
    )
    right = build_tree(
        x[~left_mask], y[~left_mask], cfg, rng, features_per_split, depth + 1
    )
    return TreeNode(
        score=score,
        n_samples=n,
        feature=feature,
        threshold=threshold,
        left=left,
        right=right,
    )


def train_decision_tree(
    train: Sequence[tuple[SparseVector, BinaryLabel]],
    cfg: TrainConfig,
    vocabulary: Vocabulary,
    idf: IdfTable,
) -> ClassifierModel:
    if not train:
        raise EmptyInputError("decision tree needs at least one training item")
    x = dense_matrix([vector for vector, _ in train], len(vocabulary))
    y = np.array([float(label) for _, label in train], dtype=np.float64)
    root = build_tree(x, y, cfg)
    return ClassifierModel(
        kind=KIND_DECISION_TREE,
        parameters=DecisionTreeParameters(root=root),
        vocabulary=vocabulary,
        idf=idf,
    )


def subsample_width(d: int, cfg: TrainConfig) -> int:
    """Features examined per forest split: ceil(sqrt(d)) or a set fraction."""
    if cfg.feature_subsample is None:
        k = math.ceil(math.sqrt(d))
    else:
        k = math.ceil(cfg.feature_subsample * d)
    return max(1, min(d, k))


def tree_to_nodes(root: TreeNode) -> list[dict]:
    """Flatten to a list of dicts in preorder; children referenced by index."""
    nodes: list[dict] = []

    def visit(node: TreeNode) -> int:
        position = len(nodes)
        if node.is_leaf:
            nodes.append({"score": node.score, "n": node.n_samples})
            return position
        nodes.append({})
        left = visit(node.left)
        right = visit(node.right)
        nodes[position] = {
            "score": node.score,
            "n": node.n_samples,
            "feature": node.feature,
            "threshold": node.threshold,
            "left": left,
            "right": right,
        }
        return position

    visit(root)
    return nodes


def nodes_to_tree(nodes: Sequence[dict]) -> TreeNode:
    """Rebuild a TreeNode from its flattened form."""

    def build(position: int) -> TreeNode:
        raw = nodes[position]
        if "feature" not in raw:
            return TreeNode(score=float(raw["score"]), n_samples=int(raw["n"]))
        return TreeNode(
            score=float(raw["score"]),
            n_samples=int(raw["n"]),
            feature=int(raw["feature"]),
            threshold=float(raw["threshold"]),
            left=build(int(raw["left"])),
            right=build(int(raw["right"])),
        )

    return build(0)
