"""Independent reference implementations used to check the package's math.

Everything here is written the slow, obvious way (pair counting, explicit
formula transcription, brute-force enumeration) so that agreement with the
package is meaningful evidence rather than the same code twice.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np


def pairwise_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """ROC AUC by direct pair counting: wins + half-ties over all
    (positive, negative) pairs."""
    positives = [s for s, y in zip(scores, labels) if y == 1]
    negatives = [s for s, y in zip(scores, labels) if y == 0]
    wins = 0.0
    for p in positives:
        for n in negatives:
            if p > n:
                wins += 1.0
            elif p == n:
                wins += 0.5
    return wins / (len(positives) * len(negatives))


def fleiss_kappa_reference(counts: Sequence[Sequence[int]]) -> float:
    """Fleiss' kappa transcribed directly from the 1971 formulation."""
    matrix = np.asarray(counts, dtype=np.float64)
    n_items, _ = matrix.shape
    n = matrix[0].sum()
    p_i = (np.square(matrix).sum(axis=1) - n) / (n * (n - 1))
    p_bar = p_i.mean()
    p_j = matrix.sum(axis=0) / (n_items * n)
    p_bar_e = float(np.square(p_j).sum())
    return float((p_bar - p_bar_e) / (1.0 - p_bar_e))


def central_difference_gradient(
    f: Callable[[np.ndarray], float], point: np.ndarray, h: float = 1e-5
) -> np.ndarray:
    """Numeric gradient of a scalar function by central differences."""
    grad = np.zeros_like(point)
    for j in range(point.size):
        step = np.zeros_like(point)
        step[j] = h
        grad[j] = (f(point + step) - f(point - step)) / (2.0 * h)
    return grad


def gini_impurity(labels: Sequence[int]) -> float:
    n = len(labels)
    if n == 0:
        return 0.0
    p = sum(labels) / n
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def best_split_reference(
    column: Sequence[float], labels: Sequence[int], min_leaf: int
) -> tuple[float, float] | None:
    """Exhaustive best (gain, midpoint threshold) for one feature column.

    Scans midpoints between consecutive distinct sorted values, keeping the
    first strictly best candidate, exactly as the contract describes.
    """
    n = len(labels)
    pairs = sorted(zip(column, labels))
    parent = gini_impurity(labels)
    best: tuple[float, float] | None = None
    for i in range(1, n):
        if pairs[i][0] == pairs[i - 1][0]:
            continue
        if i < min_leaf or n - i < min_leaf:
            continue
        left = [y for _, y in pairs[:i]]
        right = [y for _, y in pairs[i:]]
        weighted = (len(left) * gini_impurity(left) + len(right) * gini_impurity(right)) / n
        gain = parent - weighted
        threshold = (pairs[i - 1][0] + pairs[i][0]) / 2.0
        if gain > 1e-12 and (best is None or gain > best[0]):
            best = (gain, threshold)
    return best


def f1_reference(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def smoothed_idf_reference(n_docs: int, df: int) -> float:
    return math.log((1 + n_docs) / (1 + df)) + 1.0
