"""Evaluation metrics for the binary fraud task and rater agreement.

Fraud is the positive class everywhere.  Precision and recall fall back to
0.0 on an empty denominator, ROC AUC uses tie-aware average ranks, and
Fleiss' kappa follows the classic fixed-raters-per-item formulation.  The
module also reconstructs integer confusion matrices from published rounded
metrics and renders comparison reports with half-up 4-decimal rounding.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

from .corpus import BinaryLabel
from .errors import (
    EmptyInputError,
    EmptyMatrixError,
    InvalidMatrixError,
    LengthMismatchError,
    SingleClassInputError,
    TooFewRatersError,
)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Binary confusion cells with fraud as the positive class."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "fn", "tn"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"{name} must be a non-negative integer")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricSet:
    """Headline scores; accuracy and roc_auc are optional because published
    result rows do not always include them."""

    precision: float
    recall: float
    f1: float
    accuracy: float | None = None
    roc_auc: float | None = None

    @classmethod
    def from_precision_recall(
        cls,
        precision: float,
        recall: float,
        accuracy: float | None = None,
        roc_auc: float | None = None,
    ) -> "MetricSet":
        return cls(
            precision=precision,
            recall=recall,
            f1=f1_score(precision, recall),
            accuracy=accuracy,
            roc_auc=roc_auc,
        )


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0.0 when both are zero."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def confusion(
    predicted: Sequence[BinaryLabel], gold: Sequence[BinaryLabel]
) -> ConfusionMatrix:
    """Tally predictions against gold labels."""
    if len(predicted) != len(gold):
        raise LengthMismatchError(
            f"predicted has {len(predicted)} labels, gold has {len(gold)}"
        )
    if not predicted:
        raise EmptyInputError("cannot build a confusion matrix from zero pairs")
    tp = fp = fn = tn = 0
    for pred, truth in zip(predicted, gold):
        if truth is BinaryLabel.FRAUD:
            if pred is BinaryLabel.FRAUD:
                tp += 1
            else:
                fn += 1
        else:
            if pred is BinaryLabel.FRAUD:
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


def derive_metrics(matrix: ConfusionMatrix, roc_auc: float | None = None) -> MetricSet:
    """Accuracy, precision, recall, and F1 from confusion cells."""
    if matrix.total == 0:
        raise EmptyMatrixError("confusion matrix has no observations")
    precision = matrix.tp / (matrix.tp + matrix.fp) if matrix.tp + matrix.fp else 0.0
    recall = matrix.tp / (matrix.tp + matrix.fn) if matrix.tp + matrix.fn else 0.0
    return MetricSet(
        precision=precision,
        recall=recall,
        f1=f1_score(precision, recall),
        accuracy=(matrix.tp + matrix.tn) / matrix.total,
        roc_auc=roc_auc,
    )


def aggregate(matrices: Iterable[ConfusionMatrix]) -> ConfusionMatrix:
    """Micro-aggregate: cell-wise sum across matrices."""
    tp = fp = fn = tn = 0
    count = 0
    for matrix in matrices:
        tp += matrix.tp
        fp += matrix.fp
        fn += matrix.fn
        tn += matrix.tn
        count += 1
    if count == 0:
        raise EmptyInputError("cannot aggregate zero confusion matrices")
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


def roc_auc(scores: Sequence[float], gold: Sequence[BinaryLabel]) -> float:
    """Rank-based ROC AUC with average ranks for tied scores.

    Equivalent to the probability that a random fraud item outranks a random
    genuine item, counting ties as half.  A hard 0/1 classifier therefore
    scores (TPR + TNR) / 2.
    """
    if len(scores) != len(gold):
        raise LengthMismatchError(f"{len(scores)} scores but {len(gold)} labels")
    n_pos = sum(1 for label in gold if label is BinaryLabel.FRAUD)
    n_neg = len(gold) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassInputError("ROC AUC needs both classes in gold labels")
    order = sorted(range(len(scores)), key=lambda i: scores[i])
    ranks = [0.0] * len(scores)
    cursor = 0
    while cursor < len(order):
        tied_end = cursor
        while (
            tied_end + 1 < len(order)
            and scores[order[tied_end + 1]] == scores[order[cursor]]
        ):
            tied_end += 1
        # 1-based ranks; every member of a tie group gets the group mean.
        mean_rank = (cursor + tied_end) / 2.0 + 1.0
        for position in range(cursor, tied_end + 1):
            ranks[order[position]] = mean_rank
        cursor = tied_end + 1
    rank_sum_pos = sum(
        rank for rank, label in zip(ranks, gold) if label is BinaryLabel.FRAUD
    )
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass(frozen=True)
class RatingMatrix:
    """Item-by-category counts of ratings; every row should sum to the same
    number of raters.  Category labels are optional display metadata."""

    counts: tuple[tuple[int, ...], ...]
    categories: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if not self.counts:
            raise ValueError("rating matrix needs at least one item row")
        width = len(self.counts[0])
        for row in self.counts:
            if len(row) != width:
                raise ValueError("rating matrix rows must have equal width")
            if any(not isinstance(c, int) or c < 0 for c in row):
                raise ValueError("rating counts must be non-negative integers")
        if self.categories is not None and len(self.categories) != width:
            raise ValueError("category labels must match matrix width")

    @property
    def n_items(self) -> int:
        return len(self.counts)

    @property
    def n_categories(self) -> int:
        return len(self.counts[0])


def fleiss_kappa(matrix: RatingMatrix) -> float:
    """Fleiss' kappa for a constant number of raters per item.

    kappa = (P_bar - P_bar_e) / (1 - P_bar_e), where P_bar is the mean
    observed pairwise agreement per item and P_bar_e is the chance agreement
    from the pooled category distribution.  If chance agreement is exactly 1
    (all ratings in one category), agreement is perfect by construction and
    kappa is defined as 1.0.
    """
    row_sums = {sum(row) for row in matrix.counts}
    if len(row_sums) != 1:
        raise InvalidMatrixError(f"rows sum to different rater counts: {sorted(row_sums)}")
    n = row_sums.pop()
    if n < 2:
        raise TooFewRatersError("Fleiss' kappa needs at least two raters per item")
    n_items = matrix.n_items
    p_i = [
        (sum(c * c for c in row) - n) / (n * (n - 1)) for row in matrix.counts
    ]
    p_bar = sum(p_i) / n_items
    totals = [
        sum(row[j] for row in matrix.counts) for j in range(matrix.n_categories)
    ]
    grand = n * n_items
    p_j = [t / grand for t in totals]
    p_bar_e = sum(p * p for p in p_j)
    if p_bar_e == 1.0:
        if p_bar == 1.0:
            return 1.0
        raise InvalidMatrixError("chance agreement is 1 but observed agreement is not")
    return (p_bar - p_bar_e) / (1.0 - p_bar_e)


@dataclass(frozen=True)
class ReconstructionResult:
    matrix: ConfusionMatrix
    deviation: float


def reconstruct_confusion(
    target: MetricSet, n_pos: int, n_neg: int
) -> ReconstructionResult:
    """Search integer confusion matrices matching published rounded metrics.

    Scans every (tp, fp) with 0 <= tp <= n_pos and 0 <= fp <= n_neg and
    minimizes the maximum absolute deviation across the metrics present in
    the target (accuracy when given, precision, recall).  Ties prefer the
    smaller tp, then the smaller fp, so results are reproducible.
    """
    if n_pos <= 0 or n_neg <= 0:
        raise ValueError("n_pos and n_neg must both be positive")
    total = n_pos + n_neg
    best: tuple[float, int, int] | None = None
    for tp in range(n_pos + 1):
        recall = tp / n_pos
        recall_dev = abs(recall - target.recall)
        for fp in range(n_neg + 1):
            predicted_pos = tp + fp
            precision = tp / predicted_pos if predicted_pos else 0.0
            deviation = max(recall_dev, abs(precision - target.precision))
            if target.accuracy is not None:
                accuracy = (tp + (n_neg - fp)) / total
                deviation = max(deviation, abs(accuracy - target.accuracy))
            if best is None or deviation < best[0]:
                best = (deviation, tp, fp)
    assert best is not None
    deviation, tp, fp = best
    matrix = ConfusionMatrix(tp=tp, fp=fp, fn=n_pos - tp, tn=n_neg - fp)
    return ReconstructionResult(matrix=matrix, deviation=deviation)


def round4(value: float) -> str:
    """Format with exactly four decimals, rounding half away from zero up."""
    quantized = Decimal(repr(value)).quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP)
    return f"{quantized:.4f}"


@dataclass(frozen=True)
class Report:
    """Rendered comparison report: aligned text table plus a CSV twin."""

    text: str
    csv: str


def render_report(rows: Sequence[tuple[str, MetricSet]]) -> Report:
    """Render named metric rows as an aligned table and a CSV document.

    Recall, precision, and F1 always appear; the accuracy and ROC AUC
    columns appear only when at least one row carries a value, and rows
    without one leave the cell blank.
    """
    if not rows:
        raise EmptyInputError("report needs at least one row")
    with_accuracy = any(metrics.accuracy is not None for _, metrics in rows)
    with_roc = any(metrics.roc_auc is not None for _, metrics in rows)
    headers = ["Model", "Recall", "Precision", "F1"]
    if with_accuracy:
        headers.append("Accuracy")
    if with_roc:
        headers.append("ROC AUC")

    def cells(name: str, metrics: MetricSet) -> list[str]:
        row = [name, round4(metrics.recall), round4(metrics.precision), round4(metrics.f1)]
        if with_accuracy:
            row.append("" if metrics.accuracy is None else round4(metrics.accuracy))
        if with_roc:
            row.append("" if metrics.roc_auc is None else round4(metrics.roc_auc))
        return row

    table_rows = [cells(name, metrics) for name, metrics in rows]
    widths = [
        max(len(headers[i]), *(len(row[i]) for row in table_rows))
        for i in range(len(headers))
    ]
    lines = []
    header_line = "  ".join(
        headers[i].ljust(widths[i]) if i == 0 else headers[i].rjust(widths[i])
        for i in range(len(headers))
    )
    lines.append(header_line.rstrip())
    for row in table_rows:
        line = "  ".join(
            row[i].ljust(widths[i]) if i == 0 else row[i].rjust(widths[i])
            for i in range(len(headers))
        )
        lines.append(line.rstrip())
    text = "\n".join(lines) + "\n"

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([h.lower().replace(" ", "_") for h in headers])
    for row in table_rows:
        writer.writerow(row)
    return Report(text=text, csv=buffer.getvalue())


def render_filter_audit(matrices: Sequence[ConfusionMatrix]) -> str:
    """Summarize per-post filter confusion matrices and their aggregate.

    Reports micro-aggregated cells plus recall, precision, and specificity
    of the aggregate, each to four decimals.
    """
    combined = aggregate(matrices)
    recall = combined.tp / (combined.tp + combined.fn) if combined.tp + combined.fn else 0.0
    precision = combined.tp / (combined.tp + combined.fp) if combined.tp + combined.fp else 0.0
    specificity = combined.tn / (combined.tn + combined.fp) if combined.tn + combined.fp else 0.0
    lines = [f"matrices: {len(matrices)}"]
    for i, m in enumerate(matrices, start=1):
        lines.append(f"  [{i}] tp={m.tp} fp={m.fp} fn={m.fn} tn={m.tn}")
    lines.append(
        f"aggregate: tp={combined.tp} fp={combined.fp} fn={combined.fn} tn={combined.tn}"
    )
    lines.append(f"recall {round4(recall)}")
    lines.append(f"precision {round4(precision)}")
    lines.append(f"specificity {round4(specificity)}")
    return "\n".join(lines) + "\n"
