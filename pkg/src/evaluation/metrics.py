"""Confusion matrices and precision/recall/F1 with macro and weighted averages.

Weighted averages weight each class by its support fraction (support_c / total).
A zero denominator yields 0 and sets the class's ``zero_division`` flag; it is never
an error.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from src.corpus.labels import OffenseLabel
from src.errors import DataError, EmptyEvaluationError, LabelSetError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Square count matrix; counts[g, p] is the number of samples with gold g predicted p.

    Attributes:
        labelset: Row/column labels in order
        counts: Integer matrix of shape (len(labelset), len(labelset))
    """

    labelset: tuple[OffenseLabel, ...]
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def supports(self) -> np.ndarray:
        """Row sums: gold samples per class."""
        return self.counts.sum(axis=1)

    @property
    def predicted_counts(self) -> np.ndarray:
        """Column sums: predictions per class."""
        return self.counts.sum(axis=0)

    @property
    def true_positives(self) -> np.ndarray:
        return np.diag(self.counts).copy()

    @property
    def false_positives(self) -> np.ndarray:
        return self.predicted_counts - self.true_positives

    @property
    def false_negatives(self) -> np.ndarray:
        return self.supports - self.true_positives

    def row_normalized(self) -> np.ndarray:
        """Each row divided by its support; rows with no support are all zeros."""
        supports = self.supports.astype(np.float64)
        out = np.zeros(self.counts.shape, dtype=np.float64)
        nonzero = supports > 0
        out[nonzero] = self.counts[nonzero] / supports[nonzero, None]
        return out


@dataclass(frozen=True)
class ClassMetrics:
    """Per-class scores.

    Attributes:
        label: The class
        precision: TP / (TP + FP), or 0 when nothing was predicted as the class
        recall: TP / (TP + FN), or 0 when the class has no gold samples
        f1: 2PR / (P + R), or 0 when P + R = 0
        support: Gold samples of the class
        zero_division: True when any of the three scores hit a zero denominator
    """

    label: OffenseLabel
    precision: float
    recall: float
    f1: float
    support: int
    zero_division: bool = False


@dataclass(frozen=True)
class MetricsReport:
    """Per-class metrics plus accuracy, macro and weighted averages.

    Attributes:
        per_class: One entry per label, in the matrix's label order
        accuracy: Correct predictions / total
        macro_precision, macro_recall, macro_f1: Unweighted means over classes
        weighted_precision, weighted_recall, weighted_f1: Support-weighted means
        total: Number of scored samples
        confusion: The matrix the report was computed from
    """

    per_class: tuple[ClassMetrics, ...]
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    total: int
    confusion: ConfusionMatrix = field(repr=False)


def confusion_matrix(
    gold: Sequence[OffenseLabel],
    pred: Sequence[OffenseLabel],
    labelset: Sequence[OffenseLabel],
) -> ConfusionMatrix:
    """Tally (gold, predicted) pairs.

    Raises:
        DataError: If gold and pred differ in length
        LabelSetError: If a label is outside ``labelset``
    """
    if len(gold) != len(pred):
        raise DataError(f"{len(gold)} gold labels but {len(pred)} predictions", code="LengthMismatch")
    labels = tuple(labelset)
    index = {label: i for i, label in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for position, (g, p) in enumerate(zip(gold, pred, strict=True)):
        if g not in index or p not in index:
            bad = g if g not in index else p
            raise LabelSetError(f"label {bad} at position {position} is outside the label set")
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(labelset=labels, counts=counts)


def _ratio(numerator: float, denominator: float) -> tuple[float, bool]:
    if denominator == 0:
        return 0.0, True
    return numerator / denominator, False


def harmonic_f1(precision: float, recall: float) -> tuple[float, bool]:
    """F1 = 2PR / (P + R); returns (0.0, True) when P + R = 0."""
    return _ratio(2.0 * precision * recall, precision + recall)


def per_class_prf(cm: ConfusionMatrix) -> list[ClassMetrics]:
    """Precision, recall, F1 and support for each label of the matrix."""
    tp, fp, fn = cm.true_positives, cm.false_positives, cm.false_negatives
    results = []
    for i, label in enumerate(cm.labelset):
        precision, p_flag = _ratio(float(tp[i]), float(tp[i] + fp[i]))
        recall, r_flag = _ratio(float(tp[i]), float(tp[i] + fn[i]))
        f1, f_flag = harmonic_f1(precision, recall)
        results.append(
            ClassMetrics(
                label=label,
                precision=precision,
                recall=recall,
                f1=f1,
                support=int(tp[i] + fn[i]),
                zero_division=p_flag or r_flag or f_flag,
            )
        )
    return results


def macro_average(per_class: Sequence[ClassMetrics]) -> tuple[float, float, float]:
    """Unweighted means (precision, recall, f1) over classes."""
    if not per_class:
        raise EmptyEvaluationError("macro average over zero classes")
    n = len(per_class)
    return (
        sum(m.precision for m in per_class) / n,
        sum(m.recall for m in per_class) / n,
        sum(m.f1 for m in per_class) / n,
    )


def weighted_average(per_class: Sequence[ClassMetrics]) -> tuple[float, float, float]:
    """Support-weighted means (precision, recall, f1)."""
    total = sum(m.support for m in per_class)
    if total == 0:
        raise EmptyEvaluationError("weighted average over zero support")
    return (
        sum(m.precision * m.support for m in per_class) / total,
        sum(m.recall * m.support for m in per_class) / total,
        sum(m.f1 * m.support for m in per_class) / total,
    )


def aggregate_metrics(per_class: Sequence[ClassMetrics], cm: ConfusionMatrix) -> MetricsReport:
    """Accuracy, macro and weighted averages.

    Raises:
        DataError: If ``per_class`` does not cover the matrix's label set
        EmptyEvaluationError: If the matrix is empty
    """
    if tuple(m.label for m in per_class) != cm.labelset:
        raise DataError("per-class metrics do not match the confusion matrix labels")
    total = cm.total
    if total == 0:
        raise EmptyEvaluationError(
            "no scored samples", detail="The evaluation split is empty"
        )
    macro = macro_average(per_class)
    weighted = weighted_average(per_class)
    accuracy = float(np.trace(cm.counts)) / total
    flagged = [m.label.code for m in per_class if m.zero_division]
    if flagged:
        logger.info("Zero-division metrics set to 0 for: %s", ", ".join(flagged))
    return MetricsReport(
        per_class=tuple(per_class),
        accuracy=accuracy,
        macro_precision=macro[0],
        macro_recall=macro[1],
        macro_f1=macro[2],
        weighted_precision=weighted[0],
        weighted_recall=weighted[1],
        weighted_f1=weighted[2],
        total=total,
        confusion=cm,
    )


def evaluate_predictions(
    gold: Sequence[OffenseLabel],
    pred: Sequence[OffenseLabel],
    labelset: Sequence[OffenseLabel],
) -> MetricsReport:
    """confusion_matrix, per_class_prf and aggregate_metrics in one call."""
    cm = confusion_matrix(gold, pred, labelset)
    return aggregate_metrics(per_class_prf(cm), cm)
