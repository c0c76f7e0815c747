"""Evaluation metrics and classification reports."""

from src.evaluation.metrics import (
    ClassMetrics,
    ConfusionMatrix,
    MetricsReport,
    aggregate_metrics,
    confusion_matrix,
    evaluate_predictions,
    harmonic_f1,
    macro_average,
    per_class_prf,
    weighted_average,
)
from src.evaluation.report import (
    ClassificationReport,
    classification_report,
    heatmap_csv,
    heatmap_rows,
    write_report,
)

__all__ = [
    "ClassMetrics",
    "ClassificationReport",
    "ConfusionMatrix",
    "MetricsReport",
    "aggregate_metrics",
    "classification_report",
    "confusion_matrix",
    "evaluate_predictions",
    "harmonic_f1",
    "heatmap_csv",
    "heatmap_rows",
    "macro_average",
    "per_class_prf",
    "weighted_average",
    "write_report",
]
