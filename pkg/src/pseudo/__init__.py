"""Pseudo-labeling and CM-TRA construction."""

from src.pseudo.labeling import (
    ProbabilisticClassifier,
    PseudoLabelConfig,
    PseudoLabelRun,
    build_cm_tra,
    generate_pseudo_labels,
)

__all__ = [
    "ProbabilisticClassifier",
    "PseudoLabelConfig",
    "PseudoLabelRun",
    "build_cm_tra",
    "generate_pseudo_labels",
]
