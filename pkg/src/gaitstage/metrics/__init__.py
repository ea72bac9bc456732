"""
Confusion matrices and per-class performance measures.

Usage:
    from gaitstage.metrics import ConfusionMatrix, report

    cm = ConfusionMatrix.from_predictions(actual, predicted)
    print(report(cm).render())
"""

from .confusion import (
    BinaryCounts,
    ConfusionMatrix,
    Rate,
    accuracy,
    binarize,
    binary_accuracy,
    f_measure,
    precision,
    recall,
)
from .report import REPORT_COLUMNS, ClassMetrics, ClassReport, report

__all__ = [
    "ConfusionMatrix",
    "BinaryCounts",
    "Rate",
    "binarize",
    "accuracy",
    "binary_accuracy",
    "precision",
    "recall",
    "f_measure",
    "ClassMetrics",
    "ClassReport",
    "REPORT_COLUMNS",
    "report",
]
