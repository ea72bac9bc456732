"""
Confusion-matrix bookkeeping and the per-class rates derived from it.

Rows are actual classes, columns predicted classes, both in CLASS_ORDER.
"""

from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import ShapeError, StorageError, UndefinedMetricError
from ..ingest.schema import CLASS_ORDER, ClassLabel


@dataclass(frozen=True)
class BinaryCounts:
    """One-vs-rest reduction of the matrix for a single class."""

    tp: int
    fn: int
    fp: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn


@dataclass(frozen=True)
class Rate:
    """A ratio in [0, 1]; ``degenerate`` marks a zero denominator (value 0)."""

    value: float
    degenerate: bool = False

    def __float__(self) -> float:
        return self.value


class ConfusionMatrix:
    """
    Square matrix of non-negative integer counts.

    Example:
        cm = ConfusionMatrix.from_predictions(actual, predicted)
        cm.counts[ClassLabel.PD2.index, ClassLabel.PD3.index]  # PD2 windows predicted PD3
    """

    def __init__(self, counts: np.ndarray, labels: tuple[ClassLabel, ...] = CLASS_ORDER):
        counts = np.asarray(counts)
        n = len(labels)
        if counts.shape != (n, n):
            raise ShapeError(f"Confusion matrix must be {n}x{n}, got {counts.shape}")
        if not np.all(counts == np.round(counts)) or np.any(counts < 0):
            raise ShapeError("Confusion matrix entries must be non-negative integers")
        self.counts = counts.astype(np.int64)
        self.labels = labels

    @classmethod
    def zeros(cls, labels: tuple[ClassLabel, ...] = CLASS_ORDER) -> "ConfusionMatrix":
        return cls(np.zeros((len(labels), len(labels)), dtype=np.int64), labels)

    @classmethod
    def from_predictions(
        cls,
        actual: Iterable[ClassLabel],
        predicted: Iterable[ClassLabel],
        labels: tuple[ClassLabel, ...] = CLASS_ORDER,
    ) -> "ConfusionMatrix":
        actual, predicted = list(actual), list(predicted)
        if len(actual) != len(predicted):
            raise ShapeError(f"{len(actual)} actual labels vs {len(predicted)} predictions")
        position = {label: i for i, label in enumerate(labels)}
        counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
        for a, p in zip(actual, predicted, strict=True):
            counts[position[a], position[p]] += 1
        return cls(counts, labels)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def add(self, actual: ClassLabel, predicted: ClassLabel) -> None:
        self.counts[self.labels.index(actual), self.labels.index(predicted)] += 1

    def to_frame(self) -> pd.DataFrame:
        names = [label.display_name for label in self.labels]
        frame = pd.DataFrame(self.counts, index=names, columns=names)
        frame.index.name = "Actual \\ Predicted"
        return frame

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            self.to_frame().to_csv(path)
        except OSError as e:
            raise StorageError(f"Cannot write confusion matrix {path}: {e}") from e
        return path

    def render(self) -> str:
        """Aligned plain-text table."""
        names = [label.display_name for label in self.labels]
        width = max(len(n) for n in names) + 2
        lines = [" " * width + "".join(f"{n:>{width}}" for n in names)]
        for name, row in zip(names, self.counts, strict=True):
            lines.append(f"{name:<{width}}" + "".join(f"{int(c):>{width}}" for c in row))
        return "\n".join(lines) + "\n"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.counts, other.counts)

    def __repr__(self) -> str:
        return f"ConfusionMatrix(total={self.total}, counts={self.counts.tolist()})"


def binarize(cm: ConfusionMatrix, label: ClassLabel) -> BinaryCounts:
    """One-vs-rest TP / FN / FP / TN for ``label``; the four always sum to the total."""
    c = cm.labels.index(label)
    tp = int(cm.counts[c, c])
    fn = int(cm.counts[c, :].sum()) - tp
    fp = int(cm.counts[:, c].sum()) - tp
    return BinaryCounts(tp=tp, fn=fn, fp=fp, tn=cm.total - tp - fn - fp)


def accuracy(cm: ConfusionMatrix) -> float:
    """Multiclass accuracy: trace / total."""
    if cm.total == 0:
        raise UndefinedMetricError("Accuracy is undefined for an empty confusion matrix")
    return float(np.trace(cm.counts)) / cm.total


def binary_accuracy(counts: BinaryCounts) -> float:
    """(TP + TN) / (TP + TN + FP + FN) on one binarization."""
    if counts.total == 0:
        raise UndefinedMetricError("Accuracy is undefined for zero counts")
    return (counts.tp + counts.tn) / counts.total


def _ratio(numerator: int, denominator: int) -> Rate:
    if denominator == 0:
        return Rate(0.0, degenerate=True)
    return Rate(numerator / denominator)


def recall(tp: int, fn: int) -> Rate:
    return _ratio(tp, tp + fn)


def precision(tp: int, fp: int) -> Rate:
    return _ratio(tp, tp + fp)


def f_measure(precision_value: float, recall_value: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    p, r = float(precision_value), float(recall_value)
    if p + r == 0.0:
        return 0.0
    return 2.0 * r * p / (r + p)
