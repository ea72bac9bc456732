"""
Per-class performance report: precision, recall, F1-measure and the overall
accuracy, one row per class.
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import pandas as pd

from ..errors import StorageError
from ..ingest.schema import ClassLabel
from .confusion import ConfusionMatrix, accuracy, binarize, f_measure, precision, recall

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["Case", "Precision", "Recall", "F1-measure", "Overall accuracy"]


@dataclass(frozen=True)
class ClassMetrics:
    label: ClassLabel
    precision: float
    recall: float
    f1: float
    support: int
    degenerate: bool = False


@dataclass(frozen=True)
class ClassReport:
    """Metrics for every class plus the multiclass accuracy."""

    rows: list[ClassMetrics]
    overall_accuracy: float
    total: int

    def to_frame(self) -> pd.DataFrame:
        """Rows in class order; the overall accuracy is repeated on every row."""
        records = [
            {
                "Case": row.label.display_name,
                "Precision": row.precision,
                "Recall": row.recall,
                "F1-measure": row.f1,
                "Overall accuracy": self.overall_accuracy,
            }
            for row in self.rows
        ]
        return pd.DataFrame(records, columns=REPORT_COLUMNS)

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            self.to_frame().to_csv(path, index=False, float_format="%.6f")
        except OSError as e:
            raise StorageError(f"Cannot write report {path}: {e}") from e
        return path

    def render(self) -> str:
        """Aligned text table with percentages rounded to whole numbers."""
        width = max(len(c) for c in REPORT_COLUMNS) + 2
        case_width = max(len(r.label.display_name) for r in self.rows) + 2
        rule = case_width + width * 4
        header = "".join(f"{c:>{width}}" for c in REPORT_COLUMNS[1:])
        lines = ["=" * rule, "MODEL PERFORMANCE", "=" * rule]
        lines.append(f"{'Case':<{case_width}}" + header)
        lines.append("-" * rule)
        for row in self.rows:
            cells = [row.precision, row.recall, row.f1, self.overall_accuracy]
            marker = " *" if row.degenerate else ""
            lines.append(
                f"{row.label.display_name:<{case_width}}"
                + "".join(f"{round(100 * v):>{width - 1}}%" for v in cells)
                + marker
            )
        lines.append("-" * rule)
        lines.append(f"Windows evaluated: {self.total}")
        if any(row.degenerate for row in self.rows):
            lines.append("* zero denominator in precision or recall (reported as 0)")
        return "\n".join(lines) + "\n"


def report(cm: ConfusionMatrix) -> ClassReport:
    """
    Build the per-class report.

    Raises:
        UndefinedMetricError: the matrix is empty
    """
    overall = accuracy(cm)
    rows = []
    for label in cm.labels:
        counts = binarize(cm, label)
        p = precision(counts.tp, counts.fp)
        r = recall(counts.tp, counts.fn)
        rows.append(
            ClassMetrics(
                label=label,
                precision=p.value,
                recall=r.value,
                f1=f_measure(p.value, r.value),
                support=counts.tp + counts.fn,
                degenerate=p.degenerate or r.degenerate,
            )
        )
    logger.debug(f"Report over {cm.total} windows: accuracy {overall:.4f}")
    return ClassReport(rows=rows, overall_accuracy=overall, total=cm.total)
