"""
Unit tests for confusion matrices and the performance report.

Tests cover:
- Matrix construction, validation and bookkeeping
- One-vs-rest binarization
- Accuracy, precision, recall and F1-measure arithmetic
- Degenerate denominators
- Report values against a brute-force computation
- Text and CSV output
"""

import numpy as np
import pandas as pd
import pytest

from gaitstage.errors import ShapeError, UndefinedMetricError
from gaitstage.ingest import CLASS_ORDER, ClassLabel
from gaitstage.metrics import (
    REPORT_COLUMNS,
    BinaryCounts,
    ConfusionMatrix,
    accuracy,
    binarize,
    binary_accuracy,
    f_measure,
    precision,
    recall,
    report,
)


# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture
def cm():
    """Rows actual, columns predicted."""
    return ConfusionMatrix(
        np.array(
            [
                [50, 2, 0, 0],
                [3, 40, 5, 0],
                [0, 4, 30, 6],
                [0, 0, 1, 20],
            ]
        )
    )


def brute_force(counts: np.ndarray, c: int) -> tuple[float, float, float]:
    """Per-pair loop over the matrix, independent of binarize."""
    tp = fn = fp = 0
    n = counts.shape[0]
    for i in range(n):
        for j in range(n):
            if i == c and j == c:
                tp += counts[i, j]
            elif i == c:
                fn += counts[i, j]
            elif j == c:
                fp += counts[i, j]
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


# =============================================================================
# CONFUSION MATRIX
# =============================================================================


class TestConfusionMatrix:
    """Tests for ConfusionMatrix and binarize."""

    def test_from_predictions(self):
        """Rows count actual classes, columns predicted classes."""
        actual = [ClassLabel.HEALTHY, ClassLabel.PD2, ClassLabel.PD2, ClassLabel.PD3]
        predicted = [ClassLabel.HEALTHY, ClassLabel.PD3, ClassLabel.PD2, ClassLabel.PD3]
        cm = ConfusionMatrix.from_predictions(actual, predicted)
        assert cm.total == 4
        assert cm.counts[ClassLabel.PD2.index, ClassLabel.PD3.index] == 1
        assert cm.counts.sum(axis=1).tolist() == [1, 2, 0, 1]

    def test_add(self):
        """add increments one cell."""
        cm = ConfusionMatrix.zeros()
        cm.add(ClassLabel.PD2_5, ClassLabel.PD2)
        assert cm.counts[2, 1] == 1
        assert cm.total == 1

    @pytest.mark.parametrize(
        "counts", [np.zeros((3, 3)), np.full((4, 4), -1), np.full((4, 4), 0.5)]
    )
    def test_invalid_counts(self, counts):
        """Wrong shapes, negative and fractional counts are rejected."""
        with pytest.raises(ShapeError):
            ConfusionMatrix(counts)

    def test_length_mismatch(self):
        """Actual and predicted sequences must align."""
        with pytest.raises(ShapeError):
            ConfusionMatrix.from_predictions([ClassLabel.PD2], [])

    def test_binarize_invariants(self, cm):
        """TP + FN is the row sum, TP + FP the column sum, and the four sum to the total."""
        for label in CLASS_ORDER:
            counts = binarize(cm, label)
            c = label.index
            assert counts.tp + counts.fn == cm.counts[c].sum()
            assert counts.tp + counts.fp == cm.counts[:, c].sum()
            assert counts.total == cm.total
        assert sum(binarize(cm, label).tp for label in CLASS_ORDER) == np.trace(cm.counts)

    def test_frame_and_csv(self, tmp_path, cm):
        """The CSV is labeled with display names."""
        path = cm.to_csv(tmp_path / "cm.csv")
        frame = pd.read_csv(path, index_col=0)
        assert list(frame.columns) == [label.display_name for label in CLASS_ORDER]
        assert frame.loc["PD stage 2", "PD stage 2.5"] == 5

    def test_render(self, cm):
        """The text table has a header and one line per class."""
        lines = cm.render().splitlines()
        assert len(lines) == 5
        assert lines[1].startswith("Healthy person")


# =============================================================================
# RATES
# =============================================================================


class TestRates:
    """Tests for accuracy, recall, precision and f_measure."""

    def test_binary_accuracy(self):
        """(TP + TN) / total on a binarization."""
        assert binary_accuracy(BinaryCounts(tp=50, fn=5, fp=5, tn=40)) == pytest.approx(0.90)

    def test_diagonal_accuracy(self):
        """A diagonal matrix is perfectly accurate."""
        assert accuracy(ConfusionMatrix(np.diag([3, 4, 5, 6]))) == 1.0

    def test_accuracy_is_trace_over_total(self, cm):
        """Multiclass accuracy equals the mean per-window correctness."""
        actual, predicted = [], []
        for i, row in enumerate(cm.counts):
            for j, n in enumerate(row):
                actual += [i] * int(n)
                predicted += [j] * int(n)
        direct = np.mean(np.array(actual) == np.array(predicted))
        assert accuracy(cm) == pytest.approx(direct, abs=1e-12)

    def test_empty_accuracy(self):
        """Accuracy of an empty matrix is undefined."""
        with pytest.raises(UndefinedMetricError):
            accuracy(ConfusionMatrix.zeros())

    def test_recall(self):
        """TP / (TP + FN); no false negatives means perfect recall."""
        assert recall(97, 3).value == pytest.approx(0.97)
        assert recall(5, 0).value == 1.0
        assert not recall(5, 0).degenerate

    def test_degenerate_precision(self):
        """A zero denominator gives 0 with the degenerate flag."""
        rate = precision(0, 0)
        assert rate.value == 0.0
        assert rate.degenerate
        assert float(rate) == 0.0

    def test_f_measure(self):
        """Harmonic mean, symmetric, bounded by the larger input."""
        assert f_measure(0.93, 0.97) == pytest.approx(0.9496, abs=1e-4)
        assert f_measure(0.6, 0.6) == pytest.approx(0.6)
        assert f_measure(0.0, 0.0) == 0.0
        for p, r in [(0.1, 0.9), (0.5, 0.7), (1.0, 0.2)]:
            assert f_measure(p, r) <= max(p, r)


# =============================================================================
# REPORT
# =============================================================================


class TestReport:
    """Tests for report and ClassReport."""

    def test_identity(self):
        """Perfect predictions report 1.0 everywhere."""
        result = report(ConfusionMatrix(np.diag([5, 5, 5, 5])))
        assert result.overall_accuracy == 1.0
        for row in result.rows:
            assert (row.precision, row.recall, row.f1) == (1.0, 1.0, 1.0)

    def test_matches_brute_force(self):
        """Report values match a per-pair loop on 1000 random matrices."""
        rng = np.random.default_rng(2)
        for _ in range(1000):
            counts = rng.integers(0, 20, size=(4, 4))
            counts[0, 0] += 1
            result = report(ConfusionMatrix(counts))
            for row in result.rows:
                p, r, f = brute_force(counts, row.label.index)
                assert row.precision == pytest.approx(p, abs=1e-12)
                assert row.recall == pytest.approx(r, abs=1e-12)
                assert row.f1 == pytest.approx(f, abs=1e-12)
            assert result.overall_accuracy == pytest.approx(
                np.trace(counts) / counts.sum(), abs=1e-12
            )

    def test_permuting_classes_permutes_rows(self, cm):
        """Reordering the classes reorders the rows without changing values."""
        order = [3, 1, 0, 2]
        labels = tuple(CLASS_ORDER[i] for i in order)
        permuted = ConfusionMatrix(cm.counts[np.ix_(order, order)], labels)
        base = {row.label: row for row in report(cm).rows}
        for row in report(permuted).rows:
            assert row == base[row.label]

    def test_degenerate_row(self):
        """A class never predicted nor present is flagged with zeros."""
        result = report(ConfusionMatrix(np.diag([4, 4, 4, 0])))
        last = result.rows[-1]
        assert last.degenerate
        assert (last.precision, last.recall, last.f1) == (0.0, 0.0, 0.0)
        assert "*" in result.render()

    def test_values_in_unit_interval(self, cm):
        """All reported values lie in [0, 1] and F1 is 0 only without true positives."""
        result = report(cm)
        for row in result.rows:
            for value in (row.precision, row.recall, row.f1):
                assert 0.0 <= value <= 1.0
            assert row.f1 > 0.0

    def test_csv_columns(self, tmp_path, cm):
        """The CSV follows the report column order with one row per class."""
        frame = pd.read_csv(report(cm).to_csv(tmp_path / "report.csv"))
        assert list(frame.columns) == REPORT_COLUMNS
        assert list(frame["Case"]) == [label.display_name for label in CLASS_ORDER]

    def test_render(self, cm):
        """The text report shows rounded percentages under a banner."""
        text = report(cm).render()
        assert "MODEL PERFORMANCE" in text
        assert "Healthy person" in text
        assert "Windows evaluated: 161" in text

    def test_empty_report(self):
        """An empty matrix propagates the undefined-metric error."""
        with pytest.raises(UndefinedMetricError):
            report(ConfusionMatrix.zeros())
