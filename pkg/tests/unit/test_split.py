"""
Unit tests for dataset splitting and training history.

Tests cover:
- Stratified window splits and their arithmetic
- Subject-level splits without leakage
- Holdout to validation / test splitting
- Determinism in the seed
- History bookkeeping and CSV output
"""

from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from gaitstage.errors import SplitError, StateError
from gaitstage.ingest import ClassLabel, GrfWindow, LabeledDataset, Provenance
from gaitstage.optim import StopReason
from gaitstage.training import (
    HISTORY_COLUMNS,
    EpochRecord,
    SplitSpec,
    SplitStrategy,
    TrainHistory,
    split_dataset,
    split_holdout,
)


def make_dataset(counts: dict[ClassLabel, int], subjects_per_class: int = 1) -> LabeledDataset:
    """Tiny one-row windows; enough to exercise the index bookkeeping."""
    windows = []
    for label, n in counts.items():
        for i in range(n):
            windows.append(
                GrfWindow(
                    matrix=np.full((1, 18), i / max(n, 1)),
                    label=label,
                    subject_id=f"{label.value}-{i % subjects_per_class}",
                    window_index=i,
                    normalized=True,
                )
            )
    return LabeledDataset(windows=windows, provenance=Provenance("test", "digest", window_len=1))


def keys(ds: LabeledDataset) -> list[tuple[str, int]]:
    return [(w.subject_id, w.window_index) for w in ds.windows]


# =============================================================================
# BY WINDOW
# =============================================================================


class TestSplitByWindow:
    """Tests for stratified and unstratified window splits."""

    def test_floor_of_eighty_percent(self):
        """2084 windows of one class split 1667 / 417."""
        train, holdout = split_dataset(make_dataset({ClassLabel.PD2: 2084}))
        assert len(train) == 1667
        assert len(holdout) == 417

    def test_disjoint_and_exhaustive(self, small_dataset):
        """Every window lands on exactly one side."""
        train, holdout = split_dataset(small_dataset)
        assert set(keys(train)).isdisjoint(keys(holdout))
        assert sorted(keys(train) + keys(holdout)) == sorted(keys(small_dataset))

    def test_stratified_proportions(self):
        """Each class keeps its own floor(0.8 n) share."""
        counts = {ClassLabel.HEALTHY: 10, ClassLabel.PD2: 7, ClassLabel.PD2_5: 3, ClassLabel.PD3: 2}
        train, holdout = split_dataset(make_dataset(counts))
        assert train.class_counts == {
            ClassLabel.HEALTHY: 8,
            ClassLabel.PD2: 5,
            ClassLabel.PD2_5: 2,
            ClassLabel.PD3: 1,
        }
        assert sum(holdout.class_counts.values()) == 22 - 16

    def test_seeded(self, small_dataset):
        """The same seed repeats the partition; another seed changes it."""
        a, _ = split_dataset(small_dataset, SplitSpec(seed=5))
        b, _ = split_dataset(small_dataset, SplitSpec(seed=5))
        c, _ = split_dataset(small_dataset, SplitSpec(seed=6))
        assert keys(a) == keys(b)
        assert keys(a) != keys(c)

    def test_dataset_order_kept(self, small_dataset):
        """Subsets keep the original window order."""
        train, _ = split_dataset(small_dataset)
        positions = [keys(small_dataset).index(k) for k in keys(train)]
        assert positions == sorted(positions)

    def test_single_window_class(self):
        """A class with one window cannot be split."""
        dataset = make_dataset({ClassLabel.HEALTHY: 5, ClassLabel.PD3: 1})
        with pytest.raises(SplitError, match="PD3 has 1 window"):
            split_dataset(dataset)

    def test_absent_class_is_fine(self):
        """Classes with no windows are skipped."""
        train, holdout = split_dataset(make_dataset({ClassLabel.HEALTHY: 5, ClassLabel.PD2: 5}))
        assert train.class_counts[ClassLabel.PD3] == 0
        assert len(train) + len(holdout) == 10

    def test_unstratified(self, small_dataset):
        """Without stratification the whole set is split at once."""
        spec = SplitSpec(stratified=False)
        train, holdout = split_dataset(small_dataset, spec)
        assert (len(train), len(holdout)) == (25, 7)

    def test_empty(self):
        """An empty dataset cannot be split."""
        with pytest.raises(SplitError, match="empty"):
            split_dataset(make_dataset({}))

    def test_invalid_fraction(self):
        """The train fraction must lie strictly between 0 and 1."""
        with pytest.raises(ValueError):
            SplitSpec(train_fraction=1.0)


# =============================================================================
# BY SUBJECT
# =============================================================================


class TestSplitBySubject:
    """Tests for subject-level splits."""

    def test_no_subject_on_both_sides(self, small_dataset):
        """Train and holdout subjects never overlap."""
        train, holdout = split_dataset(small_dataset, SplitSpec(strategy=SplitStrategy.BY_SUBJECT))
        assert set(train.subjects).isdisjoint(holdout.subjects)
        assert len(train) + len(holdout) == len(small_dataset)

    def test_fraction_is_approximated(self, small_dataset):
        """Four two-window subjects per class split three to one."""
        train, holdout = split_dataset(small_dataset, SplitSpec(strategy="by_subject"))
        assert len(train) == 24
        assert len(holdout) == 8
        assert all(n == 2 for n in holdout.class_counts.values())

    def test_single_subject_class(self):
        """A class with one subject cannot be split by subject."""
        dataset = make_dataset({ClassLabel.HEALTHY: 4, ClassLabel.PD2: 4}, subjects_per_class=1)
        with pytest.raises(SplitError, match="subject"):
            split_dataset(dataset, SplitSpec(strategy=SplitStrategy.BY_SUBJECT))


# =============================================================================
# HOLDOUT
# =============================================================================


class TestSplitHoldout:
    """Tests for split_holdout."""

    def test_halves_per_class(self, small_dataset):
        """Two holdout windows per class give one validation and one test window."""
        _, holdout = split_dataset(small_dataset)
        validation, test = split_holdout(holdout)
        assert all(n == 1 for n in validation.class_counts.values())
        assert all(n == 1 for n in test.class_counts.values())
        assert set(keys(validation)).isdisjoint(keys(test))

    def test_too_small(self):
        """Single-window classes go to validation, leaving no test set."""
        holdout = make_dataset({ClassLabel.HEALTHY: 1, ClassLabel.PD2: 1})
        with pytest.raises(SplitError, match="too small"):
            split_holdout(holdout)


# =============================================================================
# HISTORY
# =============================================================================


def record(epoch: int, val_loss: float = 0.5) -> EpochRecord:
    return EpochRecord(
        epoch=epoch,
        train_loss=0.4,
        train_accuracy=0.8,
        val_loss=val_loss,
        val_accuracy=0.75,
        learning_rate=1e-3,
        wall_seconds=1.25,
    )


class TestTrainHistory:
    """Tests for TrainHistory and EpochRecord."""

    def test_contiguous_epochs(self):
        """Epochs must be appended in order starting at 1."""
        history = TrainHistory()
        history.append(record(1))
        with pytest.raises(StateError):
            history.append(record(3))

    def test_csv(self, tmp_path):
        """The CSV holds one row per epoch in the fixed column order."""
        history = TrainHistory()
        for epoch, loss in enumerate([0.9, 0.7, 0.8], start=1):
            history.append(record(epoch, loss))
        path = history.to_csv(tmp_path / "history.csv")
        frame = pd.read_csv(path)
        assert list(frame.columns) == HISTORY_COLUMNS
        assert list(frame["epoch"]) == [1, 2, 3]
        assert TrainHistory.from_frame(frame, "plateau").val_losses == [0.9, 0.7, 0.8]
        assert TrainHistory.from_frame(frame, "plateau").stop_reason is StopReason.PLATEAU

    def test_csv_ignores_wall_clock(self, tmp_path):
        """Histories differing only in wall time write identical bytes."""
        fast, slow = TrainHistory(), TrainHistory()
        for epoch in (1, 2):
            fast.append(record(epoch))
            slow.append(replace(record(epoch), wall_seconds=40.0 * epoch))
        a = fast.to_csv(tmp_path / "a.csv").read_bytes()
        b = slow.to_csv(tmp_path / "b.csv").read_bytes()
        assert a == b
        assert b"wall_seconds" not in a

    def test_invalid_record(self):
        """Accuracies outside [0, 1] are rejected."""
        with pytest.raises(ValueError):
            EpochRecord(1, 0.1, 1.5, 0.1, 0.5, 1e-3, 0.0)
