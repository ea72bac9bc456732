"""
Train / holdout partitioning.

Two strategies:
    by_window   windows are split independently (per class when stratified);
                windows of one subject may land on both sides
    by_subject  whole subjects are assigned to one side, approximating the
                requested window fraction greedily
Both are deterministic in the seed and return index-ordered subsets.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import SplitError
from ..ingest.schema import CLASS_ORDER, ClassLabel, LabeledDataset

logger = logging.getLogger(__name__)


class SplitStrategy(str, Enum):
    BY_WINDOW = "by_window"
    BY_SUBJECT = "by_subject"


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    strategy: SplitStrategy = SplitStrategy.BY_WINDOW
    stratified: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        object.__setattr__(self, "strategy", SplitStrategy(self.strategy))


def _window_indices_by_class(ds: LabeledDataset) -> dict[ClassLabel, list[int]]:
    by_class: dict[ClassLabel, list[int]] = defaultdict(list)
    for i, window in enumerate(ds.windows):
        by_class[window.label].append(i)
    return by_class


def _split_windows(ds: LabeledDataset, spec: SplitSpec) -> tuple[list[int], list[int]]:
    rng = np.random.default_rng(spec.seed)
    if spec.stratified:
        groups = _window_indices_by_class(ds)
        pools = [(label.value, groups[label]) for label in CLASS_ORDER if groups.get(label)]
    else:
        pools = [("all", list(range(len(ds))))]

    train: list[int] = []
    holdout: list[int] = []
    for name, indices in pools:
        if len(indices) < 2:
            raise SplitError(f"Class {name} has {len(indices)} window(s); at least 2 are needed")
        shuffled = rng.permutation(indices)
        n_train = math.floor(spec.train_fraction * len(indices))
        n_train = min(max(n_train, 1), len(indices) - 1)
        train.extend(int(i) for i in shuffled[:n_train])
        holdout.extend(int(i) for i in shuffled[n_train:])
    return sorted(train), sorted(holdout)


def _assign_subjects(
    name: str, subjects: list[str], sizes: dict[str, int], fraction: float, rng: np.random.Generator
) -> tuple[set[str], set[str]]:
    if len(subjects) < 2:
        raise SplitError(f"Class {name} has {len(subjects)} subject(s); at least 2 are needed")
    order = [subjects[i] for i in rng.permutation(len(subjects))]
    target = fraction * sum(sizes[s] for s in order)

    train: list[str] = []
    holdout: list[str] = []
    n_train = 0
    for subject in order:
        if abs(n_train + sizes[subject] - target) < abs(n_train - target):
            train.append(subject)
            n_train += sizes[subject]
        else:
            holdout.append(subject)
    if not train:
        train.append(holdout.pop(0))
    if not holdout:
        holdout.append(train.pop())
    return set(train), set(holdout)


def _split_subjects(ds: LabeledDataset, spec: SplitSpec) -> tuple[list[int], list[int]]:
    rng = np.random.default_rng(spec.seed)
    sizes: dict[str, int] = defaultdict(int)
    subject_class: dict[str, ClassLabel] = {}
    for window in ds.windows:
        sizes[window.subject_id] += 1
        subject_class.setdefault(window.subject_id, window.label)

    if spec.stratified:
        pools = [
            (label.value, [s for s in ds.subjects if subject_class[s] is label])
            for label in CLASS_ORDER
        ]
        pools = [(name, subjects) for name, subjects in pools if subjects]
    else:
        pools = [("all", ds.subjects)]

    train_subjects: set[str] = set()
    for name, subjects in pools:
        train, _ = _assign_subjects(name, subjects, sizes, spec.train_fraction, rng)
        train_subjects |= train

    train_idx = [i for i, w in enumerate(ds.windows) if w.subject_id in train_subjects]
    holdout_idx = [i for i, w in enumerate(ds.windows) if w.subject_id not in train_subjects]
    return train_idx, holdout_idx


def split_dataset(
    ds: LabeledDataset, spec: SplitSpec | None = None
) -> tuple[LabeledDataset, LabeledDataset]:
    """
    Partition ``ds`` into disjoint, exhaustive train and holdout sets.

    Raises:
        SplitError: empty dataset, or a class with fewer than 2 windows
            (by_window) or subjects (by_subject)
    """
    spec = spec or SplitSpec()
    if len(ds) == 0:
        raise SplitError("Cannot split an empty dataset")

    if spec.strategy is SplitStrategy.BY_SUBJECT:
        train_idx, holdout_idx = _split_subjects(ds, spec)
    else:
        train_idx, holdout_idx = _split_windows(ds, spec)

    train, holdout = ds.subset(train_idx), ds.subset(holdout_idx)
    logger.info(
        f"Split {len(ds)} windows {spec.strategy.value} (seed={spec.seed}): "
        f"{len(train)} train / {len(holdout)} holdout"
    )
    return train, holdout


def split_holdout(
    holdout: LabeledDataset, test_fraction: float = 0.5, seed: int = 0
) -> tuple[LabeledDataset, LabeledDataset]:
    """
    Split a holdout set into validation and test, stratified by class.

    With the default train fraction this yields the 80 / 10 / 10 layout.
    Classes with a single window go to validation.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = np.random.default_rng([seed, 1])
    groups = _window_indices_by_class(holdout)
    validation: list[int] = []
    test: list[int] = []
    for label in CLASS_ORDER:
        indices = groups.get(label, [])
        shuffled = [int(i) for i in rng.permutation(indices)] if indices else []
        n_val = len(indices) - math.floor(test_fraction * len(indices))
        validation.extend(shuffled[:n_val])
        test.extend(shuffled[n_val:])
    if not test:
        raise SplitError(f"Holdout of {len(holdout)} windows is too small for a test split")
    return holdout.subset(sorted(validation)), holdout.subset(sorted(test))
