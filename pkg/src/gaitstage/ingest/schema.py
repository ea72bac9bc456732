"""
Data structures for gait records, windows and labeled datasets.

A record is one walking trial from the gait corpus: 19 columns per frame
(timestamp, eight left-foot sensors, eight right-foot sensors, total left,
total right). Windows are 500 x 18 slices of a record with the timestamp
column dropped.
"""

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from ..errors import DataFormatError, ShapeError
from ..tensor import Tensor

RECORD_COLUMNS = 19
WINDOW_COLUMNS = RECORD_COLUMNS - 1
DEFAULT_WINDOW_LEN = 500
NOMINAL_SAMPLE_RATE = 100.0


class WalkGroup(str, Enum):
    """Walking protocol the record was captured under."""

    GA = "Ga"  # dual tasking
    JU = "Ju"  # rhythmic auditory stimulation
    SI = "Si"  # treadmill walking


class Cohort(str, Enum):
    """Study cohort."""

    PATIENT = "patient"
    CONTROL = "control"

    @classmethod
    def parse(cls, value: str) -> "Cohort":
        """Accept 'patient' / 'control' as well as the file-name codes 'Pt' / 'Co'."""
        normalized = value.strip().lower()
        aliases = {"pt": cls.PATIENT, "pd": cls.PATIENT, "co": cls.CONTROL}
        if normalized in aliases:
            return aliases[normalized]
        return cls(normalized)


class ClassLabel(str, Enum):
    """Severity classes, in one-hot order."""

    HEALTHY = "Healthy"
    PD2 = "PD2"
    PD2_5 = "PD2_5"
    PD3 = "PD3"

    @property
    def index(self) -> int:
        """Position in the one-hot encoding."""
        return CLASS_ORDER.index(self)

    @property
    def display_name(self) -> str:
        """Human-readable row label used in reports."""
        return CLASS_DISPLAY_NAMES[self]

    def one_hot(self) -> Tensor:
        """One-hot vector of length 4."""
        vector = np.zeros(len(CLASS_ORDER), dtype=np.float64)
        vector[self.index] = 1.0
        return vector

    @classmethod
    def from_index(cls, index: int) -> "ClassLabel":
        """Class at a one-hot position."""
        return CLASS_ORDER[index]


CLASS_ORDER: tuple[ClassLabel, ...] = (
    ClassLabel.HEALTHY,
    ClassLabel.PD2,
    ClassLabel.PD2_5,
    ClassLabel.PD3,
)

CLASS_DISPLAY_NAMES = {
    ClassLabel.HEALTHY: "Healthy person",
    ClassLabel.PD2: "PD stage 2",
    ClassLabel.PD2_5: "PD stage 2.5",
    ClassLabel.PD3: "PD stage 3",
}


@dataclass(frozen=True)
class GrfRecord:
    """One parsed walking trial."""

    subject_id: str  # e.g. "GaPt03"
    group: WalkGroup
    cohort: Cohort
    trial: int
    frames: Tensor  # (T, 19)
    sample_rate: float  # frames per second
    source: str = ""  # file name the record was read from

    @property
    def n_frames(self) -> int:
        """Number of frames T."""
        return int(self.frames.shape[0])

    @property
    def timestamps(self) -> Tensor:
        """Column 0, seconds."""
        return self.frames[:, 0]

    @property
    def forces(self) -> Tensor:
        """Columns 1-18, newtons."""
        return self.frames[:, 1:]


@dataclass(frozen=True)
class GrfWindow:
    """One 500 x 18 labeled sample cut from a record."""

    matrix: Tensor  # (window_len, 18)
    label: ClassLabel
    subject_id: str
    window_index: int
    normalized: bool = False
    source: str = ""

    def __post_init__(self) -> None:
        if self.matrix.ndim != 2 or self.matrix.shape[1] != WINDOW_COLUMNS:
            raise ShapeError(
                f"Window matrix must have shape (n, {WINDOW_COLUMNS}), got {self.matrix.shape}"
            )
        if self.window_index < 0:
            raise ValueError(f"window_index must be >= 0, got {self.window_index}")

    def to_dict(self) -> dict[str, Any]:
        """Metadata without the matrix, for container headers."""
        return {
            "label": self.label.value,
            "subject_id": self.subject_id,
            "window_index": self.window_index,
            "normalized": self.normalized,
            "source": self.source,
        }


@dataclass(frozen=True)
class Provenance:
    """Where a dataset came from."""

    source_dir: str
    manifest_digest: str  # sha256 over input file digests
    window_len: int = DEFAULT_WINDOW_LEN
    overlap: int = 0

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "source_dir": self.source_dir,
            "manifest_digest": self.manifest_digest,
            "window_len": self.window_len,
            "overlap": self.overlap,
        }


@dataclass
class LabeledDataset:
    """Ordered collection of normalized windows with per-class counts."""

    windows: list[GrfWindow]
    provenance: Provenance
    class_counts: dict[ClassLabel, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for window in self.windows:
            if not window.normalized:
                raise DataFormatError(
                    f"Window {window.source}#{window.window_index} is not normalized"
                )
        self.class_counts = count_classes(self.windows)

    def __len__(self) -> int:
        return len(self.windows)

    @property
    def subjects(self) -> list[str]:
        """Distinct subject ids in first-seen order."""
        return list(dict.fromkeys(w.subject_id for w in self.windows))

    def subset(self, indices: list[int]) -> "LabeledDataset":
        """New dataset holding the windows at the given positions, in the given order."""
        return LabeledDataset(
            windows=[self.windows[i] for i in indices], provenance=self.provenance
        )

    def stacked(self) -> tuple[Tensor, np.ndarray]:
        """(N, h, w) matrices and the (N,) label indices."""
        matrices = np.stack([w.matrix for w in self.windows]).astype(np.float64)
        labels = np.array([w.label.index for w in self.windows], dtype=np.int64)
        return matrices, labels


def count_classes(windows: list[GrfWindow]) -> dict[ClassLabel, int]:
    """Per-class window counts, every class present (zero if absent)."""
    counts = Counter(w.label for w in windows)
    return {label: counts.get(label, 0) for label in CLASS_ORDER}
