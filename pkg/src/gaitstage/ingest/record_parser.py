"""
Parser for gait record text files.

Each line holds 19 whitespace- or tab-separated numbers: timestamp (s), eight
left-foot sensors, eight right-foot sensors, total left force, total right
force (all in newtons). File names follow ``<Group><Pt|Co><NN>_<MM>.txt``,
e.g. ``GaPt03_01.txt`` is walking group Ga, patient 03, trial 01.
"""

import io
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, TextIO

import numpy as np
import pandas as pd

from ..errors import DataFormatError
from .schema import RECORD_COLUMNS, Cohort, GrfRecord, WalkGroup

logger = logging.getLogger(__name__)

# Read width; lines up to this many fields get an exact column-count error
MAX_FIELDS = 2 * RECORD_COLUMNS

FILENAME_PATTERN = re.compile(
    r"^(?P<group>Ga|Ju|Si)(?P<cohort>Pt|Co)(?P<subject>\d+)_(?P<trial>\d+)\.txt$",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class RecordMetadata:
    """Identity of a record, from its file name or a manifest entry."""

    subject_id: str
    group: WalkGroup
    cohort: Cohort
    trial: int


def parse_filename(name: str) -> RecordMetadata | None:
    """
    Decode the file-name convention.

    Args:
        name: File name (directories are ignored)

    Returns:
        RecordMetadata, or None if the name does not follow the convention
    """
    match = FILENAME_PATTERN.match(Path(name).name)
    if not match:
        return None

    group = WalkGroup(match["group"].capitalize())
    cohort_code = match["cohort"].capitalize()
    subject_id = f"{group.value}{cohort_code}{match['subject']}"
    return RecordMetadata(
        subject_id=subject_id,
        group=group,
        cohort=Cohort.parse(cohort_code),
        trial=int(match["trial"]),
    )


def infer_sample_rate(timestamps: np.ndarray) -> float:
    """Frames per second from the median timestamp delta."""
    if timestamps.size < 2:
        raise DataFormatError("At least two frames are needed to infer the sample rate")
    median_delta = float(np.median(np.diff(timestamps)))
    return round(1.0 / median_delta, 6)


def _read_text(text: str | bytes | TextIO | BinaryIO) -> str:
    if isinstance(text, bytes):
        return text.decode("utf-8", errors="replace")
    if isinstance(text, str):
        return text
    content = text.read()
    if isinstance(content, bytes):
        return content.decode("utf-8", errors="replace")
    return content


def _read_table(text: str, name: str) -> np.ndarray:
    """
    Read the whitespace-separated table into a float64 (frames, 19) array.

    Blank lines are skipped. Errors name the 1-based line of the file.
    """
    try:
        raw = pd.read_csv(
            io.StringIO(text),
            sep=r"\s+",
            header=None,
            names=list(range(MAX_FIELDS)),
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
        )
    except pd.errors.EmptyDataError:
        return np.empty((0, RECORD_COLUMNS), dtype=np.float64)
    except pd.errors.ParserError as e:
        raise DataFormatError(f"{name}: more than {MAX_FIELDS} columns on a line: {e}") from e

    # Row i is line i + 1; missing trailing fields come back empty
    present = (raw.notna() & raw.ne("")).sum(axis=1).to_numpy()
    wrong = (present > 0) & (present != RECORD_COLUMNS)
    if wrong.any():
        row = int(np.argmax(wrong))
        raise DataFormatError(
            f"{name}: line {row + 1} has {present[row]} columns, expected {RECORD_COLUMNS}"
        )

    if not np.any(present > 0):
        return np.empty((0, RECORD_COLUMNS), dtype=np.float64)
    raw = raw.loc[present > 0, list(range(RECORD_COLUMNS))]
    values = raw.apply(pd.to_numeric, errors="coerce")
    literal_nan = raw.apply(lambda col: col.str.lower().str.lstrip("+-").eq("nan"))
    bad = (values.isna() & ~literal_nan).to_numpy()
    if bad.any():
        row, col = (int(v) for v in np.argwhere(bad)[0])
        raise DataFormatError(
            f"{name}: line {raw.index[row] + 1} is not numeric: {raw.iat[row, col]!r}"
        )
    return values.to_numpy(dtype=np.float64)


def parse_record(
    text: str | bytes | TextIO | BinaryIO,
    name: str,
    metadata: RecordMetadata | None = None,
) -> GrfRecord:
    """
    Parse one record file.

    Args:
        text: File content (bytes, str or a readable stream)
        name: File name; decoded for group / cohort / subject / trial
        metadata: Explicit identity, required when the name does not follow
            the convention (e.g. from a manifest)

    Returns:
        GrfRecord with every frame and the inferred sample rate

    Raises:
        DataFormatError: wrong column count (naming the line), unparseable
            numbers, non-increasing timestamps, negative or non-finite forces,
            or an unparseable file name without metadata
    """
    meta = metadata or parse_filename(name)
    if meta is None:
        raise DataFormatError(
            f"{name}: file name does not follow <Group><Pt|Co><NN>_<MM>.txt; "
            f"an explicit manifest entry is required"
        )

    frames = _read_table(_read_text(text), name)
    if frames.shape[0] < 2:
        raise DataFormatError(f"{name}: expected at least 2 frames, found {frames.shape[0]}")

    if not np.all(np.isfinite(frames)):
        bad = int(np.argwhere(~np.isfinite(frames))[0, 0]) + 1
        raise DataFormatError(f"{name}: non-finite value at data row {bad}")

    deltas = np.diff(frames[:, 0])
    if np.any(deltas <= 0):
        bad = int(np.argmax(deltas <= 0)) + 2
        raise DataFormatError(f"{name}: timestamps not strictly increasing at data row {bad}")

    if np.any(frames[:, 1:] < 0):
        bad = int(np.argwhere(frames[:, 1:] < 0)[0, 0]) + 1
        raise DataFormatError(f"{name}: negative force at data row {bad}")

    sample_rate = infer_sample_rate(frames[:, 0])
    logger.debug(f"Parsed {name}: {frames.shape[0]} frames at {sample_rate} Hz")

    return GrfRecord(
        subject_id=meta.subject_id,
        group=meta.group,
        cohort=meta.cohort,
        trial=meta.trial,
        frames=frames,
        sample_rate=sample_rate,
        source=Path(name).name,
    )


def read_record(path: str | Path, metadata: RecordMetadata | None = None) -> GrfRecord:
    """Parse a record file from disk."""
    path = Path(path)
    with path.open("rb") as handle:
        return parse_record(handle, path.name, metadata)
