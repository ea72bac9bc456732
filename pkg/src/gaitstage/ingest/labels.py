"""
Class labels from subject demographics.

The demographics CSV has the header ``subject_id, group, cohort, hoehn_yahr``.
Controls are Healthy; patients map to PD2 / PD2_5 / PD3 by Hoehn & Yahr score.
A JSON manifest can supply identities (and optional label overrides) for
files that do not follow the file-name convention.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import pandas as pd

from ..errors import DataFormatError, LabelError, StorageError, UnsupportedStageError
from .record_parser import RecordMetadata
from .schema import ClassLabel, Cohort, GrfRecord, WalkGroup

logger = logging.getLogger(__name__)

DEMOGRAPHICS_COLUMNS = ("subject_id", "group", "cohort", "hoehn_yahr")

STAGE_LABELS = {
    2.0: ClassLabel.PD2,
    2.5: ClassLabel.PD2_5,
    3.0: ClassLabel.PD3,
}


@dataclass(frozen=True)
class SubjectInfo:
    """Demographics row for one subject."""

    subject_id: str
    group: WalkGroup
    cohort: Cohort
    hoehn_yahr: float | None = None


Demographics = dict[tuple[str, WalkGroup], SubjectInfo]


@dataclass(frozen=True)
class ManifestEntry:
    """Explicit identity for one record file."""

    metadata: RecordMetadata
    label: ClassLabel | None = None


def stage_label(cohort: Cohort, hoehn_yahr: float | None) -> ClassLabel:
    """
    Class for a (cohort, Hoehn & Yahr score) pair.

    Raises:
        UnsupportedStageError: patient without a score or with a score outside {2, 2.5, 3}
    """
    if cohort is Cohort.CONTROL:
        return ClassLabel.HEALTHY
    if hoehn_yahr is None or hoehn_yahr not in STAGE_LABELS:
        raise UnsupportedStageError(
            f"unsupported stage: Hoehn & Yahr score {hoehn_yahr} (supported: 2, 2.5, 3)"
        )
    return STAGE_LABELS[hoehn_yahr]


def label_record(record: GrfRecord, demographics: Demographics) -> ClassLabel:
    """
    Class label for a record.

    Args:
        record: Parsed record
        demographics: Table keyed by (subject_id, group)

    Returns:
        ClassLabel of the record's subject

    Raises:
        LabelError: subject missing from the table
        UnsupportedStageError: patient score outside {2, 2.5, 3}
    """
    info = demographics.get((record.subject_id, record.group))
    if info is None:
        raise LabelError(
            f"{record.source or record.subject_id}: subject {record.subject_id} "
            f"({record.group.value}) missing from demographics"
        )
    try:
        return stage_label(info.cohort, info.hoehn_yahr)
    except UnsupportedStageError as e:
        raise UnsupportedStageError(f"{record.subject_id}: {e}") from e


def _parse_score(value: Any) -> float | None:
    if value is None:
        return None
    if isinstance(value, str):
        value = value.strip()
        if not value:
            return None
    score = float(value)
    return None if math.isnan(score) else score


def load_demographics(path: str | Path) -> Demographics:
    """
    Load the demographics CSV.

    Raises:
        StorageError: file cannot be read
        DataFormatError: missing columns or unparseable values
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except OSError as e:
        raise StorageError(f"Cannot read demographics {path}: {e}") from e

    frame.columns = [str(c).strip().lower() for c in frame.columns]
    missing = [c for c in DEMOGRAPHICS_COLUMNS if c not in frame.columns]
    if missing:
        raise DataFormatError(f"{path.name}: missing demographics columns {missing}")

    table: Demographics = {}
    for row_no, row in enumerate(frame.itertuples(index=False), start=2):
        try:
            info = SubjectInfo(
                subject_id=str(row.subject_id).strip(),
                group=WalkGroup(str(row.group).strip().capitalize()),
                cohort=Cohort.parse(str(row.cohort)),
                hoehn_yahr=_parse_score(row.hoehn_yahr),
            )
        except ValueError as e:
            raise DataFormatError(f"{path.name}: line {row_no}: {e}") from e
        table[(info.subject_id, info.group)] = info

    logger.info(f"Loaded demographics for {len(table)} subjects from {path.name}")
    return table


def load_manifest(path: str | Path) -> dict[str, ManifestEntry]:
    """
    Load a JSON manifest keyed by file name.

    Example:
        {"walk_a.txt": {"subject_id": "X01", "group": "Ga", "cohort": "patient",
                        "trial": 1, "label": "PD2"}}
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise StorageError(f"Cannot read manifest {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise DataFormatError(f"{path.name}: invalid JSON: {e}") from e

    if not isinstance(raw, dict):
        raise DataFormatError(f"{path.name}: manifest must be a JSON object keyed by file name")

    entries: dict[str, ManifestEntry] = {}
    for filename, item in raw.items():
        try:
            metadata = RecordMetadata(
                subject_id=str(item["subject_id"]),
                group=WalkGroup(str(item["group"]).capitalize()),
                cohort=Cohort.parse(str(item["cohort"])),
                trial=int(item.get("trial", 1)),
            )
            label = ClassLabel(item["label"]) if item.get("label") else None
        except (KeyError, TypeError, ValueError) as e:
            raise DataFormatError(f"{path.name}: bad entry for {filename}: {e}") from e
        entries[filename] = ManifestEntry(metadata=metadata, label=label)

    logger.info(f"Loaded manifest with {len(entries)} entries from {path.name}")
    return entries
