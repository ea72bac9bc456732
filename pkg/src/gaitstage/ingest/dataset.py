"""
Dataset assembly: parse -> label -> resample -> window -> normalize, per file.

Files are processed in lexicographic order of their names and windows keep
their in-record order, so the result does not depend on directory
enumeration order or on how many workers parse in parallel.
"""

import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from ..errors import EmptyDatasetError, GaitStageError, StorageError, UsageError
from .labels import Demographics, ManifestEntry, label_record, load_demographics, load_manifest
from .record_parser import FILENAME_PATTERN, read_record
from .schema import (
    CLASS_ORDER,
    DEFAULT_WINDOW_LEN,
    ClassLabel,
    Cohort,
    GrfRecord,
    GrfWindow,
    LabeledDataset,
    Provenance,
    WalkGroup,
)
from .windowing import normalize_window, resample_record, window_record

logger = logging.getLogger(__name__)

SAMPLE_ROW_NAMES = {
    ClassLabel.HEALTHY: "Healthy subjects",
    ClassLabel.PD2: "PD stage 2 subjects",
    ClassLabel.PD2_5: "PD stage 2.5 subjects",
    ClassLabel.PD3: "PD stage 3 subjects",
}

@dataclass
class FileOutcome:
    """Result of processing one record file."""

    name: str
    windows: list[GrfWindow] = field(default_factory=list)
    record: GrfRecord | None = None
    error: str | None = None


@dataclass
class DatasetBuildResult:
    """Dataset plus per-file diagnostics."""

    dataset: LabeledDataset
    records: list[GrfRecord] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)
    files_seen: int = 0

    def summary_frame(self) -> pd.DataFrame:
        """Per-class window counts."""
        return class_count_frame(self.dataset)

    def cohort_frame(self) -> pd.DataFrame:
        """Distinct subjects per walking group and cohort."""
        return cohort_summary(self.records)


def _file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _manifest_digest(paths: list[Path], demographics_path: Path) -> str:
    digest = hashlib.sha256()
    for path in [*paths, demographics_path]:
        digest.update(path.name.encode("utf-8"))
        digest.update(b"\0")
        digest.update(_file_digest(path).encode("ascii"))
        digest.update(b"\n")
    return digest.hexdigest()


def discover_record_files(
    data_dir: Path, manifest: dict[str, ManifestEntry] | None = None
) -> list[Path]:
    """Record files in ``data_dir`` (name convention or manifest), sorted by name."""
    manifest = manifest or {}
    paths = [
        p
        for p in data_dir.iterdir()
        if p.is_file() and (FILENAME_PATTERN.match(p.name) or p.name in manifest)
    ]
    return sorted(paths, key=lambda p: p.name)


def process_file(
    path: Path,
    demographics: Demographics,
    manifest: dict[str, ManifestEntry] | None = None,
    window_len: int = DEFAULT_WINDOW_LEN,
    overlap: int = 0,
) -> FileOutcome:
    """Parse, label, resample, window and normalize one file, capturing any error."""
    entry = (manifest or {}).get(path.name)
    try:
        record = read_record(path, entry.metadata if entry else None)
        label = entry.label if entry and entry.label else label_record(record, demographics)
        record = resample_record(record)
        windows = [
            normalize_window(w)
            for w in window_record(record, label, window_len=window_len, overlap=overlap)
        ]
    except (GaitStageError, ValueError, OSError) as e:
        logger.warning(f"Skipping {path.name}: {e}")
        return FileOutcome(name=path.name, error=f"{path.name}: {e}")
    return FileOutcome(name=path.name, windows=windows, record=record)


def build_dataset(
    data_dir: str | Path,
    demographics_path: str | Path,
    window_len: int = DEFAULT_WINDOW_LEN,
    overlap: int = 0,
    manifest_path: str | Path | None = None,
    workers: int = 1,
) -> DatasetBuildResult:
    """
    Build a labeled dataset from a directory of record files.

    Args:
        data_dir: Directory holding record files
        demographics_path: Demographics CSV
        window_len: Frames per window
        overlap: Frames shared by consecutive windows
        manifest_path: Optional JSON manifest for non-conventional file names
        workers: Parallel file parsers (results are merged in name order)

    Returns:
        DatasetBuildResult with the dataset and per-file errors

    Raises:
        UsageError: data directory or demographics file missing
        EmptyDatasetError: no windows were produced
    """
    data_dir = Path(data_dir)
    demographics_path = Path(demographics_path)
    if not data_dir.is_dir():
        raise UsageError(f"Data directory not found: {data_dir}")
    if not demographics_path.is_file():
        raise UsageError(f"Demographics file not found: {demographics_path}")

    demographics = load_demographics(demographics_path)
    manifest = load_manifest(manifest_path) if manifest_path else None
    paths = discover_record_files(data_dir, manifest)
    logger.info(f"Building dataset from {len(paths)} record files in {data_dir}")

    def run(path: Path) -> FileOutcome:
        return process_file(path, demographics, manifest, window_len, overlap)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, paths))
    else:
        outcomes = [run(p) for p in paths]

    windows: list[GrfWindow] = []
    records: list[GrfRecord] = []
    errors: list[str] = []
    for outcome in sorted(outcomes, key=lambda o: o.name):
        if outcome.error:
            errors.append(outcome.error)
            continue
        windows.extend(outcome.windows)
        if outcome.record is not None:
            records.append(outcome.record)

    if not windows:
        raise EmptyDatasetError(
            f"zero windows produced from {len(paths)} files in {data_dir}"
            + (f" ({len(errors)} files failed)" if errors else "")
        )

    try:
        digest = _manifest_digest(paths, demographics_path)
    except OSError as e:
        raise StorageError(f"Cannot hash inputs: {e}") from e

    provenance = Provenance(
        source_dir=data_dir.name,
        manifest_digest=digest,
        window_len=window_len,
        overlap=overlap,
    )
    dataset = LabeledDataset(windows=windows, provenance=provenance)
    logger.info(
        f"Built dataset: {len(dataset)} windows from {len(records)} records, "
        f"{len(errors)} files skipped"
    )
    return DatasetBuildResult(
        dataset=dataset, records=records, errors=errors, files_seen=len(paths)
    )


def class_count_frame(dataset: LabeledDataset) -> pd.DataFrame:
    """Per-class sample counts with a total row."""
    rows = [
        {"Data class": SAMPLE_ROW_NAMES[label], "Number of samples": dataset.class_counts[label]}
        for label in CLASS_ORDER
    ]
    rows.append({"Data class": "Total", "Number of samples": len(dataset)})
    return pd.DataFrame(rows, columns=["Data class", "Number of samples"])


def cohort_summary(records: list[GrfRecord]) -> pd.DataFrame:
    """Distinct subjects per walking group, split into patients and controls."""
    rows = []
    for group in WalkGroup:
        subjects = {
            cohort: {r.subject_id for r in records if r.group is group and r.cohort is cohort}
            for cohort in Cohort
        }
        rows.append(
            {
                "Group": group.value,
                "PD subjects": len(subjects[Cohort.PATIENT]),
                "Healthy subjects": len(subjects[Cohort.CONTROL]),
            }
        )
    return pd.DataFrame(rows, columns=["Group", "PD subjects", "Healthy subjects"])


def format_summary(result: DatasetBuildResult) -> str:
    """Plain-text ingest summary: sample counts per class and subjects per group."""
    lines = ["=" * 48, "SAMPLES PER CLASS", "=" * 48]
    counts = result.summary_frame()
    for row in counts.itertuples(index=False):
        if row[0] == "Total":
            lines.append("-" * 48)
        lines.append(f"{row[0]:<32}{row[1]:>16}")
    lines.append("")
    lines.append("SUBJECTS PER GROUP")
    lines.append("-" * 48)
    lines.append(f"{'Group':<16}{'PD subjects':>16}{'Healthy subjects':>16}")
    for row in result.cohort_frame().itertuples(index=False):
        lines.append(f"{row[0]:<16}{row[1]:>16}{row[2]:>16}")
    lines.append("")
    lines.append(f"Files seen: {result.files_seen}, skipped: {len(result.errors)}")
    for error in result.errors:
        lines.append(f"  - {error}")
    lines.append("=" * 48)
    return "\n".join(lines) + "\n"
