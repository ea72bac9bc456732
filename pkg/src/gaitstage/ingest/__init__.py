"""
Gait record ingestion.

Parses 19-column ground reaction force records, labels them by Hoehn & Yahr
stage, cuts 500 x 18 windows, normalizes them to [0, 1] and exports them as
spectrogram PNGs.

Usage:
    from gaitstage.ingest import build_dataset, save_dataset

    result = build_dataset("data/gaitpdb", "data/demographics.csv")
    print(format_summary(result))
    save_dataset(result.dataset, "out/dataset.grfd")
"""

from .container import DATASET_MAGIC, DATASET_VERSION, load_dataset, save_dataset
from .dataset import (
    DatasetBuildResult,
    build_dataset,
    class_count_frame,
    cohort_summary,
    format_summary,
    process_file,
)
from .labels import (
    Demographics,
    ManifestEntry,
    SubjectInfo,
    label_record,
    load_demographics,
    load_manifest,
    stage_label,
)
from .record_parser import (
    RecordMetadata,
    infer_sample_rate,
    parse_filename,
    parse_record,
    read_record,
)
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
from .spectrogram import colorize, decode_spectrogram, decolorize, export_spectrogram
from .synthetic import generate_synthetic_dataset, write_synthetic_corpus
from .windowing import normalize_window, resample_record, window_record

__all__ = [
    # Schema
    "ClassLabel",
    "CLASS_ORDER",
    "Cohort",
    "WalkGroup",
    "GrfRecord",
    "GrfWindow",
    "LabeledDataset",
    "Provenance",
    "DEFAULT_WINDOW_LEN",
    # Parsing
    "RecordMetadata",
    "parse_record",
    "read_record",
    "parse_filename",
    "infer_sample_rate",
    # Labels
    "Demographics",
    "SubjectInfo",
    "ManifestEntry",
    "label_record",
    "stage_label",
    "load_demographics",
    "load_manifest",
    # Windowing
    "resample_record",
    "window_record",
    "normalize_window",
    # Images
    "colorize",
    "decolorize",
    "export_spectrogram",
    "decode_spectrogram",
    # Dataset
    "DatasetBuildResult",
    "build_dataset",
    "process_file",
    "class_count_frame",
    "cohort_summary",
    "format_summary",
    "save_dataset",
    "load_dataset",
    "DATASET_MAGIC",
    "DATASET_VERSION",
    # Synthetic data
    "generate_synthetic_dataset",
    "write_synthetic_corpus",
]
