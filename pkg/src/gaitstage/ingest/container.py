"""
Dataset container file (``.grfd``).

Layout:
    4 bytes   magic b"GRFD"
    1 byte    format version (1)
    4 bytes   uint32 little-endian header length
    n bytes   UTF-8 JSON header (sorted keys): provenance, window shape,
              class counts, per-window metadata in dataset order
    rest      all window matrices as float64 little-endian, row-major,
              concatenated in dataset order
"""

import json
import logging
import struct
from pathlib import Path

import numpy as np

from ..errors import CheckpointError, StorageError
from .schema import ClassLabel, GrfWindow, LabeledDataset, Provenance

logger = logging.getLogger(__name__)

DATASET_MAGIC = b"GRFD"
DATASET_VERSION = 1


def save_dataset(dataset: LabeledDataset, path: str | Path) -> Path:
    """Write a dataset container; identical datasets produce identical bytes."""
    path = Path(path)
    shape = list(dataset.windows[0].matrix.shape) if dataset.windows else [0, 0]
    header = {
        "provenance": dataset.provenance.to_dict(),
        "window_shape": shape,
        "class_counts": {label.value: n for label, n in dataset.class_counts.items()},
        "windows": [w.to_dict() for w in dataset.windows],
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as handle:
            handle.write(DATASET_MAGIC)
            handle.write(struct.pack("<BI", DATASET_VERSION, len(header_bytes)))
            handle.write(header_bytes)
            for window in dataset.windows:
                handle.write(np.ascontiguousarray(window.matrix, dtype="<f8").tobytes())
    except OSError as e:
        raise StorageError(f"Cannot write dataset {path}: {e}") from e

    logger.info(f"Saved {len(dataset)} windows to {path}")
    return path


def load_dataset(path: str | Path) -> LabeledDataset:
    """
    Read a dataset container.

    Raises:
        CheckpointError: missing file, wrong magic, unknown version or truncated data
    """
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"Cannot read dataset {path}: {e}") from e

    if blob[:4] != DATASET_MAGIC:
        raise CheckpointError(f"{path.name}: not a dataset container (bad magic)")
    if len(blob) < 9:
        raise CheckpointError(f"{path.name}: truncated header")
    version, header_len = struct.unpack("<BI", blob[4:9])
    if version != DATASET_VERSION:
        raise CheckpointError(
            f"{path.name}: unsupported dataset version {version} (expected {DATASET_VERSION})"
        )

    try:
        header = json.loads(blob[9 : 9 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path.name}: corrupt header: {e}") from e

    rows, cols = header["window_shape"]
    metas = header["windows"]
    payload = blob[9 + header_len :]
    expected = len(metas) * rows * cols * 8
    if len(payload) != expected:
        raise CheckpointError(
            f"{path.name}: payload is {len(payload)} bytes, expected {expected}"
        )

    matrices = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    matrices = matrices.reshape(len(metas), rows, cols) if metas else matrices
    windows = [
        GrfWindow(
            matrix=matrices[i].copy(),
            label=ClassLabel(meta["label"]),
            subject_id=meta["subject_id"],
            window_index=meta["window_index"],
            normalized=meta["normalized"],
            source=meta["source"],
        )
        for i, meta in enumerate(metas)
    ]
    provenance = Provenance(**header["provenance"])
    logger.info(f"Loaded {len(windows)} windows from {path}")
    return LabeledDataset(windows=windows, provenance=provenance)
