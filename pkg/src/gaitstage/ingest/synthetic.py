"""
Synthetic gait-like data with class-distinct structure.

Each class gets its own stride frequency, sensor loading profile and
total-force level, so a working model separates the classes easily. Used for
overfit / separability checks and for end-to-end runs without the public
corpus.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import StorageError
from ..tensor import Tensor
from .schema import (
    CLASS_ORDER,
    DEFAULT_WINDOW_LEN,
    NOMINAL_SAMPLE_RATE,
    WINDOW_COLUMNS,
    ClassLabel,
    GrfWindow,
    LabeledDataset,
    Provenance,
    WalkGroup,
)
from .windowing import normalize_window

logger = logging.getLogger(__name__)

# Stride frequency (Hz), sensor profile phase shift, total-force gain per class
CLASS_PATTERNS: dict[ClassLabel, tuple[float, float, float]] = {
    ClassLabel.HEALTHY: (1.00, 0.0, 1.0),
    ClassLabel.PD2: (0.80, 0.8, 1.4),
    ClassLabel.PD2_5: (0.65, 1.6, 1.8),
    ClassLabel.PD3: (0.50, 2.4, 2.2),
}

STAGE_SCORES = {ClassLabel.PD2: 2.0, ClassLabel.PD2_5: 2.5, ClassLabel.PD3: 3.0}


def synthetic_forces(
    label: ClassLabel,
    n_frames: int,
    rng: np.random.Generator,
    noise: float = 0.05,
) -> Tensor:
    """
    Non-negative (n_frames, 18) force matrix for one class.

    Columns 0-7 left sensors, 8-15 right sensors, 16-17 total left / right.
    """
    freq, shift, gain = CLASS_PATTERNS[label]
    t = np.arange(n_frames, dtype=np.float64) / NOMINAL_SAMPLE_RATE
    phase = rng.uniform(0.0, 2 * np.pi)

    sensors = np.arange(8, dtype=np.float64)
    profile = 0.5 + 0.5 * np.cos(sensors * 0.7 + shift)  # (8,)
    left = np.clip(np.sin(2 * np.pi * freq * t + phase), 0.0, None)[:, None] * profile
    right = np.clip(np.sin(2 * np.pi * freq * t + phase + np.pi), 0.0, None)[:, None] * profile

    forces = np.empty((n_frames, WINDOW_COLUMNS), dtype=np.float64)
    forces[:, 0:8] = 100.0 * left
    forces[:, 8:16] = 100.0 * right
    forces[:, 16] = gain * forces[:, 0:8].sum(axis=1)
    forces[:, 17] = gain * forces[:, 8:16].sum(axis=1)
    forces += noise * forces.max() * rng.standard_normal(forces.shape)
    return np.clip(forces, 0.0, None)


def generate_synthetic_dataset(
    windows_per_class: int,
    seed: int = 0,
    noise: float = 0.05,
    window_len: int = DEFAULT_WINDOW_LEN,
    subjects_per_class: int = 4,
) -> LabeledDataset:
    """
    Normalized synthetic dataset with ``windows_per_class`` windows per class.

    Windows are spread round-robin over ``subjects_per_class`` synthetic subjects
    so subject-level splitting can be exercised.
    """
    rng = np.random.default_rng(seed)
    windows: list[GrfWindow] = []
    for label in CLASS_ORDER:
        for i in range(windows_per_class):
            subject = f"Syn{label.value}{i % subjects_per_class:02d}"
            raw = GrfWindow(
                matrix=synthetic_forces(label, window_len, rng, noise),
                label=label,
                subject_id=subject,
                window_index=i // subjects_per_class,
                source=f"{subject}.synthetic",
            )
            windows.append(normalize_window(raw))

    provenance = Provenance(
        source_dir="synthetic",
        manifest_digest=f"seed={seed};noise={noise};per_class={windows_per_class}",
        window_len=window_len,
    )
    logger.info(f"Generated {len(windows)} synthetic windows (seed={seed})")
    return LabeledDataset(windows=windows, provenance=provenance)


def write_synthetic_corpus(
    out_dir: str | Path,
    subjects_per_class: int = 3,
    frames_per_record: int = 1200,
    seed: int = 0,
    noise: float = 0.05,
) -> Path:
    """
    Write record text files plus ``demographics.csv`` in the corpus conventions.

    Returns:
        Path of the demographics CSV
    """
    out_dir = Path(out_dir)
    rng = np.random.default_rng(seed)
    groups = list(WalkGroup)
    rows = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for label in CLASS_ORDER:
            cohort_code = "Co" if label is ClassLabel.HEALTHY else "Pt"
            for i in range(subjects_per_class):
                group = groups[i % len(groups)]
                number = CLASS_ORDER.index(label) * 20 + i + 1
                subject_id = f"{group.value}{cohort_code}{number:02d}"
                forces = synthetic_forces(label, frames_per_record, rng, noise)
                t = np.arange(frames_per_record, dtype=np.float64) / NOMINAL_SAMPLE_RATE
                frames = np.column_stack([t, forces])
                np.savetxt(out_dir / f"{subject_id}_01.txt", frames, fmt="%.4f", delimiter="\t")
                rows.append(
                    {
                        "subject_id": subject_id,
                        "group": group.value,
                        "cohort": "control" if label is ClassLabel.HEALTHY else "patient",
                        "hoehn_yahr": STAGE_SCORES.get(label, ""),
                    }
                )
        demographics = out_dir / "demographics.csv"
        pd.DataFrame(rows).to_csv(demographics, index=False)
    except OSError as e:
        raise StorageError(f"Cannot write synthetic corpus to {out_dir}: {e}") from e

    logger.info(f"Wrote synthetic corpus of {len(rows)} records to {out_dir}")
    return demographics
