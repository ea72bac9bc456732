"""
Resampling, windowing and per-window normalization.

Windows are cut from frame 0 without overlap by default; the trailing
remainder shorter than one window is discarded. At 100 Hz a 500-frame window
spans about five gait cycles.
"""

import logging
from dataclasses import replace

import numpy as np

from ..errors import DataFormatError, NumericError
from .schema import (
    DEFAULT_WINDOW_LEN,
    NOMINAL_SAMPLE_RATE,
    ClassLabel,
    GrfRecord,
    GrfWindow,
)

logger = logging.getLogger(__name__)

RATE_TOLERANCE = 0.01


def resample_record(
    record: GrfRecord,
    target_rate: float = NOMINAL_SAMPLE_RATE,
    tolerance: float = RATE_TOLERANCE,
) -> GrfRecord:
    """
    Linearly resample a record onto a uniform ``target_rate`` time grid.

    Records whose inferred rate is within ``tolerance`` (relative) of the
    target are returned unchanged.
    """
    deviation = abs(record.sample_rate - target_rate) / target_rate
    if deviation <= tolerance:
        return record

    t = record.timestamps
    n_frames = int(np.floor((t[-1] - t[0]) * target_rate + 1e-9)) + 1
    grid = t[0] + np.arange(n_frames, dtype=np.float64) / target_rate
    resampled = np.empty((n_frames, record.frames.shape[1]), dtype=np.float64)
    resampled[:, 0] = grid
    for col in range(1, record.frames.shape[1]):
        resampled[:, col] = np.interp(grid, t, record.frames[:, col])

    logger.warning(
        f"{record.source}: resampled {record.sample_rate} Hz -> {target_rate} Hz "
        f"({record.n_frames} -> {n_frames} frames)"
    )
    return replace(record, frames=resampled, sample_rate=float(target_rate))


def window_record(
    record: GrfRecord,
    label: ClassLabel,
    window_len: int = DEFAULT_WINDOW_LEN,
    overlap: int = 0,
) -> list[GrfWindow]:
    """
    Cut a record into consecutive windows of ``window_len`` frames.

    Args:
        record: Parsed record
        label: Class label attached to every window
        window_len: Frames per window
        overlap: Frames shared by consecutive windows (0 = non-overlapping)

    Returns:
        Unnormalized windows with the timestamp column dropped, window_index
        sequential from 0. Empty (with a warning) when the record is shorter
        than one window.
    """
    if window_len < 1:
        raise ValueError(f"window_len must be >= 1, got {window_len}")
    if not 0 <= overlap < window_len:
        raise ValueError(f"overlap must be in [0, {window_len}), got {overlap}")

    forces = record.forces
    n_frames = forces.shape[0]
    if n_frames < window_len:
        logger.warning(
            f"{record.source or record.subject_id}: {n_frames} frames < window length "
            f"{window_len}, no windows produced"
        )
        return []

    step = window_len - overlap
    starts = range(0, n_frames - window_len + 1, step)
    windows = [
        GrfWindow(
            matrix=np.array(forces[start : start + window_len], dtype=np.float64),
            label=label,
            subject_id=record.subject_id,
            window_index=index,
            normalized=False,
            source=record.source,
        )
        for index, start in enumerate(starts)
    ]

    remainder = n_frames - (starts[-1] + window_len) if overlap == 0 else None
    logger.debug(
        f"{record.source}: {len(windows)} windows of {window_len}, remainder {remainder}"
    )
    return windows


def normalize_window(window: GrfWindow) -> GrfWindow:
    """
    Min-max scale a window into [0, 1] using its single global min and max.

    A constant window maps to all zeros.

    Raises:
        DataFormatError: window already normalized
        NumericError: non-finite values
    """
    if window.normalized:
        raise DataFormatError(
            f"{window.source}#{window.window_index}: window is already normalized"
        )
    matrix = window.matrix
    if not np.all(np.isfinite(matrix)):
        raise NumericError(f"{window.source}#{window.window_index}: non-finite values")

    low = float(matrix.min())
    high = float(matrix.max())
    if high == low:
        scaled = np.zeros_like(matrix, dtype=np.float64)
    else:
        scaled = (matrix - low) / (high - low)
        # Guard the endpoints against rounding
        np.clip(scaled, 0.0, 1.0, out=scaled)
    return replace(window, matrix=scaled, normalized=True)
