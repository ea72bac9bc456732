"""
Spectrogram image export for normalized windows.

One pixel per matrix element (18 wide x 500 tall for the default window);
matrix row r is pixel row r. Colors run linearly from purple (minimum force)
to yellow (maximum force).
"""

import logging
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import DataFormatError, StorageError
from ..tensor import Tensor
from .schema import GrfWindow

logger = logging.getLogger(__name__)

PURPLE = np.array([68.0, 1.0, 84.0])
YELLOW = np.array([253.0, 231.0, 37.0])


def colorize(matrix: Tensor) -> np.ndarray:
    """
    Map values in [0, 1] onto the purple-yellow gradient.

    Returns:
        uint8 array of shape (*matrix.shape, 3); each channel rounded half-up
    """
    values = np.asarray(matrix, dtype=np.float64)[..., None]
    rgb = PURPLE + values * (YELLOW - PURPLE)
    return np.floor(rgb + 0.5).astype(np.uint8)


def decolorize(rgb: np.ndarray) -> Tensor:
    """Invert ``colorize`` by projecting each pixel onto the gradient segment."""
    direction = YELLOW - PURPLE
    offsets = rgb[..., :3].astype(np.float64) - PURPLE
    values = offsets @ direction / float(direction @ direction)
    return np.clip(values, 0.0, 1.0)


def export_spectrogram(window: GrfWindow, path: str | Path) -> Path:
    """
    Write a normalized window as an 8-bit RGB PNG.

    Raises:
        DataFormatError: window not normalized
        StorageError: path not writable
    """
    if not window.normalized:
        raise DataFormatError(
            f"{window.source}#{window.window_index}: only normalized windows can be exported"
        )

    path = Path(path)
    image = Image.fromarray(colorize(window.matrix))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        image.save(path, format="PNG")
    except OSError as e:
        raise StorageError(f"Cannot write spectrogram {path}: {e}") from e

    logger.debug(f"Wrote spectrogram {path.name} ({image.width}x{image.height})")
    return path


def decode_spectrogram(path: str | Path) -> Tensor:
    """Read an exported spectrogram back into a normalized matrix."""
    path = Path(path)
    try:
        with Image.open(path) as image:
            rgb = np.asarray(image.convert("RGB"))
    except OSError as e:
        raise StorageError(f"Cannot read spectrogram {path}: {e}") from e
    return decolorize(rgb)
