"""
Patch-matrix restructuring for the fast convolution paths.

``image_to_patches`` lays every receptive field of a zero-padded HWC input out
as one row, so a convolution becomes a single matrix product;
``patches_to_image`` scatters row gradients back onto the input grid.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ShapeError

KernelSize = int | tuple[int, ...]


def pad_spatial(x: np.ndarray, padding: int) -> np.ndarray:
    """Zero-pad the two leading (spatial) axes of an HWC array."""
    if padding == 0:
        return x
    pad = [(padding, padding), (padding, padding)] + [(0, 0)] * (x.ndim - 2)
    return np.pad(x, pad, mode="constant", constant_values=0.0)


def kernel_dims(kernel: KernelSize) -> tuple[int, int]:
    """(kh, kw) from a square size or a 2-tuple."""
    if isinstance(kernel, (int, np.integer)):
        return int(kernel), int(kernel)
    if len(kernel) != 2:
        raise ShapeError(f"Kernel size must be an int or (kh, kw), got {kernel}")
    return int(kernel[0]), int(kernel[1])


def image_to_patches(
    x: np.ndarray, kernel: KernelSize, stride: int = 1, padding: int = 0
) -> tuple[np.ndarray, int, int]:
    """
    Restructure an (h, w, c) array into a patch matrix.

    Args:
        x: Input of shape (h, w, c)
        kernel: Kernel size, square (int) or (kh, kw)
        stride: Window step along both spatial axes
        padding: Zero padding added on all sides

    Returns:
        Tuple of (patches, out_h, out_w); patches has shape
        (out_h * out_w, c * kh * kw), columns ordered (c, kh, kw)
    """
    if x.ndim != 3:
        raise ShapeError(f"Expected an (h, w, c) array, got shape {x.shape}")

    kh, kw = kernel_dims(kernel)
    xp = pad_spatial(x, padding)
    if kh > xp.shape[0] or kw > xp.shape[1]:
        raise ShapeError(
            f"Kernel {kh}x{kw} larger than padded input {xp.shape[0]}x{xp.shape[1]}"
        )

    # (out_h, out_w, c, kh, kw) view, no copy until the reshape below
    windows = sliding_window_view(xp, (kh, kw), axis=(0, 1))[::stride, ::stride]
    out_h, out_w = windows.shape[0], windows.shape[1]
    patches = windows.reshape(out_h * out_w, -1)
    return np.ascontiguousarray(patches), out_h, out_w


def patches_to_image(
    patches: np.ndarray,
    input_shape: tuple[int, int, int],
    kernel: KernelSize,
    out_h: int,
    out_w: int,
    stride: int = 1,
    padding: int = 0,
) -> np.ndarray:
    """
    Scatter-add a patch matrix back onto the input grid (adjoint of image_to_patches).

    Overlapping receptive fields accumulate.
    """
    h, w, c = input_shape
    kh, kw = kernel_dims(kernel)
    grid = patches.reshape(out_h, out_w, c, kh, kw)
    xp = np.zeros((h + 2 * padding, w + 2 * padding, c), dtype=np.float64)

    row_stop = stride * (out_h - 1) + 1
    col_stop = stride * (out_w - 1) + 1
    for ki in range(kh):
        for kj in range(kw):
            xp[ki : ki + row_stop : stride, kj : kj + col_stop : stride, :] += grid[:, :, :, ki, kj]

    if padding == 0:
        return xp
    return xp[padding : padding + h, padding : padding + w, :]
