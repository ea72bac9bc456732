"""
Dense tensor helpers and the convolution / pooling arithmetic.

A tensor is a float64 ``numpy.ndarray`` with every dimension >= 1, stored
row-major (C order). Operations never modify their inputs and always return
fresh arrays.

Layout conventions:
    feature maps  (h, w, c)    frames x channels x feature maps
    2-D kernels   (kh, kw)
"""

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ShapeError
from .patches import image_to_patches, pad_spatial

logger = logging.getLogger(__name__)

Tensor = npt.NDArray[np.float64]
IndexMap = npt.NDArray[np.int64]


def as_tensor(data: Any, shape: tuple[int, ...] | None = None) -> Tensor:
    """
    Build a float64 C-ordered tensor, validating its shape.

    Args:
        data: Nested sequence, array or scalar data
        shape: Optional shape to reshape the flat row-major data into

    Returns:
        Fresh float64 array
    """
    array = np.array(data, dtype=np.float64, order="C", copy=True)
    if shape is not None:
        if int(np.prod(shape)) != array.size:
            raise ShapeError(f"Cannot view {array.size} values as shape {shape}")
        array = array.reshape(shape)
    if array.ndim == 0:
        array = array.reshape(1)
    if any(dim < 1 for dim in array.shape):
        raise ShapeError(f"All dimensions must be >= 1, got shape {array.shape}")
    return array


@dataclass(frozen=True)
class ShapeSpec:
    """Feature-map and window geometry for one pooling or convolution step."""

    n_h: int  # height (frames)
    n_w: int  # width (channels)
    n_c: int  # feature maps
    f: int  # filter size
    s: int  # stride
    p: int = 0  # zero padding

    def __post_init__(self) -> None:
        for name in ("n_h", "n_w", "n_c", "f", "s"):
            if getattr(self, name) < 1:
                raise ShapeError(f"ShapeSpec.{name} must be >= 1, got {getattr(self, name)}")
        if self.p < 0:
            raise ShapeError(f"ShapeSpec.p must be >= 0, got {self.p}")
        if self.f > self.n_h + 2 * self.p or self.f > self.n_w + 2 * self.p:
            raise ShapeError(
                f"Filter {self.f} does not fit padded input "
                f"{self.n_h + 2 * self.p}x{self.n_w + 2 * self.p}"
            )


def pool_output_shape(spec: ShapeSpec) -> tuple[int, int, int]:
    """
    Output shape of a windowed operation: floor((n + 2p - f) / s) + 1 per spatial axis.

    Channel count passes through unchanged.
    """
    out_h = (spec.n_h + 2 * spec.p - spec.f) // spec.s + 1
    out_w = (spec.n_w + 2 * spec.p - spec.f) // spec.s + 1
    if out_h < 1 or out_w < 1:
        raise ShapeError(f"Output shape ({out_h}, {out_w}) invalid for {spec}")
    return out_h, out_w, spec.n_c


def flip180(kernel: Tensor) -> Tensor:
    """Rotate a 2-D kernel by 180 degrees."""
    return np.ascontiguousarray(kernel[::-1, ::-1])


def _check_2d(
    image: Tensor, kernel: Tensor, padding: int, stride: int = 1
) -> tuple[int, int]:
    if image.ndim != 2 or kernel.ndim != 2:
        raise ShapeError(
            f"Expected 2-D image and kernel, got shapes {image.shape} and {kernel.shape}"
        )
    if padding < 0 or stride < 1:
        raise ShapeError(f"Invalid padding={padding} / stride={stride}")
    (h, w), (kh, kw) = image.shape, kernel.shape
    out_h = (h + 2 * padding - kh) // stride + 1
    out_w = (w + 2 * padding - kw) // stride + 1
    if out_h < 1 or out_w < 1:
        raise ShapeError(
            f"Kernel {kh}x{kw} does not fit padded input {h + 2 * padding}x{w + 2 * padding}"
        )
    return out_h, out_w


def convolve2d(image: Tensor, kernel: Tensor, padding: int = 0) -> Tensor:
    """
    True discrete 2-D convolution (kernel flipped), stride 1.

    S(i, j) = sum_m sum_n I(m, n) * K(i - m, j - n), evaluated at every position
    where the flipped kernel lies fully inside the zero-padded input.
    """
    out_h, out_w = _check_2d(image, kernel, padding)
    kh, kw = kernel.shape
    padded = pad_spatial(np.asarray(image, dtype=np.float64), padding)

    out = np.zeros((out_h, out_w), dtype=np.float64)
    # Output (i, j) sits where the kernel's far corner lands on padded (i + kh - 1, j + kw - 1),
    # so the kernel index is (i + kh - 1 - m, j + kw - 1 - n) for the padded input index (m, n).
    for a in range(kh):
        for b in range(kw):
            out += padded[a : a + out_h, b : b + out_w] * kernel[kh - 1 - a, kw - 1 - b]
    return out


def cross_correlate2d(
    image: Tensor, kernel: Tensor, padding: int = 0, stride: int = 1
) -> Tensor:
    """Sliding-window product-sum without kernel flip (the layer convolution)."""
    out_h, out_w = _check_2d(image, kernel, padding, stride)
    patches, _, _ = image_to_patches(
        np.asarray(image, dtype=np.float64)[:, :, None], kernel.shape, stride, padding
    )
    return (patches @ kernel.reshape(-1)).reshape(out_h, out_w)


def cross_correlate2d_naive(
    image: Tensor, kernel: Tensor, padding: int = 0, stride: int = 1
) -> Tensor:
    """Quadruple-loop reference cross-correlation, used as an oracle for the fast paths."""
    out_h, out_w = _check_2d(image, kernel, padding, stride)
    kh, kw = kernel.shape
    padded = pad_spatial(np.asarray(image, dtype=np.float64), padding)

    out = np.zeros((out_h, out_w), dtype=np.float64)
    for i in range(out_h):
        for j in range(out_w):
            total = 0.0
            for a in range(kh):
                for b in range(kw):
                    total += padded[i * stride + a, j * stride + b] * kernel[a, b]
            out[i, j] = total
    return out


def maxpool2d(x: Tensor, f: int, s: int) -> tuple[Tensor, IndexMap]:
    """
    Max pooling over f x f windows with stride s and no padding.

    Args:
        x: Input of shape (h, w, c)
        f: Window size
        s: Stride

    Returns:
        Tuple of (y, argmax); y has shape pool_output_shape(h, w, c, f, s, 0) and
        argmax holds, per output cell, the flat row-major index into x of the
        winning element. Ties go to the lowest flat index.
    """
    if x.ndim != 3:
        raise ShapeError(f"maxpool2d expects an (h, w, c) array, got shape {x.shape}")
    h, w, c = x.shape
    out_h, out_w, _ = pool_output_shape(ShapeSpec(n_h=h, n_w=w, n_c=c, f=f, s=s, p=0))

    windows = sliding_window_view(x, (f, f), axis=(0, 1))[::s, ::s][:out_h, :out_w]
    flat = windows.reshape(out_h, out_w, c, f * f)
    # Row-major order inside a window follows flat input order, so the first
    # maximum found is the one with the lowest flat index.
    local = np.argmax(flat, axis=-1)
    y = np.take_along_axis(flat, local[..., None], axis=-1)[..., 0]

    rows = np.arange(out_h)[:, None, None] * s + local // f
    cols = np.arange(out_w)[None, :, None] * s + local % f
    channels = np.arange(c)[None, None, :]
    argmax = ((rows * w + cols) * c + channels).astype(np.int64)
    return np.ascontiguousarray(y, dtype=np.float64), argmax


def flatten(x: Tensor) -> Tensor:
    """Rank-1 copy of x in row-major order."""
    return np.array(x, dtype=np.float64, copy=True).reshape(-1)
