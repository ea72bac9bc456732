"""
Tensor core: float64 arrays, shape arithmetic, convolution and pooling primitives.

Usage:
    from gaitstage.tensor import ShapeSpec, pool_output_shape, cross_correlate2d

    pool_output_shape(ShapeSpec(n_h=500, n_w=18, n_c=1, f=2, s=2))  # (250, 9, 1)
"""

from .core import (
    IndexMap,
    ShapeSpec,
    Tensor,
    as_tensor,
    convolve2d,
    cross_correlate2d,
    cross_correlate2d_naive,
    flatten,
    flip180,
    maxpool2d,
    pool_output_shape,
)
from .patches import image_to_patches, pad_spatial, patches_to_image

__all__ = [
    # Types
    "Tensor",
    "IndexMap",
    "ShapeSpec",
    "as_tensor",
    # Shape arithmetic
    "pool_output_shape",
    # Convolution
    "convolve2d",
    "cross_correlate2d",
    "cross_correlate2d_naive",
    "flip180",
    # Pooling / reshaping
    "maxpool2d",
    "flatten",
    # Patch matrices
    "image_to_patches",
    "patches_to_image",
    "pad_spatial",
]
