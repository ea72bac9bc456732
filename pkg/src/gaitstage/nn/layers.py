"""
Forward and backward passes for the network's layers.

All functions work on a single sample in (h, w, c) layout and return fresh
arrays. Backward functions take the cache produced by the matching forward
call; a missing cache raises StateError.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import NumericError, ShapeError, StateError
from ..tensor import IndexMap, Tensor, image_to_patches, maxpool2d, patches_to_image

XENT_CLIP = 1e-12


# =============================================================================
# CONVOLUTION
# =============================================================================


@dataclass
class ConvLayer:
    """3 x 3 'same' convolution: weights (f, f, c_in, c_out), bias (c_out,)."""

    weights: Tensor
    bias: Tensor
    padding: int = 1
    stride: int = 1

    def __post_init__(self) -> None:
        if self.weights.ndim != 4 or self.weights.shape[0] != self.weights.shape[1]:
            raise ShapeError(f"Conv weights must be (f, f, c_in, c_out), got {self.weights.shape}")
        if self.bias.shape != (self.weights.shape[3],):
            raise ShapeError(
                f"Conv bias shape {self.bias.shape} does not match {self.weights.shape[3]} filters"
            )

    @property
    def kernel(self) -> int:
        return int(self.weights.shape[0])

    @property
    def in_channels(self) -> int:
        return int(self.weights.shape[2])

    @property
    def out_channels(self) -> int:
        return int(self.weights.shape[3])

    def weight_matrix(self) -> Tensor:
        """Weights as (c_in * f * f, c_out), rows ordered like patch columns."""
        return self.weights.transpose(2, 0, 1, 3).reshape(-1, self.out_channels)


@dataclass
class ConvCache:
    """What conv_backward needs from the forward pass."""

    patches: Tensor
    input_shape: tuple[int, int, int]
    out_h: int
    out_w: int


def conv_forward(x: Tensor, layer: ConvLayer) -> tuple[Tensor, ConvCache]:
    """
    Cross-correlate x with every filter, summing over input channels, plus bias.

    Returns:
        (y, cache) with y of shape (out_h, out_w, c_out)
    """
    if x.ndim != 3 or x.shape[2] != layer.in_channels:
        raise ShapeError(
            f"Conv input shape {x.shape} does not match {layer.in_channels} input channels"
        )
    patches, out_h, out_w = image_to_patches(x, layer.kernel, layer.stride, layer.padding)
    y = patches @ layer.weight_matrix() + layer.bias
    cache = ConvCache(patches=patches, input_shape=x.shape, out_h=out_h, out_w=out_w)
    return y.reshape(out_h, out_w, layer.out_channels), cache


def conv_backward(
    grad_out: Tensor, cache: ConvCache | None, layer: ConvLayer
) -> tuple[Tensor, Tensor, Tensor]:
    """
    Gradients of the loss w.r.t. input, weights and bias.

    Returns:
        (grad_x, grad_weights, grad_bias)
    """
    if cache is None:
        raise StateError("conv_backward called without a forward cache")
    expected = (cache.out_h, cache.out_w, layer.out_channels)
    if grad_out.shape != expected:
        raise ShapeError(f"Conv grad_out shape {grad_out.shape}, expected {expected}")

    g = grad_out.reshape(-1, layer.out_channels)
    grad_bias = g.sum(axis=0)
    grad_matrix = cache.patches.T @ g
    f, c_in = layer.kernel, layer.in_channels
    grad_weights = grad_matrix.reshape(c_in, f, f, layer.out_channels).transpose(1, 2, 0, 3)
    grad_patches = g @ layer.weight_matrix().T
    grad_x = patches_to_image(
        grad_patches, cache.input_shape, f, cache.out_h, cache.out_w, layer.stride, layer.padding
    )
    return grad_x, np.ascontiguousarray(grad_weights), grad_bias


# =============================================================================
# ACTIVATION / POOLING
# =============================================================================


def relu_forward(x: Tensor) -> Tensor:
    return np.maximum(x, 0.0)


def relu_backward(grad_out: Tensor, x: Tensor | None) -> Tensor:
    """Pass gradient where x > 0; the gradient at exactly 0 is 0."""
    if x is None:
        raise StateError("relu_backward called without a forward cache")
    if grad_out.shape != x.shape:
        raise ShapeError(f"ReLU grad shape {grad_out.shape} does not match input {x.shape}")
    return np.where(x > 0.0, grad_out, 0.0)


def maxpool_forward(x: Tensor, f: int = 2, s: int = 2) -> tuple[Tensor, IndexMap]:
    return maxpool2d(x, f, s)


def maxpool_backward(
    grad_out: Tensor, argmax: IndexMap | None, input_shape: tuple[int, ...]
) -> Tensor:
    """Route each output gradient to its winning input element; overlaps accumulate."""
    if argmax is None:
        raise StateError("maxpool_backward called without a forward cache")
    if argmax.shape != grad_out.shape:
        raise StateError(
            f"Stale pooling indices: argmax shape {argmax.shape} vs grad_out {grad_out.shape}"
        )
    grad_x = np.zeros(int(np.prod(input_shape)), dtype=np.float64)
    np.add.at(grad_x, argmax.reshape(-1), grad_out.reshape(-1))
    return grad_x.reshape(input_shape)


# =============================================================================
# DENSE
# =============================================================================


@dataclass
class DenseLayer:
    """Fully connected layer: y = x W + b with W of shape (n_in, n_out)."""

    weights: Tensor
    bias: Tensor

    def __post_init__(self) -> None:
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[1],):
            raise ShapeError(
                f"Dense weights {self.weights.shape} / bias {self.bias.shape} inconsistent"
            )

    @property
    def n_in(self) -> int:
        return int(self.weights.shape[0])

    @property
    def n_out(self) -> int:
        return int(self.weights.shape[1])


def dense_forward(x: Tensor, layer: DenseLayer) -> Tensor:
    if x.ndim != 1 or x.shape[0] != layer.n_in:
        raise ShapeError(f"Dense input length {x.shape} does not match n_in={layer.n_in}")
    return x @ layer.weights + layer.bias


def dense_backward(
    grad_out: Tensor, x: Tensor | None, layer: DenseLayer
) -> tuple[Tensor, Tensor, Tensor]:
    """
    Returns:
        (grad_x, grad_weights, grad_bias)
    """
    if x is None:
        raise StateError("dense_backward called without a forward cache")
    if grad_out.shape != (layer.n_out,):
        raise ShapeError(f"Dense grad_out shape {grad_out.shape}, expected ({layer.n_out},)")
    return layer.weights @ grad_out, np.outer(x, grad_out), grad_out.copy()


# =============================================================================
# SOFTMAX / CROSS-ENTROPY HEAD
# =============================================================================


def softmax(logits: Tensor) -> Tensor:
    if not np.all(np.isfinite(logits)):
        raise NumericError(f"Non-finite logits: {logits}")
    shifted = np.exp(logits - logits.max())
    return shifted / shifted.sum()


def softmax_xent_forward(logits: Tensor, one_hot: Tensor) -> tuple[Tensor, float]:
    """
    Softmax probabilities and categorical cross-entropy.

    Returns:
        (probs, loss) with loss = -sum(one_hot * ln(probs + 1e-12))
    """
    if logits.shape != one_hot.shape or logits.ndim != 1:
        raise ShapeError(f"Logits {logits.shape} and one-hot {one_hot.shape} must match")
    probs = softmax(logits)
    loss = float(-np.sum(one_hot * np.log(probs + XENT_CLIP)))
    return probs, loss


def softmax_xent_backward(probs: Tensor, one_hot: Tensor) -> Tensor:
    return probs - one_hot


# =============================================================================
# INITIALIZATION
# =============================================================================


def scaled_normal(
    shape: tuple[int, ...], fan_in: int, rng: np.random.Generator, gain: float = 2.0
) -> Tensor:
    """Normal weights with standard deviation sqrt(gain / fan_in)."""
    return rng.standard_normal(shape) * np.sqrt(gain / fan_in)
