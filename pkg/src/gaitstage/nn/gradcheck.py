"""
Central finite-difference checks of the analytic backward passes.

Every layer check draws seeded random inputs and an upstream gradient G, treats
``sum(G * layer(x))`` as the scalar loss and compares the analytic gradients of
every input and parameter tensor against

    (f(x + eps) - f(x - eps)) / (2 * eps)

using the norm-wise relative error ||a - n|| / max(||a|| + ||n||, 1e-12).
The network check does the same for the real cross-entropy loss on a sample of
coordinates from every parameter tensor.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from ..tensor import Tensor
from .layers import (
    ConvLayer,
    DenseLayer,
    conv_backward,
    conv_forward,
    dense_backward,
    dense_forward,
    maxpool_backward,
    maxpool_forward,
    relu_backward,
    relu_forward,
    softmax_xent_backward,
    softmax_xent_forward,
)
from .network import ModelConfig, Network

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-6
LAYER_TOLERANCE = 1e-4
NETWORK_TOLERANCE = 1e-3
DEFAULT_TRIALS = 20


@dataclass
class GradCheckResult:
    """Outcome of one check over all its trials."""

    name: str
    trials: int
    max_relative_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_relative_error)) and (
            self.max_relative_error <= self.tolerance
        )

    def to_dict(self) -> dict:
        return {
            "check": self.name,
            "trials": self.trials,
            "max_relative_error": self.max_relative_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def relative_error(analytic: Tensor, numeric: Tensor) -> float:
    a = np.ravel(analytic)
    n = np.ravel(numeric)
    return float(np.linalg.norm(a - n) / max(np.linalg.norm(a) + np.linalg.norm(n), 1e-12))


def numerical_gradient(
    f: Callable[[], float],
    x: Tensor,
    eps: float = DEFAULT_EPS,
    indices: np.ndarray | None = None,
) -> Tensor:
    """
    Central differences of ``f`` w.r.t. ``x``, perturbing ``x`` in place.

    Args:
        f: Zero-argument loss that reads ``x``
        x: Array to perturb; restored exactly afterwards
        eps: Step size
        indices: Flat indices to probe (all of them if None)

    Returns:
        Gradient with x's shape, or a 1-D array aligned with ``indices``
    """
    flat = x.reshape(-1)
    probe = np.arange(flat.size) if indices is None else np.asarray(indices)
    grad = np.zeros(probe.size, dtype=np.float64)
    for k, i in enumerate(probe):
        original = flat[i]
        flat[i] = original + eps
        plus = f()
        flat[i] = original - eps
        minus = f()
        flat[i] = original
        grad[k] = (plus - minus) / (2.0 * eps)
    return grad.reshape(x.shape) if indices is None else grad


def _run(
    name: str,
    trials: int,
    tolerance: float,
    trial: Callable[[np.random.Generator], float],
    seed: int,
) -> GradCheckResult:
    errors = [trial(np.random.default_rng([seed, t])) for t in range(trials)]
    result = GradCheckResult(name, trials, max(errors), tolerance)
    logger.debug(f"gradcheck {name}: max relative error {result.max_relative_error:.3e}")
    return result


# =============================================================================
# LAYER CHECKS
# =============================================================================


def check_conv(
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    eps: float = DEFAULT_EPS,
    tolerance: float = LAYER_TOLERANCE,
) -> GradCheckResult:
    """3 x 3 same-padded convolution: input, weights and bias gradients."""

    def trial(rng: np.random.Generator) -> float:
        h, w = rng.integers(4, 8, size=2)
        c_in, c_out = rng.integers(1, 4, size=2)
        x = rng.standard_normal((h, w, c_in))
        layer = ConvLayer(
            weights=rng.standard_normal((3, 3, c_in, c_out)), bias=rng.standard_normal(c_out)
        )
        y, cache = conv_forward(x, layer)
        g = rng.standard_normal(y.shape)
        grad_x, grad_w, grad_b = conv_backward(g, cache, layer)

        def loss() -> float:
            return float(np.sum(g * conv_forward(x, layer)[0]))

        analytic = [grad_x, grad_w, grad_b]
        numeric = [numerical_gradient(loss, t, eps) for t in (x, layer.weights, layer.bias)]
        return relative_error(
            np.concatenate([a.ravel() for a in analytic]),
            np.concatenate([n.ravel() for n in numeric]),
        )

    return _run("conv", trials, tolerance, trial, seed)


def check_dense(
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    eps: float = DEFAULT_EPS,
    tolerance: float = LAYER_TOLERANCE,
) -> GradCheckResult:
    """Fully connected layer: input, weights and bias gradients."""

    def trial(rng: np.random.Generator) -> float:
        n_in, n_out = rng.integers(2, 12, size=2)
        x = rng.standard_normal(n_in)
        layer = DenseLayer(
            weights=rng.standard_normal((n_in, n_out)), bias=rng.standard_normal(n_out)
        )
        g = rng.standard_normal(n_out)
        grad_x, grad_w, grad_b = dense_backward(g, x, layer)

        def loss() -> float:
            return float(np.sum(g * dense_forward(x, layer)))

        analytic = np.concatenate([grad_x, grad_w.ravel(), grad_b])
        numeric = np.concatenate(
            [numerical_gradient(loss, t, eps).ravel() for t in (x, layer.weights, layer.bias)]
        )
        return relative_error(analytic, numeric)

    return _run("dense", trials, tolerance, trial, seed)


def check_relu(
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    eps: float = DEFAULT_EPS,
    tolerance: float = LAYER_TOLERANCE,
) -> GradCheckResult:
    """ReLU with inputs kept at least 1e-2 away from the kink."""

    def trial(rng: np.random.Generator) -> float:
        shape = (int(rng.integers(2, 6)), int(rng.integers(2, 6)), int(rng.integers(1, 4)))
        x = rng.uniform(1e-2, 1.0, shape) * rng.choice([-1.0, 1.0], shape)
        g = rng.standard_normal(shape)

        def loss() -> float:
            return float(np.sum(g * relu_forward(x)))

        return relative_error(relu_backward(g, x), numerical_gradient(loss, x, eps))

    return _run("relu", trials, tolerance, trial, seed)


def check_maxpool(
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    eps: float = DEFAULT_EPS,
    tolerance: float = LAYER_TOLERANCE,
) -> GradCheckResult:
    """
    Max-pooling with distinct input values (gaps of 1e-2, far above eps).

    Odd trials use an overlapping 3 x 3 / stride 2 window so routed gradients
    accumulate on shared winners.
    """

    def trial_at(index: int, rng: np.random.Generator) -> float:
        f, s = (2, 2) if index % 2 == 0 else (3, 2)
        shape = (int(rng.integers(f, 9)), int(rng.integers(f, 7)), int(rng.integers(1, 3)))
        x = rng.permutation(int(np.prod(shape))).reshape(shape).astype(np.float64) * 1e-2
        y, argmax = maxpool_forward(x, f, s)
        g = rng.standard_normal(y.shape)

        def loss() -> float:
            return float(np.sum(g * maxpool_forward(x, f, s)[0]))

        analytic = maxpool_backward(g, argmax, x.shape)
        return relative_error(analytic, numerical_gradient(loss, x, eps))

    errors = [trial_at(t, np.random.default_rng([seed, t])) for t in range(trials)]
    return GradCheckResult("maxpool", trials, max(errors), tolerance)


def check_softmax_xent(
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    eps: float = DEFAULT_EPS,
    tolerance: float = LAYER_TOLERANCE,
) -> GradCheckResult:
    """Softmax + cross-entropy head w.r.t. the logits."""

    def trial(rng: np.random.Generator) -> float:
        classes = int(rng.integers(2, 8))
        logits = rng.standard_normal(classes) * 2.0
        one_hot = np.zeros(classes)
        one_hot[rng.integers(classes)] = 1.0
        probs, _ = softmax_xent_forward(logits, one_hot)

        def loss() -> float:
            return softmax_xent_forward(logits, one_hot)[1]

        return relative_error(
            softmax_xent_backward(probs, one_hot), numerical_gradient(loss, logits, eps)
        )

    return _run("softmax_xent", trials, tolerance, trial, seed)


# =============================================================================
# NETWORK CHECK
# =============================================================================


def check_network(
    scale_divisor: int = 32,
    seed: int = 0,
    eps: float = DEFAULT_EPS,
    tolerance: float = NETWORK_TOLERANCE,
    input_shape: tuple[int, int, int] = (500, 18, 1),
    samples_per_tensor: int = 3,
) -> GradCheckResult:
    """
    Full forward/backward on a scaled-down network, comparing a random sample
    of coordinates from every parameter tensor.
    """
    config = ModelConfig(scale_divisor=scale_divisor, input_shape=input_shape)
    net = Network.initialize(config, seed=seed)
    rng = np.random.default_rng([seed, 1])
    x = rng.uniform(0.0, 1.0, input_shape)
    one_hot = np.zeros(config.classes)
    one_hot[rng.integers(config.classes)] = 1.0

    _, _, grads = net.forward_backward(x, one_hot)

    def loss() -> float:
        net.forward(x)
        return net.loss(one_hot)

    analytic, numeric = [], []
    for name, tensor in net.params.items():
        picks = rng.choice(tensor.size, size=min(samples_per_tensor, tensor.size), replace=False)
        analytic.append(grads[name].reshape(-1)[picks])
        numeric.append(numerical_gradient(loss, tensor, eps, picks))

    error = relative_error(np.concatenate(analytic), np.concatenate(numeric))
    logger.debug(f"gradcheck network: relative error {error:.3e}")
    return GradCheckResult(f"network/{scale_divisor}", 1, error, tolerance)


def run_gradcheck(
    scale_divisor: int = 32,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    input_shape: tuple[int, int, int] = (500, 18, 1),
) -> list[GradCheckResult]:
    """All layer checks followed by the sampled network check."""
    results = [
        check(trials=trials, seed=seed)
        for check in (check_conv, check_dense, check_relu, check_maxpool, check_softmax_xent)
    ]
    results.append(check_network(scale_divisor=scale_divisor, seed=seed, input_shape=input_shape))
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.warning(f"Gradient check failed for: {', '.join(failed)}")
    else:
        logger.info(f"Gradient check passed ({len(results)} checks)")
    return results
