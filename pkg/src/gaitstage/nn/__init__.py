"""
Layers, the staging network, checkpoints and gradient checks.

Usage:
    from gaitstage.nn import ModelConfig, Network, save_checkpoint

    net = Network.initialize(ModelConfig(scale_divisor=8), seed=7)
    probs = net.forward(window.matrix)
    save_checkpoint(net, "out/model.grfw")
"""

from .checkpoint import CHECKPOINT_MAGIC, CHECKPOINT_VERSION, load_checkpoint, save_checkpoint
from .gradcheck import (
    GradCheckResult,
    check_conv,
    check_dense,
    check_maxpool,
    check_network,
    check_relu,
    check_softmax_xent,
    numerical_gradient,
    relative_error,
    run_gradcheck,
)
from .layers import (
    ConvCache,
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
    softmax,
    softmax_xent_backward,
    softmax_xent_forward,
)
from .network import Gradients, ModelConfig, Network, Params

__all__ = [
    # Layers
    "ConvLayer",
    "ConvCache",
    "DenseLayer",
    "conv_forward",
    "conv_backward",
    "relu_forward",
    "relu_backward",
    "maxpool_forward",
    "maxpool_backward",
    "dense_forward",
    "dense_backward",
    "softmax",
    "softmax_xent_forward",
    "softmax_xent_backward",
    # Network
    "ModelConfig",
    "Network",
    "Params",
    "Gradients",
    # Checkpoints
    "save_checkpoint",
    "load_checkpoint",
    "CHECKPOINT_MAGIC",
    "CHECKPOINT_VERSION",
    # Gradient checks
    "GradCheckResult",
    "check_conv",
    "check_dense",
    "check_relu",
    "check_maxpool",
    "check_softmax_xent",
    "check_network",
    "run_gradcheck",
    "numerical_gradient",
    "relative_error",
]
