"""
The staging CNN: four [conv 3x3 -> ReLU -> max-pool 2x2/2] blocks, flatten,
a ReLU dense layer and a 4-way softmax output.

Parameters live in one ordered ``dict[str, ndarray]`` (``conv1.weights``,
``conv1.bias``, ..., ``dense.weights``, ``dense.bias``, ``output.weights``,
``output.bias``), which is what the optimizer and checkpoints operate on.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from ..errors import ShapeError, StateError
from ..tensor import IndexMap, ShapeSpec, Tensor, flatten, pool_output_shape
from .layers import (
    XENT_CLIP,
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
    scaled_normal,
    softmax,
    softmax_xent_backward,
)

logger = logging.getLogger(__name__)

Params = dict[str, Tensor]
Gradients = dict[str, Tensor]


@dataclass(frozen=True)
class ModelConfig:
    """Architecture hyperparameters; defaults reproduce the full-size model."""

    conv_filters: tuple[int, ...] = (128, 256, 512, 1024)
    kernel: int = 3
    conv_padding: int = 1
    pool_size: int = 2
    pool_stride: int = 2
    dense_units: int = 512
    classes: int = 4
    input_shape: tuple[int, int, int] = (500, 18, 1)
    scale_divisor: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "conv_filters", tuple(int(f) for f in self.conv_filters))
        object.__setattr__(self, "input_shape", tuple(int(d) for d in self.input_shape))
        if len(self.conv_filters) != 4:
            raise ValueError(f"Exactly 4 conv blocks required, got {len(self.conv_filters)}")
        if self.scale_divisor < 1:
            raise ValueError(f"scale_divisor must be >= 1, got {self.scale_divisor}")
        if min(self.filters) < 1 or self.hidden_units < 1:
            raise ValueError(
                f"scale_divisor {self.scale_divisor} leaves a layer with no units "
                f"(filters {self.filters}, dense {self.hidden_units})"
            )
        # Raises ShapeError if the pooling chain collapses
        self.block_shapes()

    @property
    def filters(self) -> tuple[int, ...]:
        """Filter counts after scale_divisor."""
        return tuple(f // self.scale_divisor for f in self.conv_filters)

    @property
    def hidden_units(self) -> int:
        """Dense width after scale_divisor."""
        return self.dense_units // self.scale_divisor

    def block_shapes(self) -> list[tuple[tuple[int, int, int], tuple[int, int, int]]]:
        """(after conv, after pool) shape per block."""
        h, w, _ = self.input_shape
        shapes = []
        for n_filters in self.filters:
            conv_h, conv_w, _ = pool_output_shape(
                ShapeSpec(n_h=h, n_w=w, n_c=n_filters, f=self.kernel, s=1, p=self.conv_padding)
            )
            h, w, _ = pool_output_shape(
                ShapeSpec(
                    n_h=conv_h, n_w=conv_w, n_c=n_filters, f=self.pool_size, s=self.pool_stride
                )
            )
            shapes.append(((conv_h, conv_w, n_filters), (h, w, n_filters)))
        return shapes

    @property
    def flatten_size(self) -> int:
        h, w, c = self.block_shapes()[-1][1]
        return h * w * c

    def shape_chain(self) -> list[tuple[int, ...]]:
        """Output shape of every conv, pool, flatten, dense and output stage in order."""
        chain: list[tuple[int, ...]] = []
        for conv_shape, pool_shape in self.block_shapes():
            chain.extend([conv_shape, pool_shape])
        chain.extend([(self.flatten_size,), (self.hidden_units,), (self.classes,)])
        return chain

    def parameter_shapes(self) -> dict[str, tuple[int, ...]]:
        """Ordered parameter names and shapes."""
        shapes: dict[str, tuple[int, ...]] = {}
        c_in = self.input_shape[2]
        for i, n_filters in enumerate(self.filters, start=1):
            shapes[f"conv{i}.weights"] = (self.kernel, self.kernel, c_in, n_filters)
            shapes[f"conv{i}.bias"] = (n_filters,)
            c_in = n_filters
        shapes["dense.weights"] = (self.flatten_size, self.hidden_units)
        shapes["dense.bias"] = (self.hidden_units,)
        shapes["output.weights"] = (self.hidden_units, self.classes)
        shapes["output.bias"] = (self.classes,)
        return shapes

    def parameter_count(self) -> int:
        return sum(int(np.prod(s)) for s in self.parameter_shapes().values())

    def describe(self) -> list[dict[str, Any]]:
        """Per-layer table: layer, filters / units, output shape, parameter count."""
        shapes = self.parameter_shapes()

        def row(layer: str, units: int, output: tuple[int, ...], params: int) -> dict[str, Any]:
            return {"layer": layer, "units": units, "output": output, "params": params}

        rows = []
        for i, (conv_shape, pool_shape) in enumerate(self.block_shapes(), start=1):
            n_params = int(np.prod(shapes[f"conv{i}.weights"])) + conv_shape[2]
            rows.append(row(f"conv{i}", conv_shape[2], conv_shape, n_params))
            rows.append(row(f"pool{i}", pool_shape[2], pool_shape, 0))
        rows.append(row("flatten", self.flatten_size, (self.flatten_size,), 0))
        for name, units in (("dense", self.hidden_units), ("output", self.classes)):
            n_params = int(np.prod(shapes[f"{name}.weights"])) + units
            rows.append(row(name, units, (units,), n_params))
        return rows

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["conv_filters"] = list(self.conv_filters)
        data["input_shape"] = list(self.input_shape)
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ModelConfig":
        data = {**data}
        data["conv_filters"] = tuple(data["conv_filters"])
        data["input_shape"] = tuple(data["input_shape"])
        return cls(**data)


@dataclass
class BlockCache:
    """Activations of one conv block kept for the backward pass."""

    conv: ConvCache
    pre_activation: Tensor
    pool_argmax: IndexMap
    pool_input_shape: tuple[int, ...]


@dataclass
class ForwardCache:
    blocks: list[BlockCache] = field(default_factory=list)
    pooled_shape: tuple[int, ...] = ()
    flat: Tensor | None = None
    hidden_pre: Tensor | None = None
    hidden: Tensor | None = None
    probs: Tensor | None = None


class Network:
    """
    The staging CNN with its parameters and the activation cache of the last forward pass.

    A Network is not safe to share across threads while running forward/backward;
    use ``replica()`` to get an instance sharing the parameters with its own cache.

    Example:
        net = Network.initialize(ModelConfig(scale_divisor=8), seed=7)
        probs = net.forward(window.matrix)
        loss = net.loss(label.one_hot())
        grads = net.backward(label.one_hot())
    """

    def __init__(self, config: ModelConfig, params: Params, seed: int | None = None):
        expected = config.parameter_shapes()
        if list(params) != list(expected):
            raise ShapeError(f"Parameter names {list(params)} do not match {list(expected)}")
        for name, shape in expected.items():
            if params[name].shape != shape:
                raise ShapeError(f"{name}: shape {params[name].shape}, expected {shape}")
        self.config = config
        self.params = params
        self.seed = seed
        self._cache: ForwardCache | None = None

    @classmethod
    def initialize(cls, config: ModelConfig, seed: int = 0) -> "Network":
        """
        Fresh network: normal weights with std sqrt(2 / fan_in) for layers feeding
        ReLU, sqrt(1 / fan_in) for the softmax output, zero biases.
        """
        rng = np.random.default_rng(seed)
        params: Params = {}
        for name, shape in config.parameter_shapes().items():
            if name.endswith(".bias"):
                params[name] = np.zeros(shape, dtype=np.float64)
                continue
            fan_in = int(np.prod(shape[:-1]))
            gain = 1.0 if name.startswith("output") else 2.0
            params[name] = scaled_normal(shape, fan_in, rng, gain)
        logger.info(
            f"Initialized network: filters={config.filters}, dense={config.hidden_units}, "
            f"{config.parameter_count():,} parameters, seed={seed}"
        )
        return cls(config, params, seed)

    def replica(self) -> "Network":
        """Network sharing these parameter arrays, with an empty cache."""
        return Network(self.config, self.params, self.seed)

    def conv_layer(self, block: int) -> ConvLayer:
        return ConvLayer(
            weights=self.params[f"conv{block}.weights"],
            bias=self.params[f"conv{block}.bias"],
            padding=self.config.conv_padding,
        )

    def dense_layer(self, name: str) -> DenseLayer:
        return DenseLayer(weights=self.params[f"{name}.weights"], bias=self.params[f"{name}.bias"])

    def _as_input(self, x: Tensor) -> Tensor:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 2:
            x = x[:, :, None]
        if x.shape != self.config.input_shape:
            raise ShapeError(f"Input shape {x.shape}, expected {self.config.input_shape}")
        return x

    def forward(self, x: Tensor) -> Tensor:
        """
        Class probabilities for one window.

        Args:
            x: (h, w) or (h, w, 1) normalized window

        Returns:
            probs of shape (classes,)
        """
        a = self._as_input(x)
        cache = ForwardCache()
        for block in range(1, len(self.config.filters) + 1):
            z, conv_cache = conv_forward(a, self.conv_layer(block))
            r = relu_forward(z)
            a, argmax = maxpool_forward(r, self.config.pool_size, self.config.pool_stride)
            cache.blocks.append(BlockCache(conv_cache, z, argmax, r.shape))

        cache.pooled_shape = a.shape
        cache.flat = flatten(a)
        cache.hidden_pre = dense_forward(cache.flat, self.dense_layer("dense"))
        cache.hidden = relu_forward(cache.hidden_pre)
        logits = dense_forward(cache.hidden, self.dense_layer("output"))
        cache.probs = softmax(logits)
        self._cache = cache
        return cache.probs

    def loss(self, one_hot: Tensor) -> float:
        """Cross-entropy of the last forward pass against ``one_hot``."""
        if self._cache is None or self._cache.probs is None:
            raise StateError("loss() called before forward()")
        return float(-np.sum(one_hot * np.log(self._cache.probs + XENT_CLIP)))

    def backward(self, one_hot: Tensor, weight: float = 1.0) -> Gradients:
        """
        Gradients of ``weight * cross_entropy`` for every parameter tensor.

        Raises:
            StateError: no forward pass cached
        """
        cache = self._cache
        if cache is None or cache.probs is None:
            raise StateError("backward() called before forward()")

        grads: Gradients = {}
        g = softmax_xent_backward(cache.probs, one_hot) * weight

        g, grads["output.weights"], grads["output.bias"] = dense_backward(
            g, cache.hidden, self.dense_layer("output")
        )
        g = relu_backward(g, cache.hidden_pre)
        g, grads["dense.weights"], grads["dense.bias"] = dense_backward(
            g, cache.flat, self.dense_layer("dense")
        )

        g = g.reshape(cache.pooled_shape)
        for block in range(len(cache.blocks), 0, -1):
            bc = cache.blocks[block - 1]
            g = maxpool_backward(g, bc.pool_argmax, bc.pool_input_shape)
            g = relu_backward(g, bc.pre_activation)
            g, grads[f"conv{block}.weights"], grads[f"conv{block}.bias"] = conv_backward(
                g, bc.conv, self.conv_layer(block)
            )

        return {name: grads[name] for name in self.params}

    def forward_backward(
        self, x: Tensor, one_hot: Tensor, weight: float = 1.0
    ) -> tuple[float, Tensor, Gradients]:
        """(loss, probs, gradients) for one labeled window."""
        probs = self.forward(x)
        return weight * self.loss(one_hot), probs, self.backward(one_hot, weight)
