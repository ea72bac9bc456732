"""
Adam with bias correction, as a pure function of (params, grads, state).

The update for every parameter tensor at step t (incremented before use):

    m <- b1 * m + (1 - b1) * g
    v <- b2 * v + (1 - b2) * g^2
    p <- p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import NumericError, ShapeError
from ..tensor import Tensor
from .early_stopping import epochs_since_improvement

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdamConfig:
    """Adam hyperparameters."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError(f"betas must be in [0, 1), got {self.beta1}, {self.beta2}")
        if self.eps <= 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")


@dataclass(frozen=True)
class AdamState:
    """First/second moments per parameter tensor, step count and hyperparameters."""

    m: dict[str, Tensor]
    v: dict[str, Tensor]
    t: int = 0
    config: AdamConfig = field(default_factory=AdamConfig)

    @classmethod
    def zeros_like(cls, params: dict[str, Tensor], config: AdamConfig | None = None) -> "AdamState":
        return cls(
            m={name: np.zeros_like(p) for name, p in params.items()},
            v={name: np.zeros_like(p) for name, p in params.items()},
            t=0,
            config=config or AdamConfig(),
        )

    def with_lr(self, lr: float) -> "AdamState":
        return replace(self, config=replace(self.config, lr=lr))


def adam_step(
    params: dict[str, Tensor], grads: dict[str, Tensor], state: AdamState
) -> tuple[dict[str, Tensor], AdamState]:
    """
    One Adam update. Inputs are not modified.

    Returns:
        (new_params, new_state)

    Raises:
        ShapeError: parameter, gradient and moment names or shapes disagree
        NumericError: a gradient holds NaN or Inf (names the tensor)
    """
    if set(grads) != set(params) or set(state.m) != set(params):
        missing = set(params) ^ set(grads)
        raise ShapeError(f"Parameter / gradient names disagree: {sorted(missing) or 'moments'}")

    cfg = state.config
    t = state.t + 1
    bc1 = 1.0 - cfg.beta1**t
    bc2 = 1.0 - cfg.beta2**t

    new_params: dict[str, Tensor] = {}
    new_m: dict[str, Tensor] = {}
    new_v: dict[str, Tensor] = {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape or state.m[name].shape != p.shape:
            raise ShapeError(f"{name}: gradient shape {g.shape} vs parameter shape {p.shape}")
        if not np.all(np.isfinite(g)):
            raise NumericError(f"Non-finite gradient in parameter tensor {name}")

        m = cfg.beta1 * state.m[name] + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * state.v[name] + (1.0 - cfg.beta2) * (g * g)
        new_params[name] = p - cfg.lr * (m / bc1) / (np.sqrt(v / bc2) + cfg.eps)
        new_m[name] = m
        new_v[name] = v

    return new_params, AdamState(m=new_m, v=new_v, t=t, config=cfg)


@dataclass(frozen=True)
class PlateauHalving:
    """
    Optional learning-rate schedule: halve the rate each time validation loss
    has gone ``patience`` epochs without improving by more than ``min_delta``.
    """

    patience: int = 2
    min_delta: float = 1e-4
    factor: float = 0.5
    min_lr: float = 1e-6

    def next_lr(self, lr: float, val_losses: list[float]) -> float:
        since_best = epochs_since_improvement(val_losses, self.min_delta)
        if since_best > 0 and since_best % self.patience == 0:
            new_lr = max(lr * self.factor, self.min_lr)
            if new_lr < lr:
                logger.info(f"Validation loss plateaued for {since_best} epochs, lr -> {new_lr:g}")
            return new_lr
        return lr
