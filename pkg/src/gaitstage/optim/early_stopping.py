"""
Early-stopping control for the training loop.

Three triggers, checked after every epoch on the validation metrics:
    target      validation accuracy reached target_accuracy (and, when
                target_loss is set, validation loss at or below it)
    plateau     no validation-loss improvement larger than min_delta for
                ``patience`` consecutive epochs
    max_epochs  the epoch budget is spent
When several fire on the same epoch the reason reported is the first in that order.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Protocol


class StopReason(str, Enum):
    PLATEAU = "plateau"
    TARGET = "target"
    MAX_EPOCHS = "max_epochs"


class EpochMetrics(Protocol):
    val_loss: float
    val_accuracy: float


@dataclass(frozen=True)
class EarlyStopPolicy:
    patience: int = 3
    min_delta: float = 1e-4
    target_accuracy: float | None = 0.97
    target_loss: float | None = None
    max_epochs: int = 12

    def __post_init__(self) -> None:
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")
        if self.target_accuracy is not None and not 0.0 < self.target_accuracy <= 1.0:
            raise ValueError(f"target_accuracy must be in (0, 1], got {self.target_accuracy}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.min_delta < 0:
            raise ValueError(f"min_delta must be >= 0, got {self.min_delta}")


@dataclass(frozen=True)
class StopDecision:
    stop: bool
    reason: StopReason | None = None

    @classmethod
    def keep_going(cls) -> "StopDecision":
        return cls(stop=False)


def epochs_since_improvement(val_losses: Sequence[float], min_delta: float) -> int:
    """Trailing epochs whose loss did not beat the running best by more than min_delta."""
    if not val_losses:
        return 0
    best = val_losses[0]
    since = 0
    for loss in val_losses[1:]:
        if best - loss > min_delta:
            best = loss
            since = 0
        else:
            since += 1
    return since


def early_stop_check(policy: EarlyStopPolicy, history: Sequence[EpochMetrics]) -> StopDecision:
    """Decide whether training stops after the last epoch in ``history``."""
    if not history:
        return StopDecision.keep_going()

    last = history[-1]
    if policy.target_accuracy is not None and last.val_accuracy >= policy.target_accuracy:
        if policy.target_loss is None or last.val_loss <= policy.target_loss:
            return StopDecision(True, StopReason.TARGET)

    losses = [epoch.val_loss for epoch in history]
    if epochs_since_improvement(losses, policy.min_delta) >= policy.patience:
        return StopDecision(True, StopReason.PLATEAU)

    if len(history) >= policy.max_epochs:
        return StopDecision(True, StopReason.MAX_EPOCHS)

    return StopDecision.keep_going()
