"""
Adam updates and early stopping.

Usage:
    from gaitstage.optim import AdamState, adam_step, early_stop_check

    state = AdamState.zeros_like(net.params)
    net.params, state = adam_step(net.params, grads, state)
"""

from .adam import AdamConfig, AdamState, PlateauHalving, adam_step
from .early_stopping import (
    EarlyStopPolicy,
    StopDecision,
    StopReason,
    early_stop_check,
    epochs_since_improvement,
)

__all__ = [
    "AdamConfig",
    "AdamState",
    "adam_step",
    "PlateauHalving",
    "EarlyStopPolicy",
    "StopDecision",
    "StopReason",
    "early_stop_check",
    "epochs_since_improvement",
]
