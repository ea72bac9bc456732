"""
Splitting, the training loop, evaluation and prediction.

Usage:
    from gaitstage.training import SplitSpec, split_dataset, train, evaluate

    train_set, holdout = split_dataset(dataset, SplitSpec(seed=7))
    net, history = train(net, train_set, holdout)
    cm, loss = evaluate(net, holdout)
"""

from .history import HISTORY_COLUMNS, EpochRecord, TrainHistory
from .split import SplitSpec, SplitStrategy, split_dataset, split_holdout
from .trainer import TrainerConfig, class_weights, evaluate, label_from_probs, predict, train

__all__ = [
    "SplitSpec",
    "SplitStrategy",
    "split_dataset",
    "split_holdout",
    "EpochRecord",
    "TrainHistory",
    "HISTORY_COLUMNS",
    "TrainerConfig",
    "class_weights",
    "train",
    "evaluate",
    "predict",
    "label_from_probs",
]
