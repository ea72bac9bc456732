"""
Mini-batch training loop, evaluation and single-window prediction.

Each epoch reshuffles the training windows with ``default_rng([seed, epoch])``,
averages per-window gradients over each mini-batch, applies one Adam step per
batch and then scores the full training and holdout sets. Training ends when
the early-stopping policy fires; the weights of the epoch with the lowest
holdout loss are restored.
"""

import logging
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataFormatError, EmptyDatasetError, NumericError
from ..ingest.schema import CLASS_ORDER, ClassLabel, GrfWindow, LabeledDataset
from ..metrics import ConfusionMatrix, accuracy
from ..nn import Gradients, Network, Params
from ..optim import (
    AdamConfig,
    AdamState,
    EarlyStopPolicy,
    PlateauHalving,
    adam_step,
    early_stop_check,
)
from ..tensor import Tensor
from .history import EpochRecord, TrainHistory

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainerConfig:
    """
    Loop settings.

    ``workers`` > 1 computes per-window gradients in parallel threads; it is
    forced to 1 when ``deterministic`` is set.
    """

    batch_size: int = 32
    seed: int = 0
    deterministic: bool = True
    workers: int = 1
    class_weighting: bool = False
    lr_plateau_halving: bool = False
    plateau: PlateauHalving = field(default_factory=PlateauHalving)

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    @property
    def effective_workers(self) -> int:
        return 1 if self.deterministic else self.workers


def class_weights(ds: LabeledDataset) -> dict[ClassLabel, float]:
    """Inverse-frequency weights n / (k * n_c) over the k classes present."""
    present = {label: n for label, n in ds.class_counts.items() if n > 0}
    return {
        label: len(ds) / (len(present) * present[label]) if label in present else 0.0
        for label in CLASS_ORDER
    }


def label_from_probs(probs: Tensor) -> ClassLabel:
    """Most probable class; ties go to the lowest class index."""
    return ClassLabel.from_index(int(np.argmax(probs)))


def _batch_gradients(
    net: Network,
    windows: list[GrfWindow],
    weights: dict[ClassLabel, float] | None,
    workers: int,
) -> tuple[float, Gradients]:
    def one(pair: tuple[Network, GrfWindow]) -> tuple[float, Gradients]:
        model, window = pair
        w = weights[window.label] if weights else 1.0
        loss, _, grads = model.forward_backward(window.matrix, window.label.one_hot(), w)
        return loss, grads

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, [(net.replica(), w) for w in windows]))
    else:
        results = [one((net, w)) for w in windows]

    total_loss = 0.0
    total = {name: np.zeros_like(p) for name, p in net.params.items()}
    for loss, grads in results:
        total_loss += loss
        for name, g in grads.items():
            total[name] += g
    n = len(windows)
    return total_loss / n, {name: g / n for name, g in total.items()}


def _non_finite_tensor(tensors: dict[str, Tensor]) -> str | None:
    for name, tensor in tensors.items():
        if not np.all(np.isfinite(tensor)):
            return name
    return None


def train(
    net: Network,
    train_set: LabeledDataset,
    holdout_set: LabeledDataset,
    adam: AdamConfig | None = None,
    policy: EarlyStopPolicy | None = None,
    config: TrainerConfig | None = None,
    on_epoch: Callable[[EpochRecord], None] | None = None,
) -> tuple[Network, TrainHistory]:
    """
    Train ``net`` in place and return it with the history.

    Raises:
        EmptyDatasetError: either set is empty
        NumericError: a loss, gradient or parameter became non-finite; the
            message names the epoch, batch and parameter tensor
    """
    adam = adam or AdamConfig()
    policy = policy or EarlyStopPolicy()
    config = config or TrainerConfig()
    if len(train_set) == 0 or len(holdout_set) == 0:
        raise EmptyDatasetError(
            f"Training needs non-empty sets (train={len(train_set)}, holdout={len(holdout_set)})"
        )
    if config.workers > 1 and config.deterministic:
        logger.warning("Deterministic mode: running with 1 worker")

    weights = class_weights(train_set) if config.class_weighting else None
    workers = config.effective_workers
    state = AdamState.zeros_like(net.params, adam)
    history = TrainHistory()
    best_loss = np.inf
    best_params: Params = dict(net.params)
    n = len(train_set)

    logger.info(
        f"Training on {n} windows, holdout {len(holdout_set)}, batch {config.batch_size}, "
        f"lr {adam.lr:g}, max {policy.max_epochs} epochs"
    )

    for epoch in range(1, policy.max_epochs + 1):
        started = time.perf_counter()
        order = np.random.default_rng([config.seed, epoch]).permutation(n)

        for batch, start in enumerate(range(0, n, config.batch_size), start=1):
            windows = [train_set.windows[i] for i in order[start : start + config.batch_size]]
            try:
                loss, grads = _batch_gradients(net, windows, weights, workers)
            except NumericError as e:
                bad = _non_finite_tensor(net.params) or "logits"
                raise NumericError(f"epoch {epoch}, batch {batch}, tensor {bad}: {e}") from e
            if not np.isfinite(loss):
                bad = _non_finite_tensor(grads) or _non_finite_tensor(net.params) or "loss"
                raise NumericError(
                    f"Non-finite loss {loss} at epoch {epoch}, batch {batch} (tensor {bad})"
                )
            try:
                net.params, state = adam_step(net.params, grads, state)
            except NumericError as e:
                raise NumericError(f"epoch {epoch}, batch {batch}: {e}") from e

        train_cm, train_loss = evaluate(net, train_set)
        val_cm, val_loss = evaluate(net, holdout_set)
        record = EpochRecord(
            epoch=epoch,
            train_loss=train_loss,
            train_accuracy=accuracy(train_cm),
            val_loss=val_loss,
            val_accuracy=accuracy(val_cm),
            learning_rate=state.config.lr,
            wall_seconds=time.perf_counter() - started,
        )
        history.append(record)
        logger.info(
            f"Epoch {epoch}: loss {train_loss:.4f} acc {record.train_accuracy:.4f} | "
            f"val_loss {val_loss:.4f} val_acc {record.val_accuracy:.4f} "
            f"({record.wall_seconds:.1f}s)"
        )
        if on_epoch:
            on_epoch(record)

        if val_loss < best_loss:
            best_loss = val_loss
            best_params = dict(net.params)
            history.best_epoch = epoch

        if config.lr_plateau_halving:
            lr = config.plateau.next_lr(state.config.lr, history.val_losses)
            if lr != state.config.lr:
                state = state.with_lr(lr)

        decision = early_stop_check(policy, history.epochs)
        if decision.stop:
            history.stop_reason = decision.reason
            break

    net.params = best_params
    reason = history.stop_reason.value if history.stop_reason else "-"
    logger.info(
        f"Stopped after {len(history)} epochs ({reason}), "
        f"restored epoch {history.best_epoch} (val_loss {best_loss:.4f})"
    )
    return net, history


def evaluate(net: Network, ds: LabeledDataset) -> tuple[ConfusionMatrix, float]:
    """
    Confusion matrix of argmax predictions and the mean cross-entropy over ``ds``.

    Raises:
        EmptyDatasetError: ``ds`` has no windows
    """
    if len(ds) == 0:
        raise EmptyDatasetError("Cannot evaluate an empty dataset")
    cm = ConfusionMatrix.zeros()
    total_loss = 0.0
    for window in ds.windows:
        probs = net.forward(window.matrix)
        total_loss += net.loss(window.label.one_hot())
        cm.add(window.label, label_from_probs(probs))
    return cm, total_loss / len(ds)


def predict(net: Network, window: GrfWindow | Tensor) -> tuple[ClassLabel, Tensor]:
    """
    Classify one normalized window.

    Raises:
        DataFormatError: window is not normalized
        ShapeError: window shape does not match the network input
    """
    if isinstance(window, GrfWindow):
        if not window.normalized:
            raise DataFormatError(f"Window {window.source}#{window.window_index} is not normalized")
        window = window.matrix
    probs = net.forward(window)
    return label_from_probs(probs), probs.copy()
