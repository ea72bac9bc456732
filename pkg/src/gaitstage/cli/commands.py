"""
Command implementations behind the ``gaitstage`` subcommands.

Each command takes a resolved RunConfig, writes its outputs under
``config.out_dir`` (plus ``resolved_config.env``), prints a short summary and
returns a result object for programmatic use.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from ..errors import NumericError, StorageError, UsageError
from ..ingest import (
    DatasetBuildResult,
    build_dataset,
    export_spectrogram,
    format_summary,
    label_record,
    load_dataset,
    load_demographics,
    normalize_window,
    read_record,
    resample_record,
    save_dataset,
    window_record,
)
from ..ingest.schema import CLASS_ORDER, ClassLabel, LabeledDataset
from ..metrics import ClassReport, ConfusionMatrix, report
from ..nn import GradCheckResult, Network, load_checkpoint, run_gradcheck, save_checkpoint
from ..training import TrainHistory, evaluate, predict, split_dataset, split_holdout, train
from .config import RunConfig, write_resolved_config

logger = logging.getLogger(__name__)


@dataclass
class EvaluationOutcome:
    confusion: ConfusionMatrix
    report: ClassReport
    mean_loss: float
    paths: dict[str, Path] = field(default_factory=dict)


@dataclass
class TrainOutcome:
    history: TrainHistory
    evaluation: EvaluationOutcome
    checkpoint: Path


@dataclass
class WindowPrediction:
    window_index: int
    label: ClassLabel
    probs: list[float]


@dataclass
class PredictionOutcome:
    """Per-window predictions and the modal class over the record."""

    source: str
    windows: list[WindowPrediction]
    verdict: ClassLabel
    votes: int
    actual: ClassLabel | None = None

    @property
    def total(self) -> int:
        return len(self.windows)

    def summary(self) -> str:
        line = f"{self.source}: {self.verdict.display_name} ({self.votes}/{self.total} windows)"
        if self.actual is not None:
            line += f", actual {self.actual.display_name}"
        return line


def _write_csv(frame: pd.DataFrame, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False)
    except OSError as e:
        raise StorageError(f"Cannot write {path}: {e}") from e
    return path


def _write_text(text: str, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise StorageError(f"Cannot write {path}: {e}") from e
    return path


def _evaluation_split(config: RunConfig, dataset: LabeledDataset) -> LabeledDataset:
    """The windows a trained model is scored on: test set, holdout, or everything."""
    if config.eval_on == "all":
        return dataset
    _, holdout = split_dataset(dataset, config.to_split_spec())
    if config.test_fraction > 0:
        _, test = split_holdout(holdout, config.test_fraction, config.seed)
        return test
    return holdout


def _write_evaluation(net: Network, eval_set: LabeledDataset, out_dir: Path) -> EvaluationOutcome:
    cm, mean_loss = evaluate(net, eval_set)
    class_report = report(cm)
    paths = {
        "confusion_matrix": cm.to_csv(out_dir / "confusion_matrix.csv"),
        "report_csv": class_report.to_csv(out_dir / "report.csv"),
        "report_txt": _write_text(
            class_report.render() + "\n" + cm.render(), out_dir / "report.txt"
        ),
    }
    return EvaluationOutcome(confusion=cm, report=class_report, mean_loss=mean_loss, paths=paths)


# =============================================================================
# INGEST / EXPORT
# =============================================================================


def cmd_ingest(config: RunConfig) -> DatasetBuildResult:
    """Build the dataset container and the per-class / per-group summaries."""
    if config.data_dir is None or config.demographics is None:
        raise UsageError("ingest needs --data-dir and --demographics")

    result = build_dataset(
        config.data_dir,
        config.demographics,
        window_len=config.window_len,
        overlap=config.overlap,
        manifest_path=config.manifest,
        workers=config.workers,
    )
    out_dir = config.out_dir
    save_dataset(result.dataset, out_dir / "dataset.grfd")
    _write_csv(result.summary_frame(), out_dir / "class_counts.csv")
    _write_csv(result.cohort_frame(), out_dir / "cohort_summary.csv")
    summary = format_summary(result)
    _write_text(summary, out_dir / "ingest_summary.txt")
    write_resolved_config(config)

    print(summary, end="")
    return result


def cmd_export_images(config: RunConfig) -> list[Path]:
    """One PNG per window: ``<index>_<class>_<subject>_<window>.png``."""
    dataset = load_dataset(config.dataset_path)
    image_dir = config.out_dir / "images"
    paths = []
    for i, window in enumerate(dataset.windows):
        name = f"{i:05d}_{window.label.value}_{window.subject_id}_{window.window_index:03d}.png"
        paths.append(export_spectrogram(window, image_dir / name))
    write_resolved_config(config)
    logger.info(f"Exported {len(paths)} spectrograms to {image_dir}")
    print(f"Exported {len(paths)} images to {image_dir}")
    return paths


# =============================================================================
# TRAIN / EVAL
# =============================================================================


def cmd_train(config: RunConfig) -> TrainOutcome:
    """Split, train, save the best checkpoint and report on the evaluation split."""
    dataset = load_dataset(config.dataset_path)
    window_len = dataset.provenance.window_len
    if window_len != config.window_len:
        logger.info(f"Using the dataset's window length {window_len}")
        config = config.model_copy(update={"window_len": window_len})

    train_set, holdout = split_dataset(dataset, config.to_split_spec())
    validation, test = holdout, holdout
    if config.test_fraction > 0:
        validation, test = split_holdout(holdout, config.test_fraction, config.seed)

    model_config = config.to_model_config()
    net = Network.initialize(model_config, seed=config.seed)
    net, history = train(
        net,
        train_set,
        validation,
        adam=config.to_adam_config(),
        policy=config.to_stop_policy(),
        config=config.to_trainer_config(),
    )

    out_dir = config.out_dir
    checkpoint = save_checkpoint(
        net,
        config.checkpoint_path,
        metadata={
            "best_epoch": history.best_epoch,
            "stop_reason": history.stop_reason.value if history.stop_reason else None,
            "dataset_digest": dataset.provenance.manifest_digest,
            "split_seed": config.seed,
        },
    )
    history.to_csv(out_dir / "history.csv")
    evaluation = _write_evaluation(net, test, out_dir)
    write_resolved_config(config)

    print(evaluation.report.render(), end="")
    return TrainOutcome(history=history, evaluation=evaluation, checkpoint=checkpoint)


def cmd_eval(config: RunConfig) -> EvaluationOutcome:
    """Score a checkpoint on the configured evaluation split."""
    net, _ = load_checkpoint(config.checkpoint_path)
    dataset = load_dataset(config.dataset_path)
    evaluation = _write_evaluation(net, _evaluation_split(config, dataset), config.out_dir)
    write_resolved_config(config)

    print(evaluation.report.render(), end="")
    print(evaluation.confusion.render(), end="")
    return evaluation


# =============================================================================
# PREDICT / GRADCHECK
# =============================================================================


def cmd_predict(config: RunConfig, record_path: str | Path) -> PredictionOutcome:
    """
    Window and normalize a raw record, classify every window and report the
    modal class with its vote count. Vote ties go to the lowest class index.
    """
    net, _ = load_checkpoint(config.checkpoint_path)
    record = resample_record(read_record(record_path))

    actual = None
    if config.demographics is not None:
        try:
            actual = label_record(record, load_demographics(config.demographics))
        except (UsageError, ValueError) as e:
            logger.debug(f"No reference label for {record.subject_id}: {e}")

    window_len = net.config.input_shape[0]
    # Window labels are placeholders; prediction never reads them
    windows = window_record(record, actual or ClassLabel.HEALTHY, window_len, config.overlap)
    if not windows:
        raise UsageError(f"{record.source}: shorter than one {window_len}-frame window")

    predictions = []
    for window in windows:
        label, probs = predict(net, normalize_window(window))
        predictions.append(WindowPrediction(window.window_index, label, probs.tolist()))

    votes = Counter(p.label for p in predictions)
    verdict = min(votes, key=lambda label: (-votes[label], label.index))
    outcome = PredictionOutcome(
        source=record.source,
        windows=predictions,
        verdict=verdict,
        votes=votes[verdict],
        actual=actual,
    )

    frame = pd.DataFrame(
        [
            {"window": p.window_index, "predicted": p.label.display_name}
            | {f"p_{label.value}": prob for label, prob in zip(CLASS_ORDER, p.probs, strict=True)}
            for p in predictions
        ]
    )
    _write_csv(frame, config.out_dir / f"predictions_{Path(record_path).stem}.csv")
    write_resolved_config(config)

    print(outcome.summary())
    return outcome


def cmd_gradcheck(config: RunConfig, trials: int = 20) -> list[GradCheckResult]:
    """
    Run the finite-difference suite and write ``gradcheck.csv``.

    Raises:
        NumericError: any check exceeded its tolerance
    """
    results = run_gradcheck(
        scale_divisor=config.scale_divisor,
        trials=trials,
        seed=config.seed,
        input_shape=config.to_model_config().input_shape,
    )
    frame = pd.DataFrame([r.to_dict() for r in results])
    _write_csv(frame, config.out_dir / "gradcheck.csv")
    write_resolved_config(config)

    print(f"{'Check':<16}{'Trials':>8}{'Max rel. error':>18}{'Tolerance':>12}  Result")
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(
            f"{r.name:<16}{r.trials:>8}{r.max_relative_error:>18.3e}{r.tolerance:>12.0e}  {status}"
        )

    failed = [r.name for r in results if not r.passed]
    if failed:
        raise NumericError(f"Gradient check failed: {', '.join(failed)}")
    return results
