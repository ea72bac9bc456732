"""
Run configuration.

Precedence: field defaults < config file < command-line flags. Config files
are flat ``KEY=value`` text; keys are case-insensitive and ``-`` / ``_`` are
interchangeable. Unknown keys are rejected.

Example config file:
    DATA_DIR=data/gaitpdb
    DEMOGRAPHICS=data/demographics.csv
    SCALE_DIVISOR=8
    MAX_EPOCHS=30
"""

import logging
from pathlib import Path
from typing import Any, Literal

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import StorageError, UsageError
from ..ingest.schema import DEFAULT_WINDOW_LEN, WINDOW_COLUMNS
from ..nn import ModelConfig
from ..optim import AdamConfig, EarlyStopPolicy, PlateauHalving
from ..training import SplitSpec, SplitStrategy, TrainerConfig

logger = logging.getLogger(__name__)

RESOLVED_CONFIG_NAME = "resolved_config.env"


class RunConfig(BaseModel):
    """Every knob of a run, with its default."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    # Paths
    data_dir: Path | None = Field(default=None, description="Directory of record files")
    demographics: Path | None = Field(default=None, description="Demographics CSV")
    manifest: Path | None = Field(default=None, description="Optional file-name manifest (JSON)")
    dataset: Path | None = Field(
        default=None, description="Dataset container (default: <out_dir>/dataset.grfd)"
    )
    checkpoint: Path | None = Field(
        default=None, description="Checkpoint (default: <out_dir>/model.grfw)"
    )
    out_dir: Path = Field(default=Path("runs/latest"), description="Output directory")

    # Ingestion
    window_len: int = Field(default=DEFAULT_WINDOW_LEN, ge=1, description="Frames per window")
    overlap: int = Field(default=0, ge=0, description="Frames shared by consecutive windows")

    # Split
    train_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)
    split_strategy: SplitStrategy = SplitStrategy.BY_WINDOW
    stratified: bool = True
    test_fraction: float = Field(
        default=0.0,
        ge=0.0,
        lt=1.0,
        description="Share of the holdout kept as a separate test set (0 = holdout is both)",
    )
    eval_on: Literal["holdout", "all"] = Field(
        default="holdout", description="Windows scored by the eval command"
    )

    # Model
    scale_divisor: int = Field(default=1, ge=1, description="Divides filter and dense widths")
    dense_units: int = Field(default=512, ge=1)

    # Optimizer
    lr: float = Field(default=1e-3, gt=0.0)
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(default=1e-8, gt=0.0)
    batch_size: int = Field(default=32, ge=1)

    # Early stopping
    patience: int = Field(default=3, ge=1)
    min_delta: float = Field(default=1e-4, ge=0.0)
    target_accuracy: float | None = Field(default=0.97, gt=0.0, le=1.0)
    target_loss: float | None = Field(default=None, ge=0.0)
    max_epochs: int = Field(default=12, ge=1)

    # Reproducibility / execution
    seed: int = 0
    deterministic: bool = True
    workers: int = Field(default=1, ge=1)
    class_weighting: bool = False
    lr_plateau_halving: bool = False

    # -------------------------------------------------------------------------
    # Typed views for the library layer
    # -------------------------------------------------------------------------

    @property
    def dataset_path(self) -> Path:
        return self.dataset or self.out_dir / "dataset.grfd"

    @property
    def checkpoint_path(self) -> Path:
        return self.checkpoint or self.out_dir / "model.grfw"

    def to_model_config(self) -> ModelConfig:
        return ModelConfig(
            dense_units=self.dense_units,
            input_shape=(self.window_len, WINDOW_COLUMNS, 1),
            scale_divisor=self.scale_divisor,
        )

    def to_split_spec(self) -> SplitSpec:
        return SplitSpec(
            train_fraction=self.train_fraction,
            strategy=self.split_strategy,
            stratified=self.stratified,
            seed=self.seed,
        )

    def to_adam_config(self) -> AdamConfig:
        return AdamConfig(lr=self.lr, beta1=self.beta1, beta2=self.beta2, eps=self.adam_eps)

    def to_stop_policy(self) -> EarlyStopPolicy:
        return EarlyStopPolicy(
            patience=self.patience,
            min_delta=self.min_delta,
            target_accuracy=self.target_accuracy,
            target_loss=self.target_loss,
            max_epochs=self.max_epochs,
        )

    def to_trainer_config(self) -> TrainerConfig:
        return TrainerConfig(
            batch_size=self.batch_size,
            seed=self.seed,
            deterministic=self.deterministic,
            workers=self.workers,
            class_weighting=self.class_weighting,
            lr_plateau_halving=self.lr_plateau_halving,
            plateau=PlateauHalving(patience=self.patience, min_delta=self.min_delta),
        )


def _normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def _clean_file_values(raw: dict[str, str | None]) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for key, value in raw.items():
        text = (value or "").strip()
        values[_normalize_key(key)] = None if text.lower() in ("", "none", "null") else text
    return values


def load_run_config(
    path: str | Path | None = None, overrides: dict[str, Any] | None = None
) -> RunConfig:
    """
    Resolve a RunConfig from an optional config file and flag overrides.

    ``None`` overrides mean "flag not given" and are ignored.

    Raises:
        UsageError: missing config file, unknown key or invalid value
    """
    values: dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise UsageError(f"Config file not found: {path}")
        values.update(_clean_file_values(dotenv_values(path)))
        logger.debug(f"Loaded {len(values)} settings from {path}")

    for key, value in (overrides or {}).items():
        if value is not None:
            values[_normalize_key(key)] = value

    try:
        return RunConfig(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
            for err in e.errors()
        )
        raise UsageError(f"Invalid configuration: {problems}") from e


def format_config(config: RunConfig) -> str:
    """``KEY=value`` lines in field order; unset optionals are left empty."""
    lines = []
    for name, value in config.model_dump(mode="json").items():
        lines.append(f"{name.upper()}={'' if value is None else value}")
    return "\n".join(lines) + "\n"


def write_resolved_config(config: RunConfig, out_dir: str | Path | None = None) -> Path:
    """Write the resolved configuration next to a run's outputs."""
    out_dir = Path(out_dir) if out_dir is not None else config.out_dir
    path = out_dir / RESOLVED_CONFIG_NAME
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(format_config(config), encoding="utf-8")
    except OSError as e:
        raise StorageError(f"Cannot write {path}: {e}") from e
    return path
