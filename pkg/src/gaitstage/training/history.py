"""Per-epoch training history."""

from dataclasses import asdict, dataclass, field
from pathlib import Path

import pandas as pd

from ..errors import StateError, StorageError
from ..optim import StopReason

# EpochRecord field -> history.csv column
CSV_COLUMNS = {
    "epoch": "epoch",
    "train_loss": "train_loss",
    "train_accuracy": "train_acc",
    "val_loss": "val_loss",
    "val_accuracy": "val_acc",
    "learning_rate": "learning_rate",
}
HISTORY_COLUMNS = list(CSV_COLUMNS.values())


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    train_accuracy: float
    val_loss: float
    val_accuracy: float
    learning_rate: float
    # logged only, not written to history.csv
    wall_seconds: float = 0.0

    def __post_init__(self) -> None:
        if self.train_loss < 0 or self.val_loss < 0:
            raise ValueError(f"Epoch {self.epoch}: negative loss")
        for value in (self.train_accuracy, self.val_accuracy):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"Epoch {self.epoch}: accuracy {value} outside [0, 1]")


@dataclass
class TrainHistory:
    """Epoch records numbered contiguously from 1, plus why training stopped."""

    epochs: list[EpochRecord] = field(default_factory=list)
    stop_reason: StopReason | None = None
    best_epoch: int | None = None

    def __len__(self) -> int:
        return len(self.epochs)

    def append(self, record: EpochRecord) -> None:
        if record.epoch != len(self.epochs) + 1:
            raise StateError(f"Epoch {record.epoch} appended after {len(self.epochs)} epochs")
        self.epochs.append(record)

    @property
    def val_losses(self) -> list[float]:
        return [e.val_loss for e in self.epochs]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([asdict(e) for e in self.epochs], columns=list(CSV_COLUMNS))
        return frame.rename(columns=CSV_COLUMNS)

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            self.to_frame().to_csv(path, index=False, float_format="%.6f")
        except OSError as e:
            raise StorageError(f"Cannot write history {path}: {e}") from e
        return path

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, stop_reason: str | None = None) -> "TrainHistory":
        history = cls(stop_reason=StopReason(stop_reason) if stop_reason else None)
        for row in frame.to_dict(orient="records"):
            history.append(
                EpochRecord(
                    epoch=int(row["epoch"]),
                    **{f: float(row[c]) for f, c in CSV_COLUMNS.items() if f != "epoch"},
                )
            )
        return history
