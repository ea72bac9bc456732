"""
Command-line interface: run configuration, commands and the entry point.

Usage:
    from gaitstage.cli import load_run_config, cmd_train

    config = load_run_config("runs/a.env", {"scale_divisor": 8})
    outcome = cmd_train(config)
"""

from .commands import (
    EvaluationOutcome,
    PredictionOutcome,
    TrainOutcome,
    cmd_eval,
    cmd_export_images,
    cmd_gradcheck,
    cmd_ingest,
    cmd_predict,
    cmd_train,
)
from .config import RESOLVED_CONFIG_NAME, RunConfig, load_run_config, write_resolved_config
from .main import build_parser, main, run

__all__ = [
    "RunConfig",
    "load_run_config",
    "write_resolved_config",
    "RESOLVED_CONFIG_NAME",
    "cmd_ingest",
    "cmd_export_images",
    "cmd_train",
    "cmd_eval",
    "cmd_predict",
    "cmd_gradcheck",
    "EvaluationOutcome",
    "TrainOutcome",
    "PredictionOutcome",
    "build_parser",
    "main",
    "run",
]
