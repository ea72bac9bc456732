"""
``gaitstage`` command-line entry point.

Examples:
    # Build the dataset container from the public corpus
    gaitstage ingest --data-dir data/gaitpdb --demographics data/demographics.csv --out-dir runs/a

    # Train a desk-scale model and write checkpoint, history and report
    gaitstage train --out-dir runs/a --scale-divisor 8 --max-epochs 30

    # Score the checkpoint again, or classify a single record
    gaitstage eval --out-dir runs/a
    gaitstage predict data/gaitpdb/GaPt03_01.txt --out-dir runs/a

    # Verify every backward pass against finite differences
    gaitstage gradcheck --out-dir runs/gradcheck

Exit codes:
    0 success, 1 internal error, 2 usage, 3 data format, 4 numeric, 5 I/O
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from typing import Any

from .. import __version__
from ..errors import EXIT_INTERNAL, EXIT_OK, EXIT_USAGE, GaitStageError
from . import commands
from .config import load_run_config

logger = logging.getLogger(__name__)

GRADCHECK_SCALE_DIVISOR = 32

# Flags shared by every subcommand, mirroring RunConfig fields
COMMON_FLAGS: list[tuple[str, dict[str, Any]]] = [
    ("--out-dir", {"help": "Output directory (default runs/latest)"}),
    ("--seed", {"type": int, "help": "Seed for init, shuffling and splits (default 0)"}),
    ("--workers", {"type": int, "help": "Parallel workers (default 1)"}),
]

DATA_FLAGS: list[tuple[str, dict[str, Any]]] = [
    ("--data-dir", {"help": "Directory of record files"}),
    ("--demographics", {"help": "Demographics CSV"}),
    ("--manifest", {"help": "Optional JSON manifest for non-standard file names"}),
    ("--window-len", {"type": int, "help": "Frames per window (default 500)"}),
    ("--overlap", {"type": int, "help": "Frames shared by consecutive windows (default 0)"}),
]

SPLIT_FLAGS: list[tuple[str, dict[str, Any]]] = [
    ("--dataset", {"help": "Dataset container (default <out-dir>/dataset.grfd)"}),
    ("--train-fraction", {"type": float, "help": "Training share (default 0.8)"}),
    (
        "--split-strategy",
        {"choices": ["by_window", "by_subject"], "help": "Split unit (default by_window)"},
    ),
    ("--stratified", {"action": argparse.BooleanOptionalAction, "default": None}),
    ("--test-fraction", {"type": float, "help": "Holdout share kept as test set (default 0)"}),
]

MODEL_FLAGS: list[tuple[str, dict[str, Any]]] = [
    ("--scale-divisor", {"type": int, "help": "Divide filter and dense widths (default 1)"}),
    ("--dense-units", {"type": int, "help": "Dense layer width before scaling (default 512)"}),
]

TRAIN_FLAGS: list[tuple[str, dict[str, Any]]] = [
    ("--lr", {"type": float, "help": "Adam learning rate (default 1e-3)"}),
    ("--beta1", {"type": float}),
    ("--beta2", {"type": float}),
    ("--adam-eps", {"type": float}),
    ("--batch-size", {"type": int, "help": "Mini-batch size (default 32)"}),
    ("--patience", {"type": int, "help": "Plateau epochs before stopping (default 3)"}),
    ("--min-delta", {"type": float, "help": "Minimum val-loss improvement (default 1e-4)"}),
    ("--target-accuracy", {"type": float, "help": "Stop at this val accuracy (default 0.97)"}),
    ("--target-loss", {"type": float, "help": "Also require val loss <= this to stop"}),
    ("--max-epochs", {"type": int, "help": "Epoch budget (default 12)"}),
    ("--deterministic", {"action": argparse.BooleanOptionalAction, "default": None}),
    ("--class-weighting", {"action": argparse.BooleanOptionalAction, "default": None}),
    ("--lr-plateau-halving", {"action": argparse.BooleanOptionalAction, "default": None}),
]


def _add_flags(parser: argparse.ArgumentParser, *groups: list[tuple[str, dict[str, Any]]]) -> None:
    for group in groups:
        for flag, options in group:
            parser.add_argument(flag, **options)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaitstage",
        description="Parkinson's disease stage classification from gait force recordings",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("Examples:", 1)[1] if __doc__ else None,
    )
    parser.add_argument("--version", action="version", version=f"gaitstage {__version__}")
    parser.add_argument("--config", help="KEY=value config file")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    ingest = sub.add_parser("ingest", help="Parse, window and normalize records into a dataset")
    _add_flags(ingest, COMMON_FLAGS, DATA_FLAGS)

    export = sub.add_parser("export-images", help="Write every window as a PNG")
    _add_flags(export, COMMON_FLAGS)
    export.add_argument("--dataset", help="Dataset container (default <out-dir>/dataset.grfd)")

    train = sub.add_parser("train", help="Split, train and report")
    _add_flags(train, COMMON_FLAGS, SPLIT_FLAGS, MODEL_FLAGS, TRAIN_FLAGS)
    train.add_argument("--checkpoint", help="Checkpoint path (default <out-dir>/model.grfw)")

    evaluate = sub.add_parser("eval", help="Score a checkpoint")
    _add_flags(evaluate, COMMON_FLAGS, SPLIT_FLAGS)
    evaluate.add_argument("--checkpoint", help="Checkpoint path (default <out-dir>/model.grfw)")
    evaluate.add_argument("--eval-on", choices=["holdout", "all"], help="Windows to score")

    predict = sub.add_parser("predict", help="Classify the windows of one record")
    _add_flags(predict, COMMON_FLAGS)
    predict.add_argument("record", help="Record file (19 columns)")
    predict.add_argument("--checkpoint", help="Checkpoint path (default <out-dir>/model.grfw)")
    predict.add_argument("--demographics", help="Demographics CSV, to show the reference label")
    predict.add_argument("--overlap", type=int, help="Window overlap in frames (default 0)")

    gradcheck = sub.add_parser("gradcheck", help="Finite-difference check of every layer")
    _add_flags(gradcheck, COMMON_FLAGS, MODEL_FLAGS)
    gradcheck.add_argument("--trials", type=int, default=20, help="Trials per layer (default 20)")
    gradcheck.add_argument("--window-len", type=int, help="Network input rows (default 500)")

    return parser


# Parsed attributes that are not RunConfig fields
_NON_CONFIG = {"command", "config", "verbose", "record", "trials"}


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(levelname)s - %(message)s",
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run one command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    configure_logging(args.verbose)
    overrides = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG}
    if args.command == "gradcheck" and overrides.get("scale_divisor") is None:
        overrides["scale_divisor"] = GRADCHECK_SCALE_DIVISOR

    try:
        config = load_run_config(args.config, overrides)
        if args.command == "ingest":
            commands.cmd_ingest(config)
        elif args.command == "export-images":
            commands.cmd_export_images(config)
        elif args.command == "train":
            commands.cmd_train(config)
        elif args.command == "eval":
            commands.cmd_eval(config)
        elif args.command == "predict":
            commands.cmd_predict(config, args.record)
        elif args.command == "gradcheck":
            commands.cmd_gradcheck(config, trials=args.trials)
    except GaitStageError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValueError as e:
        logger.error(f"Invalid parameter: {e}")
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.error("Interrupted")
        return EXIT_INTERNAL
    except Exception:
        logger.exception(f"Unexpected failure in '{args.command}'")
        return EXIT_INTERNAL
    return EXIT_OK


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())
