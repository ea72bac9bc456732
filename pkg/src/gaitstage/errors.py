"""
Exception hierarchy shared by every gaitstage module.

Each error carries the process exit code the CLI reports for it:

    0  success
    1  unexpected internal failure (including StateError)
    2  usage error (bad flags, missing inputs, unknown config keys)
    3  data-format error (record files, labels, shapes, splits)
    4  numeric error (non-finite values, undefined metrics, failed gradient check)
    5  I/O error (unwritable outputs, corrupt containers or checkpoints)
"""

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_DATA_FORMAT = 3
EXIT_NUMERIC = 4
EXIT_IO = 5


class GaitStageError(Exception):
    """Base class for all gaitstage errors."""

    exit_code = EXIT_INTERNAL


class UsageError(GaitStageError):
    """Invalid invocation: missing inputs, bad flags, unknown config keys."""

    exit_code = EXIT_USAGE


class DataFormatError(GaitStageError, ValueError):
    """Input data does not follow the expected format."""

    exit_code = EXIT_DATA_FORMAT


class ShapeError(DataFormatError):
    """Tensor shapes are inconsistent with an operation."""


class LabelError(DataFormatError):
    """A record cannot be assigned a class label."""


class UnsupportedStageError(LabelError):
    """Patient Hoehn & Yahr score outside the supported stages."""


class SplitError(DataFormatError):
    """A dataset cannot be split as requested."""


class EmptyDatasetError(DataFormatError):
    """No windows were produced or an operation received an empty set."""


class NumericError(GaitStageError, ArithmeticError):
    """Non-finite values or failed numeric checks."""

    exit_code = EXIT_NUMERIC


class UndefinedMetricError(NumericError):
    """A metric is undefined for the given confusion matrix."""


class StateError(GaitStageError, RuntimeError):
    """An operation was called in the wrong state (e.g. backward before forward)."""

    exit_code = EXIT_INTERNAL


class StorageError(GaitStageError, OSError):
    """Reading or writing a file failed."""

    exit_code = EXIT_IO


class CheckpointError(StorageError):
    """A dataset container or checkpoint is missing, corrupt or of unknown version."""
