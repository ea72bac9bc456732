"""
End-to-end tests for the ``gaitstage`` command line.

Tests cover:
- Exit codes for usage, data and I/O failures
- ingest -> train -> eval -> predict -> export-images on a synthetic corpus
- Output files of every command
- Reproducible reports for a fixed seed
- The gradcheck command
"""

import pandas as pd
import pytest

from gaitstage import __version__
from gaitstage.cli import main
from gaitstage.errors import EXIT_DATA_FORMAT, EXIT_IO, EXIT_OK, EXIT_USAGE
from gaitstage.ingest import write_synthetic_corpus

TRAIN_ARGS = ["--scale-divisor", "32", "--max-epochs", "2", "--batch-size", "8"]


# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    """Synthetic corpus: 12 records, 24 windows of 500 x 18."""
    data_dir = tmp_path_factory.mktemp("corpus")
    demographics = write_synthetic_corpus(data_dir, subjects_per_class=3, seed=1)
    return data_dir, demographics


@pytest.fixture(scope="module")
def trained_run(corpus, tmp_path_factory):
    """Output directory after ingest and a short training run."""
    data_dir, demographics = corpus
    out = tmp_path_factory.mktemp("run")
    assert main(
        ["ingest", "--data-dir", str(data_dir), "--demographics", str(demographics),
         "--out-dir", str(out)]
    ) == EXIT_OK
    assert main(["train", "--out-dir", str(out), *TRAIN_ARGS]) == EXIT_OK
    return out


# =============================================================================
# EXIT CODES
# =============================================================================


class TestExitCodes:
    """Tests for failure exit codes."""

    def test_version(self, capsys):
        """--version prints the version and succeeds."""
        assert main(["--version"]) == EXIT_OK
        assert __version__ in capsys.readouterr().out

    def test_no_command(self):
        """A missing subcommand is a usage error."""
        assert main([]) == EXIT_USAGE

    def test_unknown_flag(self):
        """Unknown flags are usage errors."""
        assert main(["train", "--learning-speed", "3"]) == EXIT_USAGE

    def test_ingest_without_inputs(self, tmp_path):
        """ingest needs a data directory and demographics."""
        assert main(["ingest", "--out-dir", str(tmp_path)]) == EXIT_USAGE

    def test_missing_demographics(self, corpus, tmp_path):
        """A demographics path that does not exist is a usage error."""
        data_dir, _ = corpus
        argv = ["ingest", "--data-dir", str(data_dir), "--demographics",
                str(tmp_path / "missing.csv"), "--out-dir", str(tmp_path)]
        assert main(argv) == EXIT_USAGE

    def test_unknown_config_key(self, tmp_path):
        """Config files with unknown keys are usage errors."""
        config = tmp_path / "run.env"
        config.write_text("WINDOW_SIZE=500\n")
        assert main(["--config", str(config), "gradcheck"]) == EXIT_USAGE

    def test_missing_dataset(self, tmp_path):
        """Training without a dataset container is an I/O error."""
        assert main(["train", "--out-dir", str(tmp_path), *TRAIN_ARGS]) == EXIT_IO

    def test_corrupt_checkpoint(self, trained_run, tmp_path):
        """A corrupt checkpoint is an I/O error."""
        bad = tmp_path / "bad.grfw"
        bad.write_bytes(b"GRFW\x09garbage")
        argv = ["eval", "--out-dir", str(tmp_path), "--checkpoint", str(bad),
                "--dataset", str(trained_run / "dataset.grfd")]
        assert main(argv) == EXIT_IO

    def test_malformed_record(self, trained_run, tmp_path):
        """Predicting on a malformed record is a data-format error."""
        record = tmp_path / "GaPt21_01.txt"
        record.write_text("0.0\t1.0\n0.01\t2.0\n")
        argv = ["predict", str(record), "--out-dir", str(tmp_path),
                "--checkpoint", str(trained_run / "model.grfw")]
        assert main(argv) == EXIT_DATA_FORMAT


# =============================================================================
# PIPELINE
# =============================================================================


class TestPipeline:
    """Tests for the full command sequence."""

    def test_ingest_outputs(self, trained_run):
        """ingest writes the container, summaries and resolved config."""
        for name in ("dataset.grfd", "class_counts.csv", "cohort_summary.csv",
                     "ingest_summary.txt", "resolved_config.env"):
            assert (trained_run / name).is_file(), name
        counts = pd.read_csv(trained_run / "class_counts.csv")
        assert list(counts["Number of samples"]) == [6, 6, 6, 6, 24]

    def test_train_outputs(self, trained_run):
        """train writes checkpoint, history and the evaluation report."""
        for name in ("model.grfw", "history.csv", "confusion_matrix.csv",
                     "report.csv", "report.txt"):
            assert (trained_run / name).is_file(), name
        history = pd.read_csv(trained_run / "history.csv")
        assert 1 <= len(history) <= 2
        report = pd.read_csv(trained_run / "report.csv")
        assert list(report.columns) == ["Case", "Precision", "Recall", "F1-measure",
                                        "Overall accuracy"]
        assert len(report) == 4
        confusion = pd.read_csv(trained_run / "confusion_matrix.csv", index_col=0)
        assert int(confusion.to_numpy().sum()) == 8

    def test_eval_matches_train(self, trained_run, tmp_path, capsys):
        """Evaluating the saved checkpoint reproduces the training report."""
        argv = ["eval", "--out-dir", str(tmp_path),
                "--dataset", str(trained_run / "dataset.grfd"),
                "--checkpoint", str(trained_run / "model.grfw")]
        assert main(argv) == EXIT_OK
        assert "MODEL PERFORMANCE" in capsys.readouterr().out
        assert (tmp_path / "report.csv").read_text() == (trained_run / "report.csv").read_text()

    def test_eval_on_all(self, trained_run, tmp_path):
        """--eval-on all scores every window."""
        argv = ["eval", "--out-dir", str(tmp_path), "--eval-on", "all",
                "--dataset", str(trained_run / "dataset.grfd"),
                "--checkpoint", str(trained_run / "model.grfw")]
        assert main(argv) == EXIT_OK
        confusion = pd.read_csv(tmp_path / "confusion_matrix.csv", index_col=0)
        assert int(confusion.to_numpy().sum()) == 24

    def test_predict(self, corpus, trained_run, tmp_path, capsys):
        """predict reports per-window labels and the modal class."""
        data_dir, demographics = corpus
        argv = ["predict", str(data_dir / "GaPt21_01.txt"), "--out-dir", str(tmp_path),
                "--checkpoint", str(trained_run / "model.grfw"),
                "--demographics", str(demographics)]
        assert main(argv) == EXIT_OK
        out = capsys.readouterr().out
        assert "/2 windows" in out
        assert "actual PD stage 2" in out
        frame = pd.read_csv(tmp_path / "predictions_GaPt21_01.csv")
        assert list(frame["window"]) == [0, 1]
        assert [c for c in frame.columns if c.startswith("p_")] == [
            "p_Healthy", "p_PD2", "p_PD2_5", "p_PD3"
        ]

    def test_export_images(self, trained_run, tmp_path):
        """export-images writes one PNG per window."""
        argv = ["export-images", "--out-dir", str(tmp_path),
                "--dataset", str(trained_run / "dataset.grfd")]
        assert main(argv) == EXIT_OK
        images = sorted((tmp_path / "images").glob("*.png"))
        assert len(images) == 24
        assert images[0].name.startswith("00000_")

    def test_same_seed_same_report(self, trained_run, tmp_path):
        """A second deterministic run with the same seed reproduces report, weights and history."""
        argv = ["train", "--out-dir", str(tmp_path),
                "--dataset", str(trained_run / "dataset.grfd"), *TRAIN_ARGS]
        assert main(argv) == EXIT_OK
        assert (tmp_path / "report.csv").read_text() == (trained_run / "report.csv").read_text()
        assert (tmp_path / "model.grfw").read_bytes() == (trained_run / "model.grfw").read_bytes()
        assert (tmp_path / "history.csv").read_bytes() == (trained_run / "history.csv").read_bytes()


# =============================================================================
# GRADCHECK
# =============================================================================


class TestGradcheckCommand:
    """Tests for the gradcheck subcommand."""

    def test_passes(self, tmp_path, capsys):
        """A short gradcheck passes and writes its table."""
        argv = ["gradcheck", "--out-dir", str(tmp_path), "--trials", "2", "--window-len", "40"]
        assert main(argv) == EXIT_OK
        assert "PASS" in capsys.readouterr().out
        frame = pd.read_csv(tmp_path / "gradcheck.csv")
        assert len(frame) == 6
        assert frame["passed"].all()
