"""
Shared fixtures: record text, small synthetic datasets and on-disk corpora.
"""

import numpy as np
import pytest

from gaitstage.ingest import generate_synthetic_dataset, write_synthetic_corpus
from gaitstage.nn import ModelConfig

# Short windows keep network tests fast; the full 500-frame chain is covered separately
SMALL_WINDOW = 40


def make_record_text(n_frames: int = 1200, rate: float = 100.0, seed: int = 0) -> str:
    """Tab-separated 19-column record with non-negative forces."""
    rng = np.random.default_rng(seed)
    t = np.arange(n_frames) / rate
    forces = np.abs(rng.normal(100.0, 30.0, size=(n_frames, 18)))
    rows = np.column_stack([t, forces])
    return "\n".join("\t".join(f"{v:.4f}" for v in row) for row in rows) + "\n"


@pytest.fixture
def record_text():
    """1200-frame record at 100 Hz."""
    return make_record_text()


@pytest.fixture
def small_dataset():
    """4 classes x 8 windows of 40 x 18, 4 subjects per class."""
    return generate_synthetic_dataset(
        windows_per_class=8, seed=0, window_len=SMALL_WINDOW, subjects_per_class=4
    )


@pytest.fixture
def small_model_config():
    """Filters (4, 8, 16, 32), dense 16, 40-frame input."""
    return ModelConfig(scale_divisor=32, input_shape=(SMALL_WINDOW, 18, 1))


@pytest.fixture
def synthetic_corpus(tmp_path):
    """Record files plus demographics.csv; 3 subjects per class, 2 windows per record."""
    data_dir = tmp_path / "corpus"
    demographics = write_synthetic_corpus(
        data_dir, subjects_per_class=3, frames_per_record=1200, seed=0
    )
    return data_dir, demographics
