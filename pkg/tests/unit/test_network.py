"""
Unit tests for the staging network and its checkpoints.

Tests cover:
- Full-size shape chain and parameter count
- scale_divisor and collapsing inputs
- Initialization statistics and determinism
- Forward/backward state handling
- Checkpoint save/load and corruption handling
"""

import numpy as np
import pytest

from gaitstage.errors import CheckpointError, ShapeError, StateError
from gaitstage.ingest import ClassLabel
from gaitstage.nn import CHECKPOINT_MAGIC, ModelConfig, Network, load_checkpoint, save_checkpoint

FULL_CHAIN = [
    (500, 18, 128),
    (250, 9, 128),
    (250, 9, 256),
    (125, 4, 256),
    (125, 4, 512),
    (62, 2, 512),
    (62, 2, 1024),
    (31, 1, 1024),
    (31744,),
    (512,),
    (4,),
]


# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture
def net(small_model_config):
    return Network.initialize(small_model_config, seed=3)


@pytest.fixture
def window(small_dataset):
    return small_dataset.windows[5]


# =============================================================================
# MODEL CONFIG
# =============================================================================


class TestModelConfig:
    """Tests for ModelConfig shape arithmetic."""

    def test_full_size_chain(self):
        """The default model maps 500 x 18 x 1 down to 31 x 1 x 1024."""
        config = ModelConfig()
        assert config.shape_chain() == FULL_CHAIN
        assert config.flatten_size == 31744

    def test_full_size_parameter_count(self):
        """Parameter count of the full-size model."""
        assert ModelConfig().parameter_count() == 22_451_716

    def test_scale_divisor(self):
        """Filter and dense widths are divided; spatial shapes are unchanged."""
        config = ModelConfig(scale_divisor=8)
        assert config.filters == (16, 32, 64, 128)
        assert config.hidden_units == 64
        assert config.flatten_size == 31 * 1 * 128

    def test_divisor_too_large(self):
        """A divisor that empties a layer is rejected."""
        with pytest.raises(ValueError, match="no units"):
            ModelConfig(scale_divisor=1024)

    def test_collapsing_input(self):
        """An input too small for four pooling stages is a shape error."""
        with pytest.raises(ShapeError):
            ModelConfig(input_shape=(8, 18, 1))

    def test_describe(self):
        """The layer table sums to the parameter count."""
        config = ModelConfig(scale_divisor=16)
        rows = config.describe()
        assert [r["layer"] for r in rows][:2] == ["conv1", "pool1"]
        assert sum(r["params"] for r in rows) == config.parameter_count()

    def test_dict_round_trip(self):
        """to_dict output rebuilds an equal config."""
        config = ModelConfig(scale_divisor=4, input_shape=(40, 18, 1))
        assert ModelConfig.from_dict(config.to_dict()) == config


# =============================================================================
# NETWORK
# =============================================================================


class TestNetwork:
    """Tests for Network initialization, forward and backward."""

    def test_initialization(self):
        """Biases start at zero; weights follow the scaled normal."""
        net = Network.initialize(ModelConfig(scale_divisor=4, input_shape=(40, 18, 1)), seed=0)
        assert all(not np.any(t) for n, t in net.params.items() if n.endswith(".bias"))
        dense = net.params["dense.weights"]
        assert dense.std() == pytest.approx(np.sqrt(2.0 / dense.shape[0]), rel=0.05)
        output = net.params["output.weights"]
        assert output.std() == pytest.approx(np.sqrt(1.0 / output.shape[0]), rel=0.3)

    def test_seeded(self, small_model_config):
        """The same seed gives the same weights."""
        a = Network.initialize(small_model_config, seed=9)
        b = Network.initialize(small_model_config, seed=9)
        for name in a.params:
            np.testing.assert_array_equal(a.params[name], b.params[name])

    def test_forward_is_distribution(self, net, window):
        """Probabilities are positive and sum to one."""
        probs = net.forward(window.matrix)
        assert probs.shape == (4,)
        assert np.all(probs > 0)
        assert probs.sum() == pytest.approx(1.0)

    def test_wrong_input_shape(self, net):
        """Inputs must match the configured shape."""
        with pytest.raises(ShapeError):
            net.forward(np.zeros((41, 18)))

    def test_backward_before_forward(self, net):
        """Backward and loss need a forward pass first."""
        with pytest.raises(StateError):
            net.backward(ClassLabel.PD2.one_hot())
        with pytest.raises(StateError):
            net.loss(ClassLabel.PD2.one_hot())

    def test_gradient_names_and_shapes(self, net, window):
        """Every parameter gets a gradient of its own shape."""
        _, _, grads = net.forward_backward(window.matrix, window.label.one_hot())
        assert list(grads) == list(net.params)
        for name, grad in grads.items():
            assert grad.shape == net.params[name].shape

    def test_weight_scales_gradients(self, net, window):
        """A sample weight scales the loss and every gradient."""
        one_hot = window.label.one_hot()
        loss, _, grads = net.forward_backward(window.matrix, one_hot)
        loss2, _, grads2 = net.forward_backward(window.matrix, one_hot, weight=2.0)
        assert loss2 == pytest.approx(2.0 * loss)
        np.testing.assert_allclose(grads2["conv1.weights"], 2.0 * grads["conv1.weights"])

    def test_replica_shares_parameters(self, net, window):
        """Replicas see parameter updates but keep their own cache."""
        replica = net.replica()
        assert replica.params is net.params
        net.forward(window.matrix)
        with pytest.raises(StateError):
            replica.backward(window.label.one_hot())

    def test_rejects_mismatched_params(self, small_model_config):
        """Parameter dicts must match the config exactly."""
        params = Network.initialize(small_model_config).params
        params["dense.bias"] = np.zeros(3)
        with pytest.raises(ShapeError, match="dense.bias"):
            Network(small_model_config, params)


# =============================================================================
# CHECKPOINTS
# =============================================================================


class TestCheckpoint:
    """Tests for save_checkpoint and load_checkpoint."""

    def test_save_and_load(self, tmp_path, net, window):
        """Weights, config, seed and metadata survive; predictions are identical."""
        path = save_checkpoint(net, tmp_path / "m.grfw", metadata={"best_epoch": 4})
        loaded, metadata = load_checkpoint(path)
        assert metadata == {"best_epoch": 4}
        assert loaded.config == net.config
        assert loaded.seed == 3
        for name in net.params:
            np.testing.assert_array_equal(loaded.params[name], net.params[name])
        np.testing.assert_array_equal(loaded.forward(window.matrix), net.forward(window.matrix))

    def test_identical_bytes(self, tmp_path, net):
        """Saving twice gives byte-identical files."""
        a = save_checkpoint(net, tmp_path / "a.grfw").read_bytes()
        b = save_checkpoint(net, tmp_path / "b.grfw").read_bytes()
        assert a == b
        assert a[:4] == CHECKPOINT_MAGIC

    def test_bad_magic(self, tmp_path):
        """Foreign files are rejected."""
        path = tmp_path / "m.grfw"
        path.write_bytes(b"GRFD" + bytes(32))
        with pytest.raises(CheckpointError, match="magic"):
            load_checkpoint(path)

    def test_unknown_version(self, tmp_path, net):
        """A future format version is rejected."""
        path = save_checkpoint(net, tmp_path / "m.grfw")
        blob = bytearray(path.read_bytes())
        blob[4] = 2
        path.write_bytes(bytes(blob))
        with pytest.raises(CheckpointError, match="version 2"):
            load_checkpoint(path)

    def test_truncated(self, tmp_path, net):
        """A cut-off file is rejected."""
        path = save_checkpoint(net, tmp_path / "m.grfw")
        path.write_bytes(path.read_bytes()[:-100])
        with pytest.raises(CheckpointError, match="truncated"):
            load_checkpoint(path)

    def test_trailing_bytes(self, tmp_path, net):
        """Extra bytes after the last tensor are rejected."""
        path = save_checkpoint(net, tmp_path / "m.grfw")
        path.write_bytes(path.read_bytes() + b"\0\0")
        with pytest.raises(CheckpointError, match="trailing"):
            load_checkpoint(path)

    def test_missing(self, tmp_path):
        """A missing checkpoint is a checkpoint error."""
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "none.grfw")
