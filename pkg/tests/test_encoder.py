"""Inference network: architecture contracts, batch norm, determinism."""

import numpy as np
import pytest

from tntm.encoder import EncoderConfig, EncoderNetwork, encode
from tntm.errors import DimensionMismatch, UninitializedBatchStats


def _zeroed_network(config):
    """All parameters and batch-norm state zeroed; stats marked tracked."""
    net = EncoderNetwork.init_random(config, np.random.default_rng(0))
    for arr in net.params.values():
        arr[...] = 0.0
    net.batches_tracked = 1
    return net


class TestArchitecture:
    def test_zero_network_eval_outputs_zero(self):
        config = EncoderConfig.bow(vocab_size=7, k=3, block_widths=(5, 5))
        net = _zeroed_network(config)
        out = encode(np.arange(7, dtype=float), net, mode="eval")
        np.testing.assert_array_equal(out.mu_q, np.zeros(3))
        np.testing.assert_array_equal(out.log_var_q, np.zeros(3))

    def test_constant_batch_normalizes_to_zero(self):
        config = EncoderConfig.bow(vocab_size=4, k=2, block_widths=(4, 4), dropout=0.0)
        net = EncoderNetwork.init_random(config, np.random.default_rng(1))
        x = np.tile(np.array([1.0, 2.0, 0.0, 3.0]), (6, 1))
        _, _, cache = net.forward_batch(x, train=True, return_cache=True, update_stats=False)
        for blk in cache["blocks"]:
            np.testing.assert_allclose(blk["x_hat"], 0.0, atol=1e-8)

    def test_eval_deterministic_bitwise(self):
        config = EncoderConfig.bow(vocab_size=5, k=2, block_widths=(4, 4))
        net = EncoderNetwork.init_random(config, np.random.default_rng(2))
        net.forward_batch(
            np.random.default_rng(3).standard_normal((4, 5)),
            train=True,
            rng=np.random.default_rng(4),
        )
        x = np.random.default_rng(5).standard_normal(5)
        a = encode(x, net, mode="eval")
        b = encode(x, net, mode="eval")
        assert a.mu_q.tobytes() == b.mu_q.tobytes()
        assert a.log_var_q.tobytes() == b.log_var_q.tobytes()

    def test_eval_before_any_batch_raises(self):
        config = EncoderConfig.bow(vocab_size=5, k=2)
        net = EncoderNetwork.init_random(config, np.random.default_rng(6))
        with pytest.raises(UninitializedBatchStats):
            encode(np.zeros(5), net, mode="eval")

    def test_dimension_mismatch(self):
        config = EncoderConfig.bow(vocab_size=5, k=2)
        net = EncoderNetwork.init_random(config, np.random.default_rng(7))
        with pytest.raises(DimensionMismatch):
            net.forward_batch(np.zeros((2, 4)), train=True, rng=np.random.default_rng(0))

    def test_residual_only_on_matching_widths(self):
        # bow default: first block changes width (no skip), second keeps it
        config = EncoderConfig.bow(vocab_size=10, k=2, block_widths=(6, 6), dropout=0.0)
        net = EncoderNetwork.init_random(config, np.random.default_rng(8))
        x = np.random.default_rng(9).standard_normal((3, 10))
        _, _, cache = net.forward_batch(x, train=True, return_cache=True, update_stats=False)
        assert [blk["residual"] for blk in cache["blocks"]] == [False, True]

    def test_docvec_mode_has_no_dropout(self):
        config = EncoderConfig.docvec(input_dim=8, k=3)
        assert not config.dropout_active
        net = EncoderNetwork.init_random(config, np.random.default_rng(10))
        x = np.random.default_rng(11).standard_normal((4, 8))
        # no rng needed: dropout inactive
        mu, lv, _ = net.forward_batch(x, train=True, update_stats=False)
        assert mu.shape == (4, 3) and lv.shape == (4, 3)

    def test_dropout_requires_rng_in_bow_train(self):
        config = EncoderConfig.bow(vocab_size=5, k=2)
        net = EncoderNetwork.init_random(config, np.random.default_rng(12))
        with pytest.raises(ValueError):
            net.forward_batch(np.zeros((2, 5)), train=True)

    def test_running_stats_update(self):
        config = EncoderConfig.bow(vocab_size=4, k=2, block_widths=(4,), dropout=0.0)
        net = EncoderNetwork.init_random(config, np.random.default_rng(13))
        rm_before = net.params["enc.block0.bn.run_mean"].copy()
        x = np.random.default_rng(14).standard_normal((8, 4))
        net.forward_batch(x, train=True, update_stats=True)
        assert net.batches_tracked == 1
        assert not np.array_equal(net.params["enc.block0.bn.run_mean"], rm_before)

    def test_checkpoint_tensor_names(self):
        config = EncoderConfig.bow(vocab_size=6, k=2, block_widths=(5, 5))
        net = EncoderNetwork.init_random(config, np.random.default_rng(15))
        names = set(net.named_tensors())
        assert "enc.linear0.w" in names
        assert "enc.block0.bn.run_var" in names
        assert "enc.block1.linear.b" in names
        assert "enc.head_logvar.w" in names
        assert len(names) == 2 + 2 * 6 + 4
