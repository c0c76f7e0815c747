"""Tests for the dense numeric kernels and their backward passes."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.errors import ConfigError, EmptySequenceError, NumericalError, ShapeError
from src.nn.gradcheck import grad_check
from src.nn.kernels import (
    CE_FLOOR,
    attention_backward,
    attention_forward,
    attention_weights,
    bilstm_backward,
    bilstm_forward,
    bilstm_forward_batch,
    cross_entropy_batch,
    cross_entropy_loss,
    debug_checks,
    debug_checks_enabled,
    dropout_backward,
    dropout_forward,
    ffn_backward,
    ffn_forward,
    layer_norm,
    layer_norm_backward,
    layer_norm_forward,
    lstm_cell_step,
    mha_backward,
    mha_forward,
    multi_head_attention,
    position_wise_ffn,
    positional_encoding,
    scaled_dot_attention,
    softmax,
    softmax_backward,
)
from src.nn.params import (
    AttentionParams,
    FfnParams,
    LayerNormParams,
    LstmParams,
    LstmState,
    init_attention,
    init_lstm,
)

GRAD_TOL = 1e-4
# Components whose true gradient is ~0 only carry finite-difference noise.
GRAD_FLOOR = 1e-6

LSTM_FIELDS = ("w_i", "w_f", "w_o", "w_c", "b_i", "b_f", "b_o", "b_c")


def _pack(*arrays: np.ndarray) -> np.ndarray:
    return np.concatenate([np.ravel(a) for a in arrays])


def _unpack(theta: np.ndarray, shapes: list[tuple[int, ...]]) -> list[np.ndarray]:
    out, offset = [], 0
    for shape in shapes:
        size = math.prod(shape)
        out.append(theta[offset : offset + size].reshape(shape))
        offset += size
    return out


def _naive_attention(q: np.ndarray, k: np.ndarray, v: np.ndarray) -> np.ndarray:
    scores = q @ k.T / math.sqrt(q.shape[1])
    out = np.zeros((q.shape[0], v.shape[1]))
    for row in range(q.shape[0]):
        weights = np.exp(scores[row] - scores[row].max())
        weights /= weights.sum()
        for j in range(k.shape[0]):
            out[row] += weights[j] * v[j]
    return out


class TestSoftmax:
    """Tests for softmax."""

    def test_examples(self):
        """Test symmetric, large and reference inputs."""
        assert_allclose(softmax(np.array([0.0, 0.0])), [0.5, 0.5])
        assert_allclose(softmax(np.array([1000.0, 1000.0])), [0.5, 0.5])
        assert_allclose(softmax(np.array([1.0, 2.0, 3.0])), [0.09003, 0.24473, 0.66524], atol=1e-5)

    def test_rows_sum_to_one_and_shift_invariant(self):
        """Test normalization and invariance to a constant shift."""
        rng = np.random.default_rng(0)
        logits = rng.normal(scale=10.0, size=(50, 7))
        probs = softmax(logits)
        assert np.all(probs > 0) and np.all(probs < 1)
        assert_allclose(probs.sum(axis=-1), 1.0, atol=1e-9)
        assert_allclose(softmax(logits + 123.4), probs, atol=1e-12)

    def test_debug_checks_catch_non_finite(self):
        """Test debug mode turns NaN output into a NumericalError."""
        with debug_checks(), np.errstate(invalid="ignore"), pytest.raises(NumericalError):
            softmax(np.array([np.inf, 0.0]))
        assert not debug_checks_enabled()

    def test_debug_checks_restore_previous_setting(self):
        """Test leaving a nested block restores the outer setting, also on error."""
        with debug_checks(True):
            with debug_checks(False):
                assert not debug_checks_enabled()
            assert debug_checks_enabled()
            with pytest.raises(NumericalError), debug_checks(True):
                raise NumericalError("stage failed")
            assert debug_checks_enabled()
            with np.errstate(invalid="ignore"), pytest.raises(NumericalError):
                softmax(np.array([np.nan, 0.0]))
        assert not debug_checks_enabled()

    def test_backward(self):
        """Test the softmax gradient against finite differences."""
        rng = np.random.default_rng(1)
        upstream = rng.normal(size=5)

        def loss_fn(theta):
            probs = softmax(theta)
            return float(probs @ upstream), softmax_backward(probs, upstream)

        assert grad_check(loss_fn, rng.normal(size=5), floor=GRAD_FLOOR) < GRAD_TOL


class TestScaledDotAttention:
    """Tests for single-head attention."""

    def test_single_row_returns_v(self):
        """Test a length-1 key set gives V exactly."""
        v = np.array([[0.3, -1.2, 4.0]])
        out = scaled_dot_attention(np.array([[1.0, 2.0]]), np.array([[0.5, -0.5]]), v)
        assert np.array_equal(out, v)

    def test_identical_keys_average_values(self):
        """Test identical keys give uniform weights over V's rows."""
        rng = np.random.default_rng(2)
        k = np.tile(rng.normal(size=(1, 4)), (5, 1))
        v = rng.normal(size=(5, 3))
        out = scaled_dot_attention(rng.normal(size=(3, 4)), k, v)
        assert_allclose(out, np.tile(v.mean(axis=0), (3, 1)), atol=1e-12)

    def test_matches_naive_evaluation(self):
        """Test a small case against a loop-based evaluation."""
        q = np.array([[1.0, 0.5], [-0.3, 2.0]])
        k = np.array([[0.2, -1.0], [1.5, 0.4]])
        v = np.array([[1.0, 2.0], [3.0, -1.0]])
        assert_allclose(scaled_dot_attention(q, k, v), _naive_attention(q, k, v), atol=1e-12)

    def test_weights_are_stochastic(self):
        """Test attention weights are nonnegative with unit row sums."""
        rng = np.random.default_rng(3)
        weights = attention_weights(rng.normal(size=(6, 4)), rng.normal(size=(9, 4)))
        assert np.all(weights >= 0)
        assert_allclose(weights.sum(axis=-1), 1.0, atol=1e-9)

    def test_mask_removes_keys(self):
        """Test masked keys get zero weight."""
        rng = np.random.default_rng(4)
        mask = np.array([True, True, False])
        weights = attention_weights(rng.normal(size=(2, 4)), rng.normal(size=(3, 4)), mask)
        assert np.all(weights[:, 2] == 0.0)
        assert_allclose(weights.sum(axis=-1), 1.0, atol=1e-9)

    def test_permutation_equivariance(self):
        """Test permuting input rows permutes self-attention output rows."""
        rng = np.random.default_rng(5)
        for _ in range(100):
            seq_len, width = rng.integers(2, 8), 4
            x = rng.normal(size=(seq_len, width))
            w_q, w_k, w_v = (rng.normal(size=(width, width)) for _ in range(3))
            perm = rng.permutation(seq_len)
            out = scaled_dot_attention(x @ w_q, x @ w_k, x @ w_v)
            xp = x[perm]
            out_perm = scaled_dot_attention(xp @ w_q, xp @ w_k, xp @ w_v)
            assert_allclose(out_perm, out[perm], atol=1e-9)

    def test_shape_errors(self):
        """Test mismatched widths and lengths raise ShapeError."""
        with pytest.raises(ShapeError, match="widths"):
            scaled_dot_attention(np.ones((2, 3)), np.ones((2, 4)), np.ones((2, 4)))
        with pytest.raises(ShapeError, match="lengths"):
            scaled_dot_attention(np.ones((2, 3)), np.ones((2, 3)), np.ones((3, 3)))

    def test_backward(self):
        """Test the attention gradients against finite differences."""
        rng = np.random.default_rng(6)
        shapes = [(2, 3, 4), (2, 5, 4), (2, 5, 3)]
        mask = np.array([[True] * 5, [True, True, True, False, False]])
        upstream = rng.normal(size=(2, 3, 3))

        def loss_fn(theta):
            q, k, v = _unpack(theta, shapes)
            out, cache = attention_forward(q, k, v, mask)
            return float(np.sum(out * upstream)), _pack(*attention_backward(upstream, cache))

        theta = _pack(*(rng.normal(size=s) for s in shapes))
        assert grad_check(loss_fn, theta, floor=GRAD_FLOOR) < GRAD_TOL


class TestMultiHeadAttention:
    """Tests for multi-head self-attention."""

    def test_identity_single_head_reduces(self):
        """Test h=1 with identity projections equals plain self-attention."""
        x = np.random.default_rng(7).normal(size=(4, 3))
        eye = np.eye(3)
        params = AttentionParams(eye[None], eye[None], eye[None], eye)
        assert_allclose(multi_head_attention(x, params), scaled_dot_attention(x, x, x), atol=1e-12)

    def test_shape_contract(self):
        """Test the output keeps the input shape for 2-D and 3-D input."""
        rng = np.random.default_rng(8)
        params = init_attention(rng, d_model=4, num_heads=2)
        assert multi_head_attention(rng.normal(size=(5, 4)), params).shape == (5, 4)
        assert multi_head_attention(rng.normal(size=(3, 5, 4)), params).shape == (3, 5, 4)

    def test_matches_head_by_head_composition(self):
        """Test the concatenated heads times W_O against a per-head loop."""
        rng = np.random.default_rng(9)
        params = init_attention(rng, d_model=4, num_heads=2)
        x = rng.normal(size=(3, 4))
        heads = [
            _naive_attention(x @ params.w_q[h], x @ params.w_k[h], x @ params.w_v[h])
            for h in range(params.num_heads)
        ]
        expected = np.concatenate(heads, axis=1) @ params.w_o
        assert_allclose(multi_head_attention(x, params), expected, atol=1e-12)

    def test_width_mismatch(self):
        """Test input narrower than d_model raises ShapeError."""
        params = init_attention(np.random.default_rng(0), d_model=4, num_heads=2)
        with pytest.raises(ShapeError):
            multi_head_attention(np.ones((3, 5)), params)

    def test_bad_params(self):
        """Test inconsistent projection shapes are rejected."""
        with pytest.raises(ShapeError):
            AttentionParams(np.ones((2, 4, 2)), np.ones((2, 4, 2)), np.ones((2, 4, 2)), np.ones((3, 4)))

    def test_backward(self):
        """Test input and projection gradients against finite differences."""
        rng = np.random.default_rng(10)
        batch, seq_len, d_model, heads = 2, 3, 4, 2
        d_k = d_model // heads
        shapes = [
            (batch, seq_len, d_model),
            (heads, d_model, d_k),
            (heads, d_model, d_k),
            (heads, d_model, d_k),
            (heads * d_k, d_model),
        ]
        mask = np.array([[True, True, True], [True, True, False]])
        upstream = rng.normal(size=(batch, seq_len, d_model))

        def loss_fn(theta):
            x, w_q, w_k, w_v, w_o = _unpack(theta, shapes)
            out, cache = mha_forward(x, AttentionParams(w_q, w_k, w_v, w_o), mask)
            dx, grads = mha_backward(upstream, cache)
            grad = _pack(dx, grads["w_q"], grads["w_k"], grads["w_v"], grads["w_o"])
            return float(np.sum(out * upstream)), grad

        theta = _pack(*(rng.normal(scale=0.5, size=s) for s in shapes))
        assert grad_check(loss_fn, theta, floor=GRAD_FLOOR) < GRAD_TOL


class TestFeedForward:
    """Tests for the position-wise feed-forward block."""

    @staticmethod
    def _identity(width):
        return FfnParams(np.eye(width), np.zeros(width), np.eye(width), np.zeros(width))

    def test_identity_passes_nonnegative(self):
        """Test identity weights leave a nonnegative input unchanged."""
        x = np.array([0.0, 1.5, 3.0])
        assert_allclose(position_wise_ffn(x, self._identity(3)), x)

    def test_relu_clamp(self):
        """Test the ReLU clamps negative components."""
        assert_allclose(position_wise_ffn(np.array([-1.0, 2.0]), self._identity(2)), [0.0, 2.0])

    def test_matches_manual(self):
        """Test a random case against two explicit affine steps."""
        rng = np.random.default_rng(11)
        params = FfnParams(rng.normal(size=(4, 6)), rng.normal(size=6), rng.normal(size=(6, 4)), rng.normal(size=4))
        x = rng.normal(size=4)
        expected = np.maximum(x @ params.w1 + params.b1, 0.0) @ params.w2 + params.b2
        assert_allclose(position_wise_ffn(x, params), expected, atol=1e-12)

    def test_shape_errors(self):
        """Test inconsistent weights and inputs raise ShapeError."""
        with pytest.raises(ShapeError):
            FfnParams(np.ones((4, 6)), np.ones(5), np.ones((6, 4)), np.ones(4))
        with pytest.raises(ShapeError):
            position_wise_ffn(np.ones(3), self._identity(2))

    def test_backward(self):
        """Test feed-forward gradients against finite differences."""
        rng = np.random.default_rng(12)
        shapes = [(2, 3, 4), (4, 5), (5,), (5, 4), (4,)]
        upstream = rng.normal(size=(2, 3, 4))

        def loss_fn(theta):
            x, w1, b1, w2, b2 = _unpack(theta, shapes)
            out, cache = ffn_forward(x, FfnParams(w1, b1, w2, b2))
            dx, grads = ffn_backward(upstream, cache)
            return float(np.sum(out * upstream)), _pack(dx, grads["w1"], grads["b1"], grads["w2"], grads["b2"])

        theta = _pack(*(rng.normal(size=s) for s in shapes))
        assert grad_check(loss_fn, theta, floor=GRAD_FLOOR) < GRAD_TOL


class TestLayerNorm:
    """Tests for layer normalization."""

    def test_normalizes_rows(self):
        """Test unit gamma and zero beta give zero-mean unit-variance rows."""
        x = np.random.default_rng(13).normal(loc=3.0, scale=2.0, size=(4, 16))
        out = layer_norm(x, LayerNormParams(np.ones(16), np.zeros(16)))
        assert_allclose(out.mean(axis=-1), 0.0, atol=1e-12)
        assert_allclose(out.var(axis=-1), 1.0, atol=1e-4)

    def test_backward(self):
        """Test layer-norm gradients against finite differences."""
        rng = np.random.default_rng(14)
        shapes = [(3, 5), (5,), (5,)]
        upstream = rng.normal(size=(3, 5))

        def loss_fn(theta):
            x, gamma, beta = _unpack(theta, shapes)
            out, cache = layer_norm_forward(x, LayerNormParams(gamma, beta))
            dx, grads = layer_norm_backward(upstream, cache)
            return float(np.sum(out * upstream)), _pack(dx, grads["gamma"], grads["beta"])

        theta = _pack(*(rng.normal(size=s) for s in shapes))
        assert grad_check(loss_fn, theta, floor=GRAD_FLOOR) < GRAD_TOL


class TestPositionalEncoding:
    """Tests for the sinusoidal positional encoding."""

    def test_first_row(self):
        """Test position 0 alternates sin 0 and cos 0."""
        assert_allclose(positional_encoding(1, 6)[0], [0, 1, 0, 1, 0, 1])

    def test_range_and_distinct_rows(self):
        """Test entries stay in [-1, 1] and rows are pairwise distinct."""
        pe = positional_encoding(128, 64)
        assert pe.shape == (128, 64)
        assert np.all(np.abs(pe) <= 1.0)
        assert len({row.tobytes() for row in pe}) == 128

    def test_dtype(self):
        """Test the requested dtype is honored."""
        assert positional_encoding(4, 8, np.float32).dtype == np.float32

    def test_invalid(self):
        """Test odd widths and empty sequences raise ConfigError."""
        with pytest.raises(ConfigError, match="even"):
            positional_encoding(4, 5)
        with pytest.raises(ConfigError):
            positional_encoding(0, 4)


class TestLstm:
    """Tests for the LSTM cell and the bidirectional wrapper."""

    @staticmethod
    def _zero_params(input_size, hidden):
        weights = {name: np.zeros((hidden + input_size, hidden)) for name in LSTM_FIELDS[:4]}
        biases = {name: np.zeros(hidden) for name in LSTM_FIELDS[4:]}
        return LstmParams(**weights, **biases)

    def test_zero_weights(self):
        """Test all gates sit at 0.5 with zero weights."""
        params = self._zero_params(3, 2)
        state = LstmState(h=np.array([0.4, -0.2]), c=np.array([1.0, -2.0]))
        new = lstm_cell_step(np.array([1.0, 2.0, 3.0]), state, params)
        assert_allclose(new.c, 0.5 * state.c)
        assert_allclose(new.h, 0.5 * np.tanh(new.c))

    def test_saturated_forget_gate(self):
        """Test a large forget bias carries the cell state through."""
        rng = np.random.default_rng(15)
        params = init_lstm(rng, 3, 2)
        params.b_f[:] = 50.0
        state = LstmState(h=rng.normal(size=2), c=rng.normal(size=2))
        x = rng.normal(size=3)
        z = np.concatenate([state.h, x])
        i = 1.0 / (1.0 + np.exp(-(z @ params.w_i + params.b_i)))
        g = np.tanh(z @ params.w_c + params.b_c)
        assert_allclose(lstm_cell_step(x, state, params).c, state.c + i * g, atol=1e-9)

    def test_hand_traced_step(self):
        """Test a fixed 2-unit case against explicit gate arithmetic."""
        w = np.array([[0.1, -0.2], [0.3, 0.4], [-0.5, 0.6]])
        b = np.array([0.05, -0.05])
        params = LstmParams(w, 2 * w, -w, 0.5 * w, b, -b, 2 * b, b)
        x, h0, c0 = np.array([1.0]), np.array([0.2, -0.1]), np.array([0.3, 0.7])
        z = np.concatenate([h0, x])

        def sig(a):
            return 1.0 / (1.0 + np.exp(-a))

        i, f, o = sig(z @ w + b), sig(z @ (2 * w) - b), sig(z @ -w + 2 * b)
        g = np.tanh(z @ (0.5 * w) + b)
        c = f * c0 + i * g
        new = lstm_cell_step(x, LstmState(h0, c0), params)
        assert_allclose(new.c, c, atol=1e-12)
        assert_allclose(new.h, o * np.tanh(c), atol=1e-12)

    def test_input_width_mismatch(self):
        """Test a wrong input width raises ShapeError."""
        with pytest.raises(ShapeError):
            lstm_cell_step(np.ones(4), LstmState.zeros(2), self._zero_params(3, 2))

    def test_bilstm_shapes(self):
        """Test each output concatenates both directions."""
        rng = np.random.default_rng(16)
        fwd, bwd = init_lstm(rng, 6, 256), init_lstm(rng, 6, 256)
        out = bilstm_forward(rng.normal(size=(4, 6)), fwd, bwd)
        assert out.shape == (4, 512)

    def test_bilstm_length_one(self):
        """Test a single step is one forward and one backward step from zero."""
        rng = np.random.default_rng(17)
        fwd, bwd = init_lstm(rng, 3, 2), init_lstm(rng, 3, 2)
        x = rng.normal(size=3)
        out = bilstm_forward([x], fwd, bwd)
        forward = lstm_cell_step(x, LstmState.zeros(2), fwd).h
        backward = lstm_cell_step(x, LstmState.zeros(2), bwd).h
        assert_allclose(out[0], np.concatenate([forward, backward]), atol=1e-12)

    def test_bilstm_direction_symmetry(self):
        """Test shared parameters make the backward half a reversed forward pass."""
        rng = np.random.default_rng(18)
        params = init_lstm(rng, 3, 4)
        seq = rng.normal(size=(5, 3))
        out = bilstm_forward(seq, params, params)
        reversed_out = bilstm_forward(seq[::-1], params, params)
        assert_allclose(reversed_out[:, :4], out[::-1, 4:], atol=1e-12)

    def test_bilstm_empty(self):
        """Test an empty sequence raises EmptySequenceError."""
        params = init_lstm(np.random.default_rng(0), 3, 2)
        with pytest.raises(EmptySequenceError):
            bilstm_forward([], params, params)

    def test_mask_freezes_state(self):
        """Test padded trailing steps leave the forward state unchanged."""
        rng = np.random.default_rng(19)
        fwd, bwd = init_lstm(rng, 3, 2), init_lstm(rng, 3, 2)
        x = rng.normal(size=(1, 4, 3))
        out, _ = bilstm_forward_batch(x, fwd, bwd, np.array([[True, True, False, False]]))
        assert_allclose(out[0, 2, :2], out[0, 1, :2])
        assert_allclose(out[0, 3, :2], out[0, 1, :2])

    def test_backward(self):
        """Test BiLSTM gradients against finite differences."""
        rng = np.random.default_rng(20)
        input_size, hidden = 3, 2
        gate_shapes = [(hidden + input_size, hidden)] * 4 + [(hidden,)] * 4
        shapes = [(2, 3, input_size), *gate_shapes, *gate_shapes]
        mask = np.array([[True, True, True], [True, True, False]])
        upstream = rng.normal(size=(2, 3, 2 * hidden))

        def loss_fn(theta):
            x, *rest = _unpack(theta, shapes)
            fwd = LstmParams(**dict(zip(LSTM_FIELDS, rest[:8], strict=True)))
            bwd = LstmParams(**dict(zip(LSTM_FIELDS, rest[8:], strict=True)))
            out, cache = bilstm_forward_batch(x, fwd, bwd, mask)
            dx, grads_f, grads_b = bilstm_backward(upstream, cache)
            grad = _pack(dx, *(grads_f[n] for n in LSTM_FIELDS), *(grads_b[n] for n in LSTM_FIELDS))
            return float(np.sum(out * upstream)), grad

        theta = _pack(*(rng.normal(scale=0.5, size=s) for s in shapes))
        assert grad_check(loss_fn, theta, floor=GRAD_FLOOR) < GRAD_TOL


class TestCrossEntropy:
    """Tests for the classification loss."""

    def test_one_hot_correct_is_zero(self):
        """Test a confident correct prediction has zero loss."""
        assert cross_entropy_loss(np.array([0.0, 1.0, 0.0]), 1) == 0.0

    def test_uniform(self):
        """Test the uniform distribution over 6 classes gives ln 6."""
        assert cross_entropy_loss(np.full(6, 1 / 6), 4) == pytest.approx(1.79176, abs=1e-5)

    def test_zero_probability_is_finite(self):
        """Test the floor keeps the loss finite."""
        assert math.isfinite(cross_entropy_loss(np.array([1.0, 0.0]), 1))

    def test_floor_offset(self):
        """Test the floored loss caps at -log(CE_FLOOR) and tracks -log(p) elsewhere."""
        assert cross_entropy_loss(np.array([1.0, 0.0]), 1) == pytest.approx(-math.log(CE_FLOOR), rel=1e-9)
        for p in (1e-3, 0.25, 0.9):
            loss = cross_entropy_loss(np.array([1.0 - p, p]), 1)
            assert abs(loss + math.log(p)) < CE_FLOOR / p

    def test_target_out_of_range(self):
        """Test invalid targets raise IndexError."""
        with pytest.raises(IndexError):
            cross_entropy_loss(np.array([0.5, 0.5]), 2)
        with pytest.raises(IndexError):
            cross_entropy_batch(np.full((2, 2), 0.5), np.array([0, -1]))

    def test_batch_is_mean(self):
        """Test the batch loss is the mean of per-sample losses."""
        probs = softmax(np.random.default_rng(21).normal(size=(3, 4)))
        targets = np.array([0, 3, 1])
        loss, _ = cross_entropy_batch(probs, targets)
        expected = np.mean([cross_entropy_loss(p, t) for p, t in zip(probs, targets, strict=True)])
        assert loss == pytest.approx(expected, abs=1e-12)

    def test_weighted_backward_through_softmax(self):
        """Test the class-weighted loss gradient w.r.t. logits."""
        rng = np.random.default_rng(22)
        targets = np.array([0, 2, 2, 1])
        weights = np.array([0.5, 2.0, 1.0])

        def loss_fn(theta):
            probs = softmax(theta.reshape(4, 3))
            loss, dprobs = cross_entropy_batch(probs, targets, weights)
            return loss, softmax_backward(probs, dprobs).ravel()

        assert grad_check(loss_fn, rng.normal(size=12), floor=GRAD_FLOOR) < GRAD_TOL


class TestDropout:
    """Tests for inverted dropout."""

    def test_identity_outside_training(self):
        """Test eval mode and rate 0 leave input untouched."""
        x = np.ones((3, 4))
        out, mask = dropout_forward(x, 0.5, None, train=False)
        assert out is x and mask is None
        assert dropout_forward(x, 0.0, None, train=True)[1] is None
        assert dropout_backward(x, None) is x

    def test_train_scales_kept_units(self):
        """Test kept units are scaled by 1/keep and the mean is preserved."""
        x = np.ones(20_000)
        out, mask = dropout_forward(x, 0.25, np.random.default_rng(23), train=True)
        assert set(np.unique(out)) <= {0.0, 1.0 / 0.75}
        assert out.mean() == pytest.approx(1.0, abs=0.03)
        assert_allclose(dropout_backward(np.ones_like(x), mask), mask)

    def test_train_needs_rng(self):
        """Test training mode without a generator is rejected."""
        with pytest.raises(ValueError):
            dropout_forward(np.ones(3), 0.5, None, train=True)


class TestGradCheck:
    """Tests for the finite-difference oracle itself."""

    def test_linear_least_squares(self):
        """Test an exact quadratic gradient matches closely."""
        rng = np.random.default_rng(24)
        a, b = rng.normal(size=(6, 4)), rng.normal(size=6)

        def loss_fn(x):
            r = a @ x - b
            return 0.5 * float(r @ r), a.T @ r

        assert grad_check(loss_fn, rng.normal(size=4)) < 1e-7

    def test_constant_loss(self):
        """Test a constant loss with a zero gradient reports zero error."""
        assert grad_check(lambda x: (3.0, np.zeros_like(x)), np.ones(5)) < 1e-9

    def test_detects_wrong_gradient(self):
        """Test a wrong analytic gradient is reported."""
        assert grad_check(lambda x: (float(x @ x), x), np.ones(3)) > 0.4

    def test_non_finite(self):
        """Test non-finite losses raise NumericalError."""
        with pytest.raises(NumericalError):
            grad_check(lambda x: (float("nan"), np.zeros_like(x)), np.ones(2))

    def test_invalid_eps(self):
        """Test eps must be positive."""
        with pytest.raises(ValueError):
            grad_check(lambda x: (0.0, x), np.ones(2), eps=0.0)
