"""Dense numeric kernels with explicit backward passes.

Every kernel accepts arrays with leading batch dimensions where that is natural.
``*_forward`` functions return ``(output, cache)``; the matching ``*_backward``
functions take the upstream gradient and the cache. The plain-named functions
(``softmax``, ``scaled_dot_attention``, ...) are the single-call forms.
"""

import logging
import math
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar

import numpy as np

from src.errors import ConfigError, EmptySequenceError, NumericalError, ShapeError
from src.nn.params import AttentionParams, FfnParams, LayerNormParams, LstmParams, LstmState

logger = logging.getLogger(__name__)

# Finite stand-in for -inf on masked attention scores.
MASK_VALUE = -1e9
CE_FLOOR = 1e-12
LN_EPS = 1e-5

_debug_checks: ContextVar[bool] = ContextVar("debug_checks", default=False)


@contextmanager
def debug_checks(enabled: bool = True) -> Iterator[None]:
    """Turn finite-value assertions after every kernel on or off inside the block.

    The previous setting is restored on exit, so nested blocks and concurrent
    runs in other contexts keep their own value.
    """
    token = _debug_checks.set(enabled)
    try:
        yield
    finally:
        _debug_checks.reset(token)


def debug_checks_enabled() -> bool:
    """Whether finite-value checks are active in the current context."""
    return _debug_checks.get()


def check_finite(array: np.ndarray, name: str) -> np.ndarray:
    """Raise NumericalError if debug checks are on and ``array`` has NaN or inf."""
    if _debug_checks.get() and not np.all(np.isfinite(array)):
        raise NumericalError(f"{name} produced non-finite values")
    return array


def _swap(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2)


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Logistic function via tanh; no overflow for large |x|."""
    return 0.5 * (1.0 + np.tanh(0.5 * x))


# ---------------------------------------------------------------------------
# Softmax and attention


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    """Numerically stable softmax (max-subtracted)."""
    logits = np.asarray(logits)
    shifted = logits - np.max(logits, axis=axis, keepdims=True)
    exp = np.exp(shifted)
    return check_finite(exp / np.sum(exp, axis=axis, keepdims=True), "softmax")


def softmax_backward(probs: np.ndarray, dprobs: np.ndarray, axis: int = -1) -> np.ndarray:
    """Gradient w.r.t. logits given softmax output and upstream gradient."""
    return probs * (dprobs - np.sum(dprobs * probs, axis=axis, keepdims=True))


def attention_forward(
    q: np.ndarray,
    k: np.ndarray,
    v: np.ndarray,
    mask: np.ndarray | None = None,
) -> tuple[np.ndarray, tuple]:
    """softmax(Q Kᵀ / sqrt(d_k)) V over the last two axes.

    Args:
        q: (..., Lq, d_k)
        k: (..., Lk, d_k)
        v: (..., Lk, d_v)
        mask: Optional boolean (..., Lk); False marks keys to ignore

    Returns:
        (output (..., Lq, d_v), cache)
    """
    if q.shape[-1] != k.shape[-1]:
        raise ShapeError(f"Q and K widths differ: {q.shape[-1]} vs {k.shape[-1]}")
    if k.shape[-2] != v.shape[-2]:
        raise ShapeError(f"K and V lengths differ: {k.shape[-2]} vs {v.shape[-2]}")
    d_k = q.shape[-1]
    scores = q @ _swap(k) / math.sqrt(d_k)
    if mask is not None:
        scores = np.where(mask[..., None, :], scores, MASK_VALUE)
    weights = softmax(scores)
    out = check_finite(weights @ v, "attention")
    return out, (q, k, v, weights)


def attention_backward(dout: np.ndarray, cache: tuple) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients (dq, dk, dv) of attention_forward."""
    q, k, v, weights = cache
    d_k = q.shape[-1]
    dv = _swap(weights) @ dout
    dweights = dout @ _swap(v)
    dscores = softmax_backward(weights, dweights) / math.sqrt(d_k)
    dq = dscores @ k
    dk = _swap(dscores) @ q
    return dq, dk, dv


def attention_weights(q: np.ndarray, k: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
    """Row-stochastic attention weight matrix softmax(Q Kᵀ / sqrt(d_k))."""
    if q.shape[-1] != k.shape[-1]:
        raise ShapeError(f"Q and K widths differ: {q.shape[-1]} vs {k.shape[-1]}")
    scores = q @ _swap(k) / math.sqrt(q.shape[-1])
    if mask is not None:
        scores = np.where(mask[..., None, :], scores, MASK_VALUE)
    return softmax(scores)


def scaled_dot_attention(
    q: np.ndarray, k: np.ndarray, v: np.ndarray, mask: np.ndarray | None = None
) -> np.ndarray:
    """Scaled dot-product attention; each output row is a convex combination of V's rows."""
    return attention_forward(q, k, v, mask)[0]


def _as_batch(x: np.ndarray) -> tuple[np.ndarray, bool]:
    if x.ndim == 2:
        return x[None], True
    if x.ndim == 3:
        return x, False
    raise ShapeError(f"expected a (seq_len, d) or (batch, seq_len, d) array, got {x.shape}")


def mha_forward(
    x: np.ndarray, params: AttentionParams, mask: np.ndarray | None = None
) -> tuple[np.ndarray, tuple]:
    """Multi-head self-attention, Concat(head_1..head_h) W_O.

    Args:
        x: (batch, seq_len, d_model)
        params: Projections
        mask: Optional boolean (batch, seq_len), False on padding
    """
    if x.shape[-1] != params.d_model:
        raise ShapeError(f"input width {x.shape[-1]} != d_model {params.d_model}")
    q = np.einsum("bld,hdk->bhlk", x, params.w_q)
    k = np.einsum("bld,hdk->bhlk", x, params.w_k)
    v = np.einsum("bld,hdk->bhlk", x, params.w_v)
    heads, attn_cache = attention_forward(q, k, v, None if mask is None else mask[:, None, :])
    batch, h, seq_len, d_k = heads.shape
    concat = heads.transpose(0, 2, 1, 3).reshape(batch, seq_len, h * d_k)
    out = check_finite(concat @ params.w_o, "multi_head_attention")
    return out, (x, params, attn_cache, concat)


def mha_backward(dout: np.ndarray, cache: tuple) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Returns dx and gradients keyed w_q, w_k, w_v, w_o."""
    x, params, attn_cache, concat = cache
    batch, seq_len, _ = x.shape
    h, d_k = params.num_heads, params.d_k
    grads = {"w_o": np.einsum("blc,bld->cd", concat, dout)}
    dconcat = dout @ params.w_o.T
    dheads = dconcat.reshape(batch, seq_len, h, d_k).transpose(0, 2, 1, 3)
    dq, dk, dv = attention_backward(dheads, attn_cache)
    grads["w_q"] = np.einsum("bld,bhlk->hdk", x, dq)
    grads["w_k"] = np.einsum("bld,bhlk->hdk", x, dk)
    grads["w_v"] = np.einsum("bld,bhlk->hdk", x, dv)
    dx = (
        np.einsum("bhlk,hdk->bld", dq, params.w_q)
        + np.einsum("bhlk,hdk->bld", dk, params.w_k)
        + np.einsum("bhlk,hdk->bld", dv, params.w_v)
    )
    return dx, grads


def multi_head_attention(
    x: np.ndarray, params: AttentionParams, mask: np.ndarray | None = None
) -> np.ndarray:
    """Multi-head self-attention over (seq_len, d_model) or (batch, seq_len, d_model)."""
    batch, squeeze = _as_batch(np.asarray(x))
    if mask is not None and squeeze:
        mask = mask[None]
    out = mha_forward(batch, params, mask)[0]
    return out[0] if squeeze else out


# ---------------------------------------------------------------------------
# Feed-forward, layer norm, positional encoding


def ffn_forward(x: np.ndarray, params: FfnParams) -> tuple[np.ndarray, tuple]:
    if x.shape[-1] != params.w1.shape[0]:
        raise ShapeError(f"input width {x.shape[-1]} != d_model {params.w1.shape[0]}")
    pre = x @ params.w1 + params.b1
    hidden = np.maximum(pre, 0.0)
    out = check_finite(hidden @ params.w2 + params.b2, "position_wise_ffn")
    return out, (x, pre, hidden, params)


def ffn_backward(dout: np.ndarray, cache: tuple) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Returns dx and gradients keyed w1, b1, w2, b2."""
    x, pre, hidden, params = cache
    d_model, d_ff = params.w1.shape
    dout2 = dout.reshape(-1, d_model)
    hidden2 = hidden.reshape(-1, d_ff)
    grads = {"w2": hidden2.T @ dout2, "b2": dout2.sum(axis=0)}
    dpre = (dout2 @ params.w2.T) * (pre.reshape(-1, d_ff) > 0)
    grads["w1"] = x.reshape(-1, d_model).T @ dpre
    grads["b1"] = dpre.sum(axis=0)
    return (dpre @ params.w1.T).reshape(x.shape), grads


def position_wise_ffn(x: np.ndarray, params: FfnParams) -> np.ndarray:
    """max(0, x W1 + b1) W2 + b2, applied to the last axis."""
    return ffn_forward(np.asarray(x), params)[0]


def layer_norm_forward(
    x: np.ndarray, params: LayerNormParams, eps: float = LN_EPS
) -> tuple[np.ndarray, tuple]:
    mean = x.mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(x.var(axis=-1, keepdims=True) + eps)
    xhat = (x - mean) * inv_std
    out = check_finite(params.gamma * xhat + params.beta, "layer_norm")
    return out, (xhat, inv_std, params)


def layer_norm_backward(dout: np.ndarray, cache: tuple) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Returns dx and gradients keyed gamma, beta."""
    xhat, inv_std, params = cache
    width = xhat.shape[-1]
    grads = {
        "gamma": (dout * xhat).reshape(-1, width).sum(axis=0),
        "beta": dout.reshape(-1, width).sum(axis=0),
    }
    dxhat = dout * params.gamma
    dx = (inv_std / width) * (
        width * dxhat
        - dxhat.sum(axis=-1, keepdims=True)
        - xhat * (dxhat * xhat).sum(axis=-1, keepdims=True)
    )
    return dx, grads


def layer_norm(x: np.ndarray, params: LayerNormParams, eps: float = LN_EPS) -> np.ndarray:
    return layer_norm_forward(np.asarray(x), params, eps)[0]


def positional_encoding(
    seq_len: int, d_model: int, dtype: np.dtype | type = np.float64
) -> np.ndarray:
    """Sinusoidal encoding: PE[pos, 2i] = sin(pos / 10000^(2i/d)), PE[pos, 2i+1] = cos(...).

    Raises:
        ConfigError: If d_model is odd or seq_len < 1
    """
    if d_model % 2:
        raise ConfigError(f"positional encoding needs an even d_model, got {d_model}")
    if seq_len < 1:
        raise ConfigError(f"seq_len must be >= 1, got {seq_len}")
    positions = np.arange(seq_len, dtype=np.float64)[:, None]
    even_dims = np.arange(0, d_model, 2, dtype=np.float64)[None, :]
    angles = positions / np.power(10000.0, even_dims / d_model)
    pe = np.empty((seq_len, d_model), dtype=np.float64)
    pe[:, 0::2] = np.sin(angles)
    pe[:, 1::2] = np.cos(angles)
    return pe.astype(dtype)


# ---------------------------------------------------------------------------
# LSTM


def lstm_step_forward(
    x: np.ndarray,
    h_prev: np.ndarray,
    c_prev: np.ndarray,
    params: LstmParams,
    mask: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, tuple]:
    """One LSTM step over [h_{t-1}, x_t].

    Where ``mask`` (shape (batch,)) is False the previous state is carried through
    unchanged, so padded steps leave the state as it was.
    """
    if x.shape[-1] != params.input_size:
        raise ShapeError(f"input width {x.shape[-1]} != LSTM input size {params.input_size}")
    if h_prev.shape[-1] != params.hidden or c_prev.shape[-1] != params.hidden:
        raise ShapeError(f"state width must be {params.hidden}")
    z = np.concatenate([h_prev, x], axis=-1)
    i = sigmoid(z @ params.w_i + params.b_i)
    f = sigmoid(z @ params.w_f + params.b_f)
    o = sigmoid(z @ params.w_o + params.b_o)
    g = np.tanh(z @ params.w_c + params.b_c)
    c = f * c_prev + i * g
    tanh_c = np.tanh(c)
    h = o * tanh_c
    m = None
    if mask is not None:
        m = mask.astype(h.dtype)[..., None]
        c = m * c + (1.0 - m) * c_prev
        h = m * h + (1.0 - m) * h_prev
    check_finite(h, "lstm_cell_step")
    return h, c, (z, i, f, o, g, c_prev, tanh_c, m)


def lstm_step_backward(
    dh: np.ndarray,
    dc: np.ndarray,
    cache: tuple,
    params: LstmParams,
    grads: dict[str, np.ndarray],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Backward through one step; accumulates parameter gradients into ``grads``.

    Returns:
        (dx, dh_prev, dc_prev)
    """
    z, i, f, o, g, c_prev, tanh_c, m = cache
    hidden = params.hidden
    if m is None:
        dh_carry = dc_carry = 0.0
    else:
        dh_carry, dc_carry = (1.0 - m) * dh, (1.0 - m) * dc
        dh, dc = m * dh, m * dc
    dc_total = dc + dh * o * (1.0 - tanh_c**2)
    da = {
        "i": dc_total * g * i * (1.0 - i),
        "f": dc_total * c_prev * f * (1.0 - f),
        "o": dh * tanh_c * o * (1.0 - o),
        "c": dc_total * i * (1.0 - g**2),
    }
    z2 = z.reshape(-1, z.shape[-1])
    dz = np.zeros_like(z)
    for gate, (w, _b) in zip("ifoc", params.gates(), strict=True):
        da2 = da[gate].reshape(-1, hidden)
        grads[f"w_{gate}"] += z2.T @ da2
        grads[f"b_{gate}"] += da2.sum(axis=0)
        dz += da[gate] @ w.T
    dc_prev = dc_total * f + dc_carry
    dh_prev = dz[..., :hidden] + dh_carry
    return dz[..., hidden:], dh_prev, dc_prev


def lstm_cell_step(x_t: np.ndarray, state: LstmState, params: LstmParams) -> LstmState:
    """Advance an LSTM state by one input vector."""
    h, c, _ = lstm_step_forward(np.asarray(x_t), state.h, state.c, params)
    return LstmState(h=h, c=c)


def lstm_param_grads(params: LstmParams) -> dict[str, np.ndarray]:
    return {
        name: np.zeros_like(getattr(params, name))
        for name in ("w_i", "w_f", "w_o", "w_c", "b_i", "b_f", "b_o", "b_c")
    }


def bilstm_forward_batch(
    x: np.ndarray,
    fwd: LstmParams,
    bwd: LstmParams,
    mask: np.ndarray | None = None,
) -> tuple[np.ndarray, tuple]:
    """Bidirectional LSTM over (batch, seq_len, input) from zero states.

    Returns:
        (outputs (batch, seq_len, 2 * hidden), cache); output t is
        concat(forward state at t, backward state at t)
    """
    batch, seq_len, _ = x.shape
    if seq_len == 0:
        raise EmptySequenceError("bilstm needs at least one time step")
    if fwd.hidden != bwd.hidden:
        raise ShapeError("forward and backward LSTMs must share a hidden size")
    hidden = fwd.hidden
    out = np.empty((batch, seq_len, 2 * hidden), dtype=x.dtype)
    caches_f: list[tuple] = [()] * seq_len
    caches_b: list[tuple] = [()] * seq_len

    h = np.zeros((batch, hidden), dtype=x.dtype)
    c = np.zeros_like(h)
    for t in range(seq_len):
        h, c, caches_f[t] = lstm_step_forward(x[:, t], h, c, fwd, None if mask is None else mask[:, t])
        out[:, t, :hidden] = h

    h = np.zeros((batch, hidden), dtype=x.dtype)
    c = np.zeros_like(h)
    for t in reversed(range(seq_len)):
        h, c, caches_b[t] = lstm_step_forward(x[:, t], h, c, bwd, None if mask is None else mask[:, t])
        out[:, t, hidden:] = h

    return out, (x.shape, fwd, bwd, caches_f, caches_b)


def bilstm_backward(
    dout: np.ndarray, cache: tuple
) -> tuple[np.ndarray, dict[str, np.ndarray], dict[str, np.ndarray]]:
    """Backpropagation through time for bilstm_forward_batch.

    Returns:
        (dx, forward-direction grads, backward-direction grads)
    """
    x_shape, fwd, bwd, caches_f, caches_b = cache
    batch, seq_len, _ = x_shape
    hidden = fwd.hidden
    dx = np.zeros(x_shape, dtype=dout.dtype)
    grads_f = lstm_param_grads(fwd)
    grads_b = lstm_param_grads(bwd)

    dh = np.zeros((batch, hidden), dtype=dout.dtype)
    dc = np.zeros_like(dh)
    for t in reversed(range(seq_len)):
        dx_t, dh, dc = lstm_step_backward(dh + dout[:, t, :hidden], dc, caches_f[t], fwd, grads_f)
        dx[:, t] += dx_t

    dh = np.zeros((batch, hidden), dtype=dout.dtype)
    dc = np.zeros_like(dh)
    for t in range(seq_len):
        dx_t, dh, dc = lstm_step_backward(dh + dout[:, t, hidden:], dc, caches_b[t], bwd, grads_b)
        dx[:, t] += dx_t

    return dx, grads_f, grads_b


def bilstm_forward(sequence: np.ndarray | list[np.ndarray], fwd: LstmParams, bwd: LstmParams) -> np.ndarray:
    """Bidirectional LSTM over one sequence of input vectors.

    Returns:
        (seq_len, 2 * hidden) array, one output vector per time step

    Raises:
        EmptySequenceError: If the sequence is empty
    """
    if len(sequence) == 0:
        raise EmptySequenceError("bilstm needs at least one time step")
    x = np.asarray(sequence)
    return bilstm_forward_batch(x[None], fwd, bwd)[0][0]


# ---------------------------------------------------------------------------
# Loss and dropout


def cross_entropy_loss(probs: np.ndarray, target: int) -> float:
    """Negative log-likelihood of the target class.

    Computed as ``log(1 + CE_FLOOR) - log(p + CE_FLOOR)`` with ``p = probs[target]``.
    The floor keeps the loss finite at p = 0 (it is then ``-log(CE_FLOOR)``, about
    27.6); the ``log1p(CE_FLOOR)`` offset makes it exactly 0 at p = 1. For any
    other p the result differs from ``-log(p)`` by less than ``CE_FLOOR / p``.
    ``cross_entropy_batch`` uses the same form.

    Raises:
        IndexError: If target is out of range
    """
    probs = np.asarray(probs)
    if not 0 <= target < probs.shape[-1]:
        raise IndexError(f"target {target} out of range for {probs.shape[-1]} classes")
    return float(np.log1p(CE_FLOOR) - np.log(probs[target] + CE_FLOOR))


def cross_entropy_batch(
    probs: np.ndarray,
    targets: np.ndarray,
    class_weights: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Mean (optionally class-weighted) cross-entropy over a batch.

    Args:
        probs: (batch, num_classes)
        targets: (batch,) integer class indices
        class_weights: Optional (num_classes,) per-class loss weights

    Returns:
        (loss, gradient w.r.t. probs)
    """
    batch, num_classes = probs.shape
    targets = np.asarray(targets, dtype=np.int64)
    if targets.shape != (batch,):
        raise ShapeError(f"targets must have shape ({batch},), got {targets.shape}")
    if np.any(targets < 0) or np.any(targets >= num_classes):
        raise IndexError(f"target out of range for {num_classes} classes")
    rows = np.arange(batch)
    p_target = probs[rows, targets]
    losses = np.log1p(CE_FLOOR) - np.log(p_target + CE_FLOOR)
    weights = np.ones(batch, dtype=probs.dtype) if class_weights is None else class_weights[targets]
    loss = float(np.mean(weights * losses))
    dprobs = np.zeros_like(probs)
    dprobs[rows, targets] = -weights / (p_target + CE_FLOOR) / batch
    return loss, dprobs


def dropout_forward(
    x: np.ndarray, rate: float, rng: np.random.Generator | None, train: bool
) -> tuple[np.ndarray, np.ndarray | None]:
    """Inverted dropout; identity outside training or at rate 0."""
    if not train or rate == 0.0:
        return x, None
    if rng is None:
        raise ValueError("dropout in train mode needs a random generator")
    keep = 1.0 - rate
    mask = (rng.random(x.shape) < keep).astype(x.dtype) / keep
    return x * mask, mask


def dropout_backward(dout: np.ndarray, mask: np.ndarray | None) -> np.ndarray:
    return dout if mask is None else dout * mask
