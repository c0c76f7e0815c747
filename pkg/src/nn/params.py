"""Parameter containers and initialization for the numeric kernels.

Containers hold references to arrays owned elsewhere (normally a model's flat
parameter dictionary), so updating the dictionary in place updates every view.
"""

from dataclasses import dataclass

import numpy as np

from src.errors import ShapeError


@dataclass
class AttentionParams:
    """Multi-head attention projections.

    Attributes:
        w_q: Per-head query projections, shape (num_heads, d_model, d_k)
        w_k: Per-head key projections, shape (num_heads, d_model, d_k)
        w_v: Per-head value projections, shape (num_heads, d_model, d_k)
        w_o: Output projection, shape (num_heads * d_k, d_model)
    """

    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray
    w_o: np.ndarray

    def __post_init__(self) -> None:
        if self.w_q.ndim != 3 or not (self.w_q.shape == self.w_k.shape == self.w_v.shape):
            raise ShapeError(
                f"per-head projections must share a 3-D shape, got "
                f"{self.w_q.shape}, {self.w_k.shape}, {self.w_v.shape}"
            )
        h, d_model, d_k = self.w_q.shape
        if self.w_o.shape != (h * d_k, d_model):
            raise ShapeError(f"w_o must be {(h * d_k, d_model)}, got {self.w_o.shape}")

    @property
    def num_heads(self) -> int:
        return self.w_q.shape[0]

    @property
    def d_model(self) -> int:
        return self.w_q.shape[1]

    @property
    def d_k(self) -> int:
        return self.w_q.shape[2]


@dataclass
class FfnParams:
    """Position-wise feed-forward weights: max(0, x W1 + b1) W2 + b2."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def __post_init__(self) -> None:
        d_model, d_ff = self.w1.shape
        if self.b1.shape != (d_ff,) or self.w2.shape != (d_ff, d_model) or self.b2.shape != (d_model,):
            raise ShapeError(
                f"inconsistent FFN shapes: w1 {self.w1.shape}, b1 {self.b1.shape}, "
                f"w2 {self.w2.shape}, b2 {self.b2.shape}"
            )


@dataclass
class LayerNormParams:
    """Layer-norm scale and shift."""

    gamma: np.ndarray
    beta: np.ndarray


@dataclass
class LstmParams:
    """LSTM gate weights over the concatenation [h_{t-1}, x_t].

    Attributes:
        w_i, w_f, w_o, w_c: Shape (hidden + input, hidden)
        b_i, b_f, b_o, b_c: Shape (hidden,)
    """

    w_i: np.ndarray
    w_f: np.ndarray
    w_o: np.ndarray
    w_c: np.ndarray
    b_i: np.ndarray
    b_f: np.ndarray
    b_o: np.ndarray
    b_c: np.ndarray

    def __post_init__(self) -> None:
        shape = self.w_i.shape
        if len(shape) != 2 or any(w.shape != shape for w in (self.w_f, self.w_o, self.w_c)):
            raise ShapeError("LSTM gate weights must share one 2-D shape")
        hidden = shape[1]
        if shape[0] <= hidden:
            raise ShapeError(f"gate weight rows ({shape[0]}) must exceed hidden size ({hidden})")
        if any(b.shape != (hidden,) for b in (self.b_i, self.b_f, self.b_o, self.b_c)):
            raise ShapeError(f"LSTM gate biases must have shape ({hidden},)")

    @property
    def hidden(self) -> int:
        return self.w_i.shape[1]

    @property
    def input_size(self) -> int:
        return self.w_i.shape[0] - self.hidden

    def gates(self) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
        """(weight, bias) pairs in i, f, o, c order."""
        return (
            (self.w_i, self.b_i),
            (self.w_f, self.b_f),
            (self.w_o, self.b_o),
            (self.w_c, self.b_c),
        )


@dataclass
class LstmState:
    """Hidden and cell state; vectors of size hidden (or (batch, hidden))."""

    h: np.ndarray
    c: np.ndarray

    @classmethod
    def zeros(cls, hidden: int, batch: int | None = None, dtype: np.dtype | type = np.float64) -> "LstmState":
        shape = (hidden,) if batch is None else (batch, hidden)
        return cls(h=np.zeros(shape, dtype=dtype), c=np.zeros(shape, dtype=dtype))


def xavier_uniform(
    rng: np.random.Generator,
    shape: tuple[int, ...],
    fan_in: int | None = None,
    fan_out: int | None = None,
    dtype: np.dtype | type = np.float64,
) -> np.ndarray:
    """Sample uniformly from ±sqrt(6 / (fan_in + fan_out)).

    Fans default to the last two dimensions of ``shape``.
    """
    fan_in = shape[-2] if fan_in is None else fan_in
    fan_out = shape[-1] if fan_out is None else fan_out
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


def init_attention(
    rng: np.random.Generator, d_model: int, num_heads: int, dtype: np.dtype | type = np.float64
) -> AttentionParams:
    if d_model % num_heads:
        raise ShapeError(f"d_model {d_model} is not divisible by num_heads {num_heads}")
    d_k = d_model // num_heads
    shape = (num_heads, d_model, d_k)
    return AttentionParams(
        w_q=xavier_uniform(rng, shape, dtype=dtype),
        w_k=xavier_uniform(rng, shape, dtype=dtype),
        w_v=xavier_uniform(rng, shape, dtype=dtype),
        w_o=xavier_uniform(rng, (num_heads * d_k, d_model), dtype=dtype),
    )


def init_ffn(
    rng: np.random.Generator, d_model: int, d_ff: int, dtype: np.dtype | type = np.float64
) -> FfnParams:
    return FfnParams(
        w1=xavier_uniform(rng, (d_model, d_ff), dtype=dtype),
        b1=np.zeros(d_ff, dtype=dtype),
        w2=xavier_uniform(rng, (d_ff, d_model), dtype=dtype),
        b2=np.zeros(d_model, dtype=dtype),
    )


def init_lstm(
    rng: np.random.Generator, input_size: int, hidden: int, dtype: np.dtype | type = np.float64
) -> LstmParams:
    shape = (hidden + input_size, hidden)
    return LstmParams(
        w_i=xavier_uniform(rng, shape, dtype=dtype),
        w_f=xavier_uniform(rng, shape, dtype=dtype),
        w_o=xavier_uniform(rng, shape, dtype=dtype),
        w_c=xavier_uniform(rng, shape, dtype=dtype),
        b_i=np.zeros(hidden, dtype=dtype),
        b_f=np.zeros(hidden, dtype=dtype),
        b_o=np.zeros(hidden, dtype=dtype),
        b_c=np.zeros(hidden, dtype=dtype),
    )
