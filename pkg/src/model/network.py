"""Transformer-encoder classifier with a BiLSTM head.

Pipeline per sample: token embeddings (scaled by sqrt(d_model)) plus sinusoidal
positions, ``num_layers`` post-norm encoder layers (self-attention, residual, layer
norm, feed-forward, residual, layer norm), then either a BiLSTM over the encoder
states or the CLS state alone, dropout, an affine map and a softmax.

Parameters live in one flat ``dict[str, np.ndarray]``:

- ``embedding``
- ``encoder.{l}.attn.{w_q,w_k,w_v,w_o}``, ``encoder.{l}.ln1.{gamma,beta}``,
  ``encoder.{l}.ffn.{w1,b1,w2,b2}``, ``encoder.{l}.ln2.{gamma,beta}``
- ``lstm.fwd.*`` and ``lstm.bwd.*`` (gate weights and biases)
- ``classifier.weight``, ``classifier.bias``

Layer groups for discriminative learning rates and unfreezing: 0 is the embedding,
``l + 1`` is encoder layer ``l``, ``num_layers + 1`` is the head (LSTM and classifier).
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.corpus.labels import Language, OffenseLabel
from src.errors import ConfigError, NumericalError, ShapeError
from src.model.config import ModelConfig
from src.model.vocab import PAD_ID, Vocab, encode_batch
from src.nn import kernels
from src.nn.params import (
    AttentionParams,
    FfnParams,
    LayerNormParams,
    LstmParams,
    init_attention,
    init_ffn,
    init_lstm,
    xavier_uniform,
)
from src.utils.seeding import substream

logger = logging.getLogger(__name__)

_LSTM_FIELDS = ("w_i", "w_f", "w_o", "w_c", "b_i", "b_f", "b_o", "b_c")


@dataclass
class EncoderOutput:
    """Encoder result for a batch.

    Attributes:
        sequence_states: Final-layer states, shape (batch, seq_len, d_model)
        pooled: CLS-position states, shape (batch, d_model); equals sequence_states[:, 0]
    """

    sequence_states: np.ndarray
    pooled: np.ndarray


def expected_shapes(config: ModelConfig, vocab_size: int) -> dict[str, tuple[int, ...]]:
    """Name to shape of every parameter for a config and vocabulary size."""
    d, h = config.d_model, config.num_heads
    d_k = d // h
    shapes: dict[str, tuple[int, ...]] = {"embedding": (vocab_size, d)}
    for layer in range(config.num_layers):
        prefix = f"encoder.{layer}"
        for name in ("w_q", "w_k", "w_v"):
            shapes[f"{prefix}.attn.{name}"] = (h, d, d_k)
        shapes[f"{prefix}.attn.w_o"] = (h * d_k, d)
        shapes[f"{prefix}.ln1.gamma"] = (d,)
        shapes[f"{prefix}.ln1.beta"] = (d,)
        shapes[f"{prefix}.ffn.w1"] = (d, config.d_ff)
        shapes[f"{prefix}.ffn.b1"] = (config.d_ff,)
        shapes[f"{prefix}.ffn.w2"] = (config.d_ff, d)
        shapes[f"{prefix}.ffn.b2"] = (d,)
        shapes[f"{prefix}.ln2.gamma"] = (d,)
        shapes[f"{prefix}.ln2.beta"] = (d,)
    if config.use_bilstm_head:
        hidden = config.lstm_hidden
        for direction in ("fwd", "bwd"):
            for name in _LSTM_FIELDS:
                shape = (hidden + d, hidden) if name.startswith("w_") else (hidden,)
                shapes[f"lstm.{direction}.{name}"] = shape
        feature_size = 2 * config.lstm_hidden
    else:
        feature_size = d
    shapes["classifier.weight"] = (feature_size, config.num_classes)
    shapes["classifier.bias"] = (config.num_classes,)
    return shapes


def layer_group(name: str, num_layers: int) -> int:
    """Layer group of a parameter name (0 = embedding, top = head)."""
    if name == "embedding":
        return 0
    if name.startswith("encoder."):
        return int(name.split(".")[1]) + 1
    return num_layers + 1


class ClassifierModel:
    """Vocabulary, configuration and weights of one classifier.

    ``language`` fixes the output label order (the language's label set). It may be
    None for label-free uses such as gradient checks, in which case predictions are
    class indices only.
    """

    def __init__(
        self,
        vocab: Vocab,
        config: ModelConfig,
        params: dict[str, np.ndarray],
        language: Language | None = None,
    ):
        if language is not None:
            config.check_language(language)
        expected = expected_shapes(config, len(vocab))
        if set(params) != set(expected):
            missing = sorted(set(expected) - set(params))
            extra = sorted(set(params) - set(expected))
            raise ShapeError(f"parameter names disagree with config: missing {missing}, extra {extra}")
        for name, shape in expected.items():
            if params[name].shape != shape:
                raise ShapeError(f"{name} has shape {params[name].shape}, expected {shape}")
        self.vocab = vocab
        self.config = config
        self.language = language
        self.params = {name: params[name] for name in expected}

    @classmethod
    def initialize(
        cls, vocab: Vocab, config: ModelConfig, language: Language | None = None
    ) -> "ClassifierModel":
        """Fresh weights: Xavier-uniform matrices, zero biases, unit layer-norm scale."""
        rng = substream(config.seed, "init")
        dtype = config.np_dtype
        d = config.d_model
        params: dict[str, np.ndarray] = {
            "embedding": xavier_uniform(rng, (len(vocab), d), dtype=dtype)
        }
        for layer in range(config.num_layers):
            prefix = f"encoder.{layer}"
            attn = init_attention(rng, d, config.num_heads, dtype=dtype)
            for name in ("w_q", "w_k", "w_v", "w_o"):
                params[f"{prefix}.attn.{name}"] = getattr(attn, name)
            ffn = init_ffn(rng, d, config.d_ff, dtype=dtype)
            for name in ("w1", "b1", "w2", "b2"):
                params[f"{prefix}.ffn.{name}"] = getattr(ffn, name)
            for norm in ("ln1", "ln2"):
                params[f"{prefix}.{norm}.gamma"] = np.ones(d, dtype=dtype)
                params[f"{prefix}.{norm}.beta"] = np.zeros(d, dtype=dtype)
        if config.use_bilstm_head:
            for direction in ("fwd", "bwd"):
                lstm = init_lstm(rng, d, config.lstm_hidden, dtype=dtype)
                for name in _LSTM_FIELDS:
                    params[f"lstm.{direction}.{name}"] = getattr(lstm, name)
            feature_size = 2 * config.lstm_hidden
        else:
            feature_size = d
        params["classifier.weight"] = xavier_uniform(rng, (feature_size, config.num_classes), dtype=dtype)
        params["classifier.bias"] = np.zeros(config.num_classes, dtype=dtype)
        logger.debug(
            "Initialized classifier with %d parameters", sum(p.size for p in params.values())
        )
        return cls(vocab, config, params, language)

    @property
    def num_layer_groups(self) -> int:
        return self.config.num_layers + 2

    @property
    def labels(self) -> tuple[OffenseLabel, ...]:
        """Output labels in class-index order.

        Raises:
            ConfigError: If the model has no language
        """
        if self.language is None:
            raise ConfigError("model has no language, so its outputs carry no labels")
        return self.language.labels

    def class_index(self, label: OffenseLabel) -> int:
        return self.labels.index(label)

    def attention(self, layer: int) -> AttentionParams:
        p = f"encoder.{layer}.attn"
        return AttentionParams(
            self.params[f"{p}.w_q"], self.params[f"{p}.w_k"], self.params[f"{p}.w_v"], self.params[f"{p}.w_o"]
        )

    def ffn(self, layer: int) -> FfnParams:
        p = f"encoder.{layer}.ffn"
        return FfnParams(
            self.params[f"{p}.w1"], self.params[f"{p}.b1"], self.params[f"{p}.w2"], self.params[f"{p}.b2"]
        )

    def layer_norm(self, layer: int, which: str) -> LayerNormParams:
        p = f"encoder.{layer}.{which}"
        return LayerNormParams(self.params[f"{p}.gamma"], self.params[f"{p}.beta"])

    def lstm(self, direction: str) -> LstmParams:
        return LstmParams(**{name: self.params[f"lstm.{direction}.{name}"] for name in _LSTM_FIELDS})

    def copy(self) -> "ClassifierModel":
        """Independent copy with its own parameter arrays."""
        params = {name: value.copy() for name, value in self.params.items()}
        return ClassifierModel(self.vocab, self.config.model_copy(), params, self.language)

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        return encode_batch(texts, self.vocab, self.config.max_len)

    def predict_proba(self, texts: Sequence[str]) -> np.ndarray:
        """Class probabilities in evaluation mode, shape (len(texts), num_classes)."""
        ids = self.encode(texts)
        return predict_ids(self, ids)


# ---------------------------------------------------------------------------
# Forward and backward


def _check_ids(model: ClassifierModel, ids: np.ndarray) -> np.ndarray:
    ids = np.asarray(ids)
    if ids.ndim != 2:
        raise ShapeError(f"expected a (batch, seq_len) id array, got shape {ids.shape}")
    if ids.size and (ids.min() < 0 or ids.max() >= len(model.vocab)):
        raise IndexError(f"token id out of range for a vocabulary of {len(model.vocab)}")
    return ids.astype(np.int64, copy=False)


def encode_sequences(
    model: ClassifierModel, ids: np.ndarray
) -> tuple[EncoderOutput, np.ndarray, tuple]:
    """Run the embedding and encoder stack.

    The batch is trimmed after its last non-PAD column; trimmed positions are
    padding in every row and would be masked anyway.

    Returns:
        (encoder output, trimmed key mask (batch, seq_len), cache)
    """
    ids = _check_ids(model, ids)
    used = np.flatnonzero((ids != PAD_ID).any(axis=0))
    seq_len = int(used[-1]) + 1 if used.size else 1
    ids = ids[:, :seq_len]
    mask = ids != PAD_ID
    config = model.config
    scale = math.sqrt(config.d_model)
    pe = kernels.positional_encoding(seq_len, config.d_model, dtype=config.np_dtype)
    x = model.params["embedding"][ids] * scale + pe
    layer_caches = []
    for layer in range(config.num_layers):
        attn_out, attn_cache = kernels.mha_forward(x, model.attention(layer), mask)
        x1, ln1_cache = kernels.layer_norm_forward(x + attn_out, model.layer_norm(layer, "ln1"))
        ffn_out, ffn_cache = kernels.ffn_forward(x1, model.ffn(layer))
        x, ln2_cache = kernels.layer_norm_forward(x1 + ffn_out, model.layer_norm(layer, "ln2"))
        layer_caches.append((attn_cache, ln1_cache, ffn_cache, ln2_cache))
    output = EncoderOutput(sequence_states=x, pooled=x[:, 0])
    return output, mask, (ids, scale, layer_caches)


def forward_pass(
    model: ClassifierModel,
    ids: np.ndarray,
    train_mode: bool = False,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, tuple]:
    """Probabilities (batch, num_classes) and the cache backward_pass needs."""
    encoded, mask, encoder_cache = encode_sequences(model, ids)
    states = encoded.sequence_states
    seq_len = states.shape[1]
    lstm_cache = None
    if model.config.use_bilstm_head:
        hidden = model.config.lstm_hidden
        lstm_out, lstm_cache = kernels.bilstm_forward_batch(
            states, model.lstm("fwd"), model.lstm("bwd"), mask
        )
        # Forward direction carries its last real state through padding to the end.
        features = np.concatenate([lstm_out[:, seq_len - 1, :hidden], lstm_out[:, 0, hidden:]], axis=-1)
    else:
        features = encoded.pooled
    dropped, dropout_mask = kernels.dropout_forward(features, model.config.dropout, rng, train_mode)
    logits = dropped @ model.params["classifier.weight"] + model.params["classifier.bias"]
    probs = kernels.softmax(logits)
    if not np.all(np.isfinite(probs)):
        raise NumericalError("classifier produced non-finite probabilities")
    cache = (encoder_cache, states.shape, lstm_cache, dropped, dropout_mask, probs)
    return probs, cache


def forward(
    model: ClassifierModel,
    batch: np.ndarray | Sequence[Sequence[int]],
    train_mode: bool = False,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Per-sample class probabilities for a batch of id sequences.

    Raises:
        IndexError: If an id is outside the vocabulary
    """
    return forward_pass(model, np.asarray(batch), train_mode, rng)[0]


def backward_pass(model: ClassifierModel, dprobs: np.ndarray, cache: tuple) -> dict[str, np.ndarray]:
    """Gradients of every parameter given dLoss/dProbs."""
    encoder_cache, states_shape, lstm_cache, dropped, dropout_mask, probs = cache
    ids, scale, layer_caches = encoder_cache
    config = model.config
    grads: dict[str, np.ndarray] = {}

    dlogits = kernels.softmax_backward(probs, dprobs)
    grads["classifier.weight"] = dropped.T @ dlogits
    grads["classifier.bias"] = dlogits.sum(axis=0)
    dfeatures = kernels.dropout_backward(dlogits @ model.params["classifier.weight"].T, dropout_mask)

    batch, seq_len, _ = states_shape
    if config.use_bilstm_head:
        hidden = config.lstm_hidden
        dlstm_out = np.zeros((batch, seq_len, 2 * hidden), dtype=dfeatures.dtype)
        dlstm_out[:, seq_len - 1, :hidden] += dfeatures[:, :hidden]
        dlstm_out[:, 0, hidden:] += dfeatures[:, hidden:]
        dx, grads_f, grads_b = kernels.bilstm_backward(dlstm_out, lstm_cache)
        for name in _LSTM_FIELDS:
            grads[f"lstm.fwd.{name}"] = grads_f[name]
            grads[f"lstm.bwd.{name}"] = grads_b[name]
    else:
        dx = np.zeros(states_shape, dtype=dfeatures.dtype)
        dx[:, 0] = dfeatures

    for layer in reversed(range(config.num_layers)):
        attn_cache, ln1_cache, ffn_cache, ln2_cache = layer_caches[layer]
        prefix = f"encoder.{layer}"
        dsum2, g = kernels.layer_norm_backward(dx, ln2_cache)
        grads[f"{prefix}.ln2.gamma"], grads[f"{prefix}.ln2.beta"] = g["gamma"], g["beta"]
        dx1, g = kernels.ffn_backward(dsum2, ffn_cache)
        for name, value in g.items():
            grads[f"{prefix}.ffn.{name}"] = value
        dsum1, g = kernels.layer_norm_backward(dsum2 + dx1, ln1_cache)
        grads[f"{prefix}.ln1.gamma"], grads[f"{prefix}.ln1.beta"] = g["gamma"], g["beta"]
        dx0, g = kernels.mha_backward(dsum1, attn_cache)
        for name, value in g.items():
            grads[f"{prefix}.attn.{name}"] = value
        dx = dsum1 + dx0

    dembedding = np.zeros_like(model.params["embedding"])
    np.add.at(dembedding, ids, dx * scale)
    grads["embedding"] = dembedding
    return grads


def loss_and_grads(
    model: ClassifierModel,
    ids: np.ndarray,
    targets: np.ndarray,
    class_weights: np.ndarray | None = None,
    train_mode: bool = False,
    rng: np.random.Generator | None = None,
) -> tuple[float, dict[str, np.ndarray], np.ndarray]:
    """Mean cross-entropy of a batch with gradients for every parameter.

    Returns:
        (loss, gradients by parameter name, probabilities)
    """
    probs, cache = forward_pass(model, ids, train_mode, rng)
    loss, dprobs = kernels.cross_entropy_batch(probs, targets, class_weights)
    return loss, backward_pass(model, dprobs, cache), probs


def predict_ids(model: ClassifierModel, ids: np.ndarray, batch_size: int = 64) -> np.ndarray:
    """Evaluation-mode probabilities for encoded rows, computed in chunks."""
    ids = np.asarray(ids)
    if len(ids) == 0:
        return np.zeros((0, model.config.num_classes), dtype=model.config.np_dtype)
    chunks = [forward(model, ids[start : start + batch_size]) for start in range(0, len(ids), batch_size)]
    return np.concatenate(chunks, axis=0)


# ---------------------------------------------------------------------------
# Flat parameter vectors


def flatten_params(params: dict[str, np.ndarray], names: Sequence[str] | None = None) -> np.ndarray:
    """Concatenate parameters into one float64 vector, in ``names`` order (default: insertion order)."""
    order = list(params) if names is None else names
    return np.concatenate([params[name].ravel() for name in order]).astype(np.float64)


def unflatten_params(vector: np.ndarray, like: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Inverse of flatten_params using the names, shapes and dtypes of ``like``."""
    out: dict[str, np.ndarray] = {}
    offset = 0
    for name, value in like.items():
        out[name] = vector[offset : offset + value.size].reshape(value.shape).astype(value.dtype)
        offset += value.size
    if offset != vector.size:
        raise ShapeError(f"vector has {vector.size} components, parameters need {offset}")
    return out


def with_params(model: ClassifierModel, params: dict[str, np.ndarray]) -> ClassifierModel:
    """A model sharing ``model``'s vocabulary and config but using ``params``."""
    return ClassifierModel(model.vocab, model.config, params, model.language)
