"""Numpy kernels: attention, feed-forward, layer norm, LSTM, loss, AdamW, schedules."""

from src.nn.checkpoint import decode_tensors, encode_tensors, load_tensors, save_tensors
from src.nn.gradcheck import grad_check, numerical_gradient
from src.nn.kernels import (
    bilstm_forward,
    cross_entropy_loss,
    debug_checks,
    layer_norm,
    lstm_cell_step,
    multi_head_attention,
    position_wise_ffn,
    positional_encoding,
    scaled_dot_attention,
    softmax,
)
from src.nn.optim import (
    OptimizerConfig,
    OptimizerState,
    ScheduleConfig,
    adamw_step,
    schedule_lr,
)
from src.nn.params import AttentionParams, FfnParams, LayerNormParams, LstmParams, LstmState

__all__ = [
    "AttentionParams",
    "FfnParams",
    "LayerNormParams",
    "LstmParams",
    "LstmState",
    "OptimizerConfig",
    "OptimizerState",
    "ScheduleConfig",
    "adamw_step",
    "bilstm_forward",
    "cross_entropy_loss",
    "debug_checks",
    "decode_tensors",
    "encode_tensors",
    "grad_check",
    "layer_norm",
    "load_tensors",
    "lstm_cell_step",
    "multi_head_attention",
    "numerical_gradient",
    "position_wise_ffn",
    "positional_encoding",
    "save_tensors",
    "scaled_dot_attention",
    "schedule_lr",
    "softmax",
]
