"""AdamW and the learning-rate schedules used for fine-tuning.

Learning rates follow a slanted triangular envelope (short linear warm-up, long
linear decay) scaled per layer group: each group below the top gets the rate of
the group above divided by ``decay_factor``.
"""

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field

from src.errors import ConfigError, ShapeError


class OptimizerConfig(BaseModel):
    """AdamW hyperparameters."""

    beta1: float = Field(default=0.9, ge=0.0, lt=1.0, description="First-moment decay")
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0, description="Second-moment decay")
    eps: float = Field(default=1e-8, gt=0.0, description="Denominator stabilizer")
    weight_decay: float = Field(default=0.01, ge=0.0, description="Decoupled weight decay")


class ScheduleConfig(BaseModel):
    """Slanted triangular schedule with discriminative per-layer rates."""

    base_lr: float = Field(default=2e-5, ge=0.0, description="Peak learning rate of the top layer")
    cut_fraction: float = Field(
        default=0.1, gt=0.0, lt=1.0, description="Fraction of steps spent warming up"
    )
    ratio: float = Field(default=32.0, ge=1.0, description="Peak rate / lowest rate")
    decay_factor: float = Field(
        default=2.6, gt=1.0, description="Rate divisor per layer group below the top"
    )
    total_steps: int = Field(default=1, ge=1, description="Number of optimizer steps in the run")


@dataclass
class OptimizerState:
    """AdamW state for one parameter tensor.

    Attributes:
        m: First moment, same shape as the parameter
        v: Second moment, same shape as the parameter
        t: Steps taken
        lr: Default learning rate (a per-call rate overrides it)
        beta1, beta2, eps, weight_decay: AdamW constants
    """

    m: np.ndarray
    v: np.ndarray
    t: int = 0
    lr: float = 2e-5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01

    @classmethod
    def for_param(
        cls, param: np.ndarray, lr: float = 2e-5, config: OptimizerConfig | None = None
    ) -> "OptimizerState":
        config = config or OptimizerConfig()
        return cls(
            m=np.zeros_like(param),
            v=np.zeros_like(param),
            lr=lr,
            beta1=config.beta1,
            beta2=config.beta2,
            eps=config.eps,
            weight_decay=config.weight_decay,
        )


def adamw_step(
    param: np.ndarray,
    grad: np.ndarray,
    state: OptimizerState,
    lr: float | None = None,
) -> tuple[np.ndarray, OptimizerState]:
    """One AdamW update.

    ``state`` is advanced in place; the updated parameter is returned as a new array.

    Args:
        param: Current parameter values
        grad: Gradient of the loss w.r.t. ``param``
        state: Moments and constants for this parameter
        lr: Learning rate for this step (defaults to ``state.lr``)

    Returns:
        (updated parameter, state)

    Raises:
        ShapeError: If the gradient or moments do not match the parameter
    """
    if grad.shape != param.shape or state.m.shape != param.shape or state.v.shape != param.shape:
        raise ShapeError(
            f"adamw shapes disagree: param {param.shape}, grad {grad.shape}, "
            f"m {state.m.shape}, v {state.v.shape}"
        )
    step_lr = state.lr if lr is None else lr
    state.t += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad * grad
    m_hat = state.m / (1.0 - state.beta1**state.t)
    v_hat = state.v / (1.0 - state.beta2**state.t)
    update = m_hat / (np.sqrt(v_hat) + state.eps) + state.weight_decay * param
    return (param - step_lr * update).astype(param.dtype, copy=False), state


def stlr_envelope(step: int, cfg: ScheduleConfig) -> float:
    """Top-layer learning rate at ``step`` of the slanted triangular schedule.

    The cut is rounded to a whole step (at least 1), so the peak rate is hit
    exactly for any ``total_steps``.
    """
    if not 0 <= step <= cfg.total_steps:
        raise ConfigError(f"schedule step {step} outside [0, {cfg.total_steps}]")
    cut = max(1, round(cfg.cut_fraction * cfg.total_steps))
    if step <= cut:
        p = step / cut
    else:
        p = 1.0 - (step - cut) / (cfg.total_steps - cut)
    return cfg.base_lr * (1.0 + p * (cfg.ratio - 1.0)) / cfg.ratio


def schedule_lr(step: int, layer_index: int, num_layers: int, cfg: ScheduleConfig) -> float:
    """Learning rate for one layer group at one step.

    Args:
        step: Optimizer step, 0..total_steps
        layer_index: Group index, 0 = bottom, ``num_layers - 1`` = top
        num_layers: Number of layer groups
        cfg: Schedule parameters

    Raises:
        ConfigError: If step or layer_index is out of range
    """
    if not 0 <= layer_index < num_layers:
        raise ConfigError(f"layer index {layer_index} outside [0, {num_layers})")
    return stlr_envelope(step, cfg) / cfg.decay_factor ** (num_layers - 1 - layer_index)
