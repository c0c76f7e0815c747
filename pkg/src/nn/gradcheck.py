"""Finite-difference gradient checking."""

import logging
from collections.abc import Callable

import numpy as np

from src.errors import NumericalError, ShapeError

logger = logging.getLogger(__name__)

LossAndGrad = Callable[[np.ndarray], tuple[float, np.ndarray]]


def numerical_gradient(
    loss_fn: Callable[[np.ndarray], float], params: np.ndarray, eps: float = 1e-5
) -> np.ndarray:
    """Central differences (f(θ + εe_i) − f(θ − εe_i)) / 2ε for every component.

    Raises:
        NumericalError: If any evaluation is non-finite
    """
    theta = np.array(params, dtype=np.float64, copy=True)
    grad = np.zeros_like(theta)
    for i in range(theta.size):
        original = theta[i]
        theta[i] = original + eps
        plus = float(loss_fn(theta))
        theta[i] = original - eps
        minus = float(loss_fn(theta))
        theta[i] = original
        if not (np.isfinite(plus) and np.isfinite(minus)):
            raise NumericalError(f"loss is not finite when perturbing component {i}")
        grad[i] = (plus - minus) / (2.0 * eps)
    return grad


def grad_check(
    loss_fn: LossAndGrad,
    params: np.ndarray,
    eps: float = 1e-5,
    floor: float = 1e-8,
) -> float:
    """Compare an analytic gradient with central differences.

    Args:
        loss_fn: Maps a flat parameter vector to (loss, analytic gradient)
        params: Flat parameter vector to check at
        eps: Finite-difference step
        floor: Lower bound on the relative-error denominator

    Returns:
        max_i |a_i − n_i| / max(|a_i|, |n_i|, floor)

    Raises:
        NumericalError: If the loss or analytic gradient is non-finite
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    theta = np.asarray(params, dtype=np.float64).ravel()
    loss, analytic = loss_fn(theta.copy())
    analytic = np.asarray(analytic, dtype=np.float64).ravel()
    if analytic.shape != theta.shape:
        raise ShapeError(f"gradient has {analytic.size} components, params have {theta.size}")
    if not np.isfinite(loss) or not np.all(np.isfinite(analytic)):
        raise NumericalError("loss or analytic gradient is not finite")

    numeric = numerical_gradient(lambda p: loss_fn(p)[0], theta, eps)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    rel = np.abs(analytic - numeric) / denom
    worst = float(rel.max(initial=0.0))
    logger.debug("grad_check over %d components: max relative error %.3e", theta.size, worst)
    return worst
