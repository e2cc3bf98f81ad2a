"""
Adam optimiser with float64 moment buffers
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..tensor import Tensor
from ..utils.errors import ConfigError, DimensionError, NumericalError

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


def clip_grad_norm(grads: Sequence[np.ndarray], max_norm: float) -> Tuple[list, float]:
    """Scale all gradients together so their global L2 norm is at most max_norm"""
    total = float(np.sqrt(sum(float(np.sum(np.square(g, dtype=np.float64))) for g in grads)))
    if total <= max_norm or total == 0.0:
        return list(grads), total
    factor = max_norm / total
    return [g * factor for g in grads], total


def adam_step(params: Sequence[Tuple[str, Tensor]], grads: Sequence[Optional[np.ndarray]], state: AdamState,
              lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    """
    One bias-corrected Adam update, in place on the parameter buffers

    A parameter whose gradient is None is treated as having zero gradient.
    """
    if lr < 0:
        raise ConfigError(f"learning rate must be >= 0, got {lr}")
    if len(params) != len(grads):
        raise DimensionError(f"{len(params)} parameters but {len(grads)} gradients")
    step = state.t + 1
    for (name, p), g in zip(params, grads):
        g = np.zeros(p.shape) if g is None else np.asarray(g, dtype=np.float64)
        if g.shape != p.shape:
            raise DimensionError(f"gradient for {name} has shape {g.shape}, parameter has {p.shape}")
        if not np.all(np.isfinite(g)):
            raise NumericalError("non-finite gradient", path=name, step=step)
    bc1 = 1.0 - beta1 ** step
    bc2 = 1.0 - beta2 ** step
    for (name, p), g in zip(params, grads):
        g = np.zeros(p.shape) if g is None else np.asarray(g, dtype=np.float64)
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = np.zeros(p.shape, dtype=np.float64)
            v = np.zeros(p.shape, dtype=np.float64)
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        state.m[name], state.v[name] = m, v
        update = lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
        p.data = (p.data.astype(np.float64) - update).astype(p.data.dtype)
    state.t = step
    return state
