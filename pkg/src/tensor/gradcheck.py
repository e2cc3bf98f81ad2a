"""
Finite-difference gradient checking on a float64 shadow graph
"""

from typing import Callable, List, Sequence

import numpy as np

from .autodiff import backward, zero_grad
from .tensor import Tensor, no_grad


def shadow(t: Tensor) -> Tensor:
    """float64 leaf copy of t that tracks gradients"""
    return Tensor(t.data.astype(np.float64), requires_grad=True, dtype=np.float64, name=t.name)


def numerical_gradient(fn: Callable[[], Tensor], inputs: Sequence[Tensor], step: float = 1e-3) -> List[np.ndarray]:
    """Central differences of the scalar fn() w.r.t. every element of every input"""
    grads = []
    with no_grad():
        for t in inputs:
            g = np.zeros(t.shape, dtype=np.float64)
            flat = t.data.reshape(-1)
            gflat = g.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + step
                f_plus = fn().item()
                flat[i] = orig - step
                f_minus = fn().item()
                flat[i] = orig
                gflat[i] = (f_plus - f_minus) / (2.0 * step)
            grads.append(g)
    return grads


def analytic_gradient(fn: Callable[[], Tensor], inputs: Sequence[Tensor]) -> List[np.ndarray]:
    zero_grad(inputs)
    backward(fn())
    return [np.zeros(t.shape) if t.grad is None else t.grad.astype(np.float64) for t in inputs]


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    denom = max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
    return float(np.linalg.norm(a - b) / denom)


def check_gradients(fn: Callable[[], Tensor], inputs: Sequence[Tensor], step: float = 1e-3) -> float:
    """
    Largest relative error between backward() and central differences

    `inputs` must be float64 leaves with requires_grad=True; fn closes over
    them and returns a scalar tensor.
    """
    analytic = analytic_gradient(fn, inputs)
    numeric = numerical_gradient(fn, inputs, step=step)
    return max(relative_error(a, n) for a, n in zip(analytic, numeric))
