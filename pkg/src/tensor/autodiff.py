"""
Reverse-mode replay over the recorded graph
"""

from typing import Dict, Iterable, List

import numpy as np

from ..utils.errors import UsageError
from .tensor import Tensor


class GradTape:
    """
    Ordered record of the graph reachable from a root tensor

    `order` lists tensors so that every op's inputs precede it; replay walks
    it backwards and runs each backward rule exactly once.
    """

    def __init__(self, order: List[Tensor]):
        self.order = order

    @classmethod
    def from_root(cls, root: Tensor) -> "GradTape":
        order: List[Tensor] = []
        visited = set()
        stack = [(root, False)]
        while stack:
            t, expanded = stack.pop()
            if expanded:
                order.append(t)
                continue
            if id(t) in visited:
                continue
            visited.add(id(t))
            stack.append((t, True))
            if t.node is not None:
                for parent in reversed(t.node.parents):
                    if parent.requires_grad and id(parent) not in visited:
                        stack.append((parent, False))
        return cls(order)

    def __len__(self) -> int:
        return len(self.order)

    def replay(self, root: Tensor, seed_grad: np.ndarray) -> int:
        """Push seed_grad from root to the leaves; returns the number of visited nodes"""
        grads: Dict[int, np.ndarray] = {id(root): seed_grad}
        visited = 0
        for t in reversed(self.order):
            g = grads.pop(id(t), None)
            if g is None:
                continue
            visited += 1
            if t.node is None:
                if t.requires_grad:
                    g = np.asarray(g, dtype=t.dtype).reshape(t.shape)
                    t.grad = g.copy() if t.grad is None else t.grad + g
                continue
            parent_grads = t.node.backward(g)
            for parent, pg in zip(t.node.parents, parent_grads):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                grads[key] = pg if key not in grads else grads[key] + pg
        return visited


def backward(loss: Tensor) -> GradTape:
    """Accumulate d(loss)/d(leaf) into every tracked leaf's .grad"""
    if loss.size != 1:
        raise UsageError(f"backward() needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        raise UsageError("backward() on a tensor that no tracked parameter reaches")
    tape = GradTape.from_root(loss)
    tape.replay(loss, np.ones(loss.shape, dtype=np.float64))
    return tape


def zero_grad(params: Iterable[Tensor]) -> None:
    for p in params:
        p.grad = None
