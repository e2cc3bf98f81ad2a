"""
Training loss
"""

from .. import tensor as nt
from ..tensor import Tensor
from ..utils.errors import DimensionError


def l1_loss(pred: Tensor, gt: Tensor) -> Tensor:
    """Mean absolute error over all elements; subgradient 0 at exact ties"""
    if pred.shape != gt.shape:
        raise DimensionError(f"l1_loss: prediction {pred.shape} vs target {gt.shape}")
    return nt.mean(nt.abs_(nt.sub(pred, gt)))
