"""
Minimal tensor library with reverse-mode automatic differentiation
"""

from .tensor import Tensor, Node, tensor, zeros, no_grad, is_grad_enabled
from .autodiff import GradTape, backward, zero_grad
from .ops import (
    add, sub, mul, add_scalar, scale, square, sqrt, sigmoid, relu, abs_, sum_, mean,
    split_channels, concat_channels, scale_channels, global_pool, pad2d, conv2d, window_std3,
)
from .fft import ComplexTensor, rfft2, irfft2, half_width, parseval_energy
from .container import encode_tensor, decode_tensor, save_tensor, load_tensor
from .gradcheck import check_gradients, numerical_gradient, analytic_gradient, relative_error, shadow

__all__ = [
    'Tensor', 'Node', 'tensor', 'zeros', 'no_grad', 'is_grad_enabled',
    'GradTape', 'backward', 'zero_grad',
    'add', 'sub', 'mul', 'add_scalar', 'scale', 'square', 'sqrt', 'sigmoid', 'relu',
    'abs_', 'sum_', 'mean',
    'split_channels', 'concat_channels', 'scale_channels', 'global_pool', 'pad2d', 'conv2d', 'window_std3',
    'ComplexTensor', 'rfft2', 'irfft2', 'half_width', 'parseval_energy',
    'encode_tensor', 'decode_tensor', 'save_tensor', 'load_tensor',
    'check_gradients', 'numerical_gradient', 'analytic_gradient', 'relative_error', 'shadow',
]
