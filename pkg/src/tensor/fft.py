"""
Real 2D FFT pair with adjoint gradients

Convention: unnormalised forward, 1/(H*W) inverse (numpy default).
A spectrum is carried as one packed real tensor [..., 2C, H, W//2+1]
holding real parts in the first C channels and imaginary parts in the rest.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..utils.errors import DimensionError
from . import ops
from .tensor import Tensor


def half_width(w: int) -> int:
    return w // 2 + 1


def _column_weights(w: int) -> np.ndarray:
    """Multiplicity of each half-spectrum column in the full spectrum"""
    weights = np.full(half_width(w), 2.0)
    weights[0] = 1.0
    if w % 2 == 0:
        weights[-1] = 1.0
    return weights


@dataclass(eq=False)
class ComplexTensor:
    re: Tensor
    im: Tensor
    _packed: Optional[Tensor] = None

    def __post_init__(self):
        if self.re.shape != self.im.shape:
            raise DimensionError(f"complex parts differ in shape: {self.re.shape} vs {self.im.shape}")

    @classmethod
    def from_packed(cls, packed: Tensor) -> "ComplexTensor":
        re, im = ops.split_channels(packed)
        return cls(re=re, im=im, _packed=packed)

    def packed(self) -> Tensor:
        if self._packed is None:
            self._packed = ops.concat_channels([self.re, self.im])
        return self._packed

    @property
    def shape(self):
        return self.re.shape

    def to_numpy(self) -> np.ndarray:
        return self.re.data.astype(np.float64) + 1j * self.im.data.astype(np.float64)


def rfft2(x: Tensor) -> ComplexTensor:
    """[...,C,H,W] -> spectrum with spatial shape H x (W//2+1)"""
    if x.ndim < 3:
        raise DimensionError(f"rfft2: expected [C,H,W] or [N,C,H,W], got {x.shape}")
    h, w = x.shape[-2:]
    if h < 2 or w < 2:
        raise DimensionError(f"rfft2: spatial size must be at least 2x2, got {h}x{w}")
    c = x.shape[-3]
    wr = half_width(w)
    spec = np.fft.rfft2(x.data.astype(np.float64), axes=(-2, -1))
    packed = np.concatenate([spec.real, spec.imag], axis=-3)

    def _backward(g):
        g = np.asarray(g, dtype=np.float64)
        full = np.zeros(x.shape, dtype=np.complex128)
        full[..., :wr] = g[..., :c, :, :] + 1j * g[..., c:, :, :]
        return ((np.fft.ifft2(full, axes=(-2, -1)) * (h * w)).real,)

    return ComplexTensor.from_packed(Tensor.from_op(packed, (x,), _backward, "rfft2"))


def irfft2(z: ComplexTensor, w: int) -> Tensor:
    """Inverse of rfft2 for output width w; requires W//2+1 spectrum columns"""
    packed = z.packed()
    h, wr = packed.shape[-2:]
    if wr != half_width(w):
        raise DimensionError(f"irfft2: spectrum has {wr} columns, width {w} needs {half_width(w)}")
    if h < 2 or w < 2:
        raise DimensionError(f"irfft2: spatial size must be at least 2x2, got {h}x{w}")
    c = packed.shape[-3] // 2
    pv = packed.data.astype(np.float64)
    spec = pv[..., :c, :, :] + 1j * pv[..., c:, :, :]
    out = np.fft.irfft2(spec, s=(h, w), axes=(-2, -1))
    weights = _column_weights(w)

    def _backward(g):
        gz = np.fft.rfft2(np.asarray(g, dtype=np.float64), axes=(-2, -1)) * (weights / (h * w))
        return (np.concatenate([gz.real, gz.imag], axis=-3),)

    return Tensor.from_op(out, (packed,), _backward, "irfft2")


def parseval_energy(z: ComplexTensor, w: int) -> float:
    """(1/(H*W)) * sum of |X|^2 over the full spectrum, from the half spectrum"""
    spec = z.to_numpy()
    h = spec.shape[-2]
    power = (np.abs(spec) ** 2) * _column_weights(w)
    return float(power.sum() / (h * w))
