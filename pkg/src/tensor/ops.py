"""
Differentiable operations on Tensor

Storage follows the input dtype; every reduction (convolution inner
products, pooling sums) is accumulated in float64.
"""

from typing import List, Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from ..utils.constants import PadMode, PoolMode
from ..utils.errors import ConfigError, DimensionError
from .tensor import Tensor

F64 = np.float64


def _f64(a) -> np.ndarray:
    return np.asarray(a, dtype=F64)


def _same_shape(a: Tensor, b: Tensor, op: str) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"{op}: shape mismatch {a.shape} vs {b.shape}")


def _spatial(x: Tensor, op: str, min_ndim: int = 3) -> None:
    if x.ndim < min_ndim or x.ndim > 4:
        raise DimensionError(f"{op}: expected [C,H,W] or [N,C,H,W], got shape {x.shape}")


# ---------------------------------------------------------------- elementwise

def add(a: Tensor, b: Tensor) -> Tensor:
    _same_shape(a, b, "add")
    return Tensor.from_op(_f64(a.data) + _f64(b.data), (a, b), lambda g: (g, g), "add")


def sub(a: Tensor, b: Tensor) -> Tensor:
    _same_shape(a, b, "sub")
    return Tensor.from_op(_f64(a.data) - _f64(b.data), (a, b), lambda g: (g, -g), "sub")


def mul(a: Tensor, b: Tensor) -> Tensor:
    _same_shape(a, b, "mul")
    av, bv = _f64(a.data), _f64(b.data)
    return Tensor.from_op(av * bv, (a, b), lambda g: (g * bv, g * av), "mul")


def add_scalar(a: Tensor, c: float) -> Tensor:
    return Tensor.from_op(_f64(a.data) + c, (a,), lambda g: (g,), "add_scalar")


def scale(a: Tensor, c: float) -> Tensor:
    return Tensor.from_op(_f64(a.data) * c, (a,), lambda g: (g * c,), "scale")


def square(a: Tensor) -> Tensor:
    av = _f64(a.data)
    return Tensor.from_op(av * av, (a,), lambda g: (2.0 * av * g,), "square")


def sqrt(a: Tensor) -> Tensor:
    out = np.sqrt(_f64(a.data))

    def _backward(g):
        with np.errstate(divide="ignore"):
            return (g * 0.5 / out,)

    return Tensor.from_op(out, (a,), _backward, "sqrt")


def sigmoid(a: Tensor) -> Tensor:
    out = expit(_f64(a.data))
    return Tensor.from_op(out, (a,), lambda g: (g * out * (1.0 - out),), "sigmoid")


def relu(a: Tensor) -> Tensor:
    av = _f64(a.data)
    mask = (av > 0).astype(F64)
    return Tensor.from_op(av * mask, (a,), lambda g: (g * mask,), "relu")


def abs_(a: Tensor) -> Tensor:
    av = _f64(a.data)
    sign = np.sign(av)
    return Tensor.from_op(np.abs(av), (a,), lambda g: (g * sign,), "abs")


def sum_(a: Tensor) -> Tensor:
    shape = a.shape
    return Tensor.from_op(np.asarray(_f64(a.data).sum()), (a,),
                          lambda g: (np.broadcast_to(_f64(g).reshape(()), shape),), "sum")


def mean(a: Tensor) -> Tensor:
    shape, n = a.shape, a.size
    return Tensor.from_op(np.asarray(_f64(a.data).mean()), (a,),
                          lambda g: (np.broadcast_to(_f64(g).reshape(()) / n, shape),), "mean")


# ---------------------------------------------------------------- channels

def split_channels(x: Tensor, sizes: Optional[Sequence[int]] = None) -> List[Tensor]:
    """Split along the channel axis (-3); default is two equal halves"""
    _spatial(x, "split_channels")
    c = x.shape[-3]
    if sizes is None:
        if c % 2:
            raise ConfigError(f"cannot split {c} channels into equal halves")
        sizes = (c // 2, c // 2)
    if sum(sizes) != c:
        raise DimensionError(f"split sizes {tuple(sizes)} do not add up to {c} channels")
    parts = []
    start = 0
    for size in sizes:
        lo, hi = start, start + size

        def _backward(g, lo=lo, hi=hi):
            full = np.zeros(x.shape, dtype=F64)
            full[..., lo:hi, :, :] = g
            return (full,)

        parts.append(Tensor.from_op(x.data[..., lo:hi, :, :].copy(), (x,), _backward, "split"))
        start = hi
    return parts


def concat_channels(parts: Sequence[Tensor]) -> Tensor:
    if not parts:
        raise DimensionError("concat_channels needs at least one tensor")
    for p in parts:
        _spatial(p, "concat_channels")
        if p.shape[:-3] != parts[0].shape[:-3] or p.shape[-2:] != parts[0].shape[-2:]:
            raise DimensionError(f"concat_channels: shape mismatch {p.shape} vs {parts[0].shape}")
    bounds = np.cumsum([0] + [p.shape[-3] for p in parts])
    data = np.concatenate([_f64(p.data) for p in parts], axis=-3)

    def _backward(g):
        return tuple(g[..., bounds[i]:bounds[i + 1], :, :] for i in range(len(parts)))

    return Tensor.from_op(data, tuple(parts), _backward, "concat")


def scale_channels(x: Tensor, w: Tensor) -> Tensor:
    """Multiply each channel of x [...,C,H,W] by w [...,C,1,1]"""
    _spatial(x, "scale_channels")
    if w.shape != x.shape[:-2] + (1, 1):
        raise DimensionError(f"scale_channels: weights {w.shape} do not match features {x.shape}")
    xv, wv = _f64(x.data), _f64(w.data)

    def _backward(g):
        return g * wv, (g * xv).sum(axis=(-2, -1), keepdims=True)

    return Tensor.from_op(xv * wv, (x, w), _backward, "scale_channels")


def global_pool(x: Tensor, mode: str = PoolMode.AVG) -> Tensor:
    """Per-channel global average or max, [...,C,H,W] -> [...,C,1,1]"""
    _spatial(x, "global_pool")
    h, w = x.shape[-2:]
    if x.size == 0 or h < 1 or w < 1:
        raise DimensionError(f"global_pool on empty tensor {x.shape}")
    xv = _f64(x.data)
    if mode == PoolMode.AVG:
        out = xv.mean(axis=(-2, -1), keepdims=True)
        return Tensor.from_op(out, (x,), lambda g: (np.broadcast_to(g / (h * w), x.shape),), "avg_pool")
    if mode == PoolMode.MAX:
        flat = xv.reshape(xv.shape[:-2] + (h * w,))
        idx = np.argmax(flat, axis=-1)
        out = np.take_along_axis(flat, idx[..., None], axis=-1)[..., None]

        def _backward(g):
            grad = np.zeros(flat.shape, dtype=F64)
            np.put_along_axis(grad, idx[..., None], _f64(g).reshape(idx.shape + (1,)), axis=-1)
            return (grad.reshape(x.shape),)

        return Tensor.from_op(out, (x,), _backward, "max_pool")
    raise ConfigError(f"unknown pooling mode {mode!r}")


# ---------------------------------------------------------------- padding / conv

def _pad_index(n: int, mode: str) -> np.ndarray:
    """Source index per padded position; -1 marks a zero"""
    idx = np.arange(n)
    if mode == PadMode.MIRROR:
        return np.pad(idx, 1, mode="reflect") if n > 1 else np.zeros(3, dtype=int)
    return np.concatenate([[-1], idx, [-1]])


def _selection(n: int, mode: str) -> np.ndarray:
    idx = _pad_index(n, mode)
    sel = np.zeros((n + 2, n), dtype=F64)
    rows = np.nonzero(idx >= 0)[0]
    sel[rows, idx[rows]] = 1.0
    return sel


def pad2d(x: Tensor, mode: str) -> Tensor:
    """One-pixel spatial padding: 'zero' or 'mirror' (edge pixel not repeated)"""
    if mode == PadMode.NONE:
        return x
    if mode not in (PadMode.ZERO, PadMode.MIRROR):
        raise ConfigError(f"unknown padding mode {mode!r}")
    _spatial(x, "pad2d")
    h, w = x.shape[-2:]
    rsel, csel = _selection(h, mode), _selection(w, mode)
    out = rsel @ _f64(x.data) @ csel.T

    def _backward(g):
        return (rsel.T @ _f64(g) @ csel,)

    return Tensor.from_op(out, (x,), _backward, f"pad_{mode}")


def _conv_valid(x: Tensor, kernel: Tensor, bias: Optional[Tensor]) -> Tensor:
    squeeze = x.ndim == 3
    xv = _f64(x.data)[None] if squeeze else _f64(x.data)
    kv = _f64(kernel.data)
    k = kv.shape[-1]
    n, cin, hp, wp = xv.shape
    h, w = hp - k + 1, wp - k + 1
    if k == 1:
        win = xv[..., None, None]
    else:
        win = sliding_window_view(xv, (k, k), axis=(2, 3))
    out = np.tensordot(win, kv, axes=([1, 4, 5], [1, 2, 3])).transpose(0, 3, 1, 2)
    if bias is not None:
        out = out + _f64(bias.data)[None, :, None, None]

    def _backward(g):
        g4 = _f64(g)[None] if squeeze else _f64(g)
        gk = np.tensordot(g4, win, axes=([0, 2, 3], [0, 2, 3]))
        gx = np.zeros_like(xv)
        for i in range(k):
            for j in range(k):
                gx[:, :, i:i + h, j:j + w] += np.tensordot(g4, kv[:, :, i, j], axes=([1], [0])).transpose(0, 3, 1, 2)
        if squeeze:
            gx = gx[0]
        gb = g4.sum(axis=(0, 2, 3)) if bias is not None else None
        return (gx, gk, gb) if bias is not None else (gx, gk)

    out = out[0] if squeeze else out
    parents = (x, kernel, bias) if bias is not None else (x, kernel)
    return Tensor.from_op(out, parents, _backward, f"conv{k}x{k}")


def conv2d(x: Tensor, kernel: Tensor, bias: Optional[Tensor] = None, pad: Optional[str] = None) -> Tensor:
    """
    Same-size 2D convolution (cross-correlation) with k in {1, 3}

    pad defaults to 'none' for 1x1 kernels and 'mirror' for 3x3 kernels.
    """
    _spatial(x, "conv2d")
    if kernel.ndim != 4 or kernel.shape[-1] != kernel.shape[-2]:
        raise DimensionError(f"conv2d: kernel must be [Cout,Cin,k,k], got {kernel.shape}")
    k = kernel.shape[-1]
    if k not in (1, 3):
        raise ConfigError(f"conv2d: unsupported kernel size {k}, expected 1 or 3")
    if kernel.shape[1] != x.shape[-3]:
        raise DimensionError(f"conv2d: kernel expects {kernel.shape[1]} input channels (axis 1), "
                             f"input has {x.shape[-3]} (axis -3)")
    if bias is not None and bias.shape != (kernel.shape[0],):
        raise DimensionError(f"conv2d: bias shape {bias.shape} does not match {kernel.shape[0]} output channels")
    if pad is None:
        pad = PadMode.NONE if k == 1 else PadMode.MIRROR
    if (k == 1) != (pad == PadMode.NONE):
        raise ConfigError(f"conv2d: padding {pad!r} invalid for {k}x{k} kernel")
    return _conv_valid(pad2d(x, pad), kernel, bias)


def _box_sum(a: np.ndarray, h: int, w: int) -> np.ndarray:
    out = np.zeros(a.shape[:-2] + (h, w), dtype=F64)
    for i in range(3):
        for j in range(3):
            out += a[..., i:i + h, j:j + w]
    return out


def _box_sum_adjoint(g: np.ndarray, shape) -> np.ndarray:
    h, w = g.shape[-2:]
    out = np.zeros(shape, dtype=F64)
    for i in range(3):
        for j in range(3):
            out[..., i:i + h, j:j + w] += g
    return out


def window_std3(xp: Tensor, eps: float) -> Tensor:
    """
    Per-channel 3x3 windowed standard deviation of an already padded input

    sqrt(E[X^2] - E[X]^2 + eps) over every valid 3x3 window, evaluated in
    float64 so the moment difference does not cancel in float32.
    """
    _spatial(xp, "window_std3")
    hp, wp = xp.shape[-2:]
    if hp < 3 or wp < 3:
        raise DimensionError(f"window_std3: padded input {hp}x{wp} smaller than the 3x3 window")
    h, w = hp - 2, wp - 2
    xv = _f64(xp.data)
    m1 = _box_sum(xv, h, w) / 9.0
    m2 = _box_sum(xv * xv, h, w) / 9.0
    sd = np.sqrt(m2 - m1 * m1 + eps)

    def _backward(g):
        q = _f64(g) / (9.0 * sd)
        return (xv * _box_sum_adjoint(q, xv.shape) - _box_sum_adjoint(q * m1, xv.shape),)

    return Tensor.from_op(sd, (xp,), _backward, "window_std3")
