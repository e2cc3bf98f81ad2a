"""
Full-reference image quality: PSNR and SSIM
"""

import math
from typing import Union

import numpy as np
from scipy import ndimage

from ..tensor import Tensor
from ..utils.constants import PIXEL_PEAK
from ..utils.errors import DimensionError

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

ImageLike = Union[Tensor, np.ndarray]


def as_image(image: ImageLike) -> np.ndarray:
    """float64 [H, W] view of a [1,H,W] / [H,W] image"""
    data = np.asarray(image.data if isinstance(image, Tensor) else image, dtype=np.float64)
    if data.ndim == 3 and data.shape[0] == 1:
        data = data[0]
    if data.ndim != 2:
        raise DimensionError(f"expected a single-channel image, got shape {data.shape}")
    return data


def _pair(pred: ImageLike, gt: ImageLike):
    a, b = as_image(pred), as_image(gt)
    if a.shape != b.shape:
        raise DimensionError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(pred: ImageLike, gt: ImageLike, peak: float = PIXEL_PEAK) -> float:
    """10*log10(peak^2 / MSE); math.inf for identical images"""
    a, b = _pair(pred, gt)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def _window() -> np.ndarray:
    x = np.arange(SSIM_WINDOW, dtype=np.float64) - SSIM_WINDOW // 2
    taps = np.exp(-(x * x) / (2.0 * SSIM_SIGMA * SSIM_SIGMA))
    return taps / taps.sum()


def _local_mean(a: np.ndarray, taps: np.ndarray) -> np.ndarray:
    out = ndimage.correlate1d(a, taps, axis=0, mode="reflect")
    out = ndimage.correlate1d(out, taps, axis=1, mode="reflect")
    r = SSIM_WINDOW // 2
    return out[r:-r, r:-r]


def ssim_map(pred: ImageLike, gt: ImageLike, peak: float = PIXEL_PEAK) -> np.ndarray:
    """Local SSIM over every valid 11x11 Gaussian window"""
    a, b = _pair(pred, gt)
    if min(a.shape) < SSIM_WINDOW:
        raise DimensionError(f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {a.shape}")
    c1 = (SSIM_K1 * peak) ** 2
    c2 = (SSIM_K2 * peak) ** 2
    taps = _window()
    mu_a, mu_b = _local_mean(a, taps), _local_mean(b, taps)
    var_a = _local_mean(a * a, taps) - mu_a * mu_a
    var_b = _local_mean(b * b, taps) - mu_b * mu_b
    cov = _local_mean(a * b, taps) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return num / den


def ssim(pred: ImageLike, gt: ImageLike, peak: float = PIXEL_PEAK) -> float:
    return float(np.mean(ssim_map(pred, gt, peak)))
