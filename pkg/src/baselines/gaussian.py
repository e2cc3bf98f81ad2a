"""
Gaussian filter denoising baseline
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import ndimage

from ..tensor import Tensor
from ..utils.errors import ConfigError

DEFAULT_SIGMA = 1.5


@dataclass
class GaussianFilterSpec:
    sigma: float = DEFAULT_SIGMA
    radius: Optional[int] = None

    def __post_init__(self):
        if self.radius is None and self.sigma > 0:
            self.radius = int(math.ceil(3.0 * self.sigma))

    @classmethod
    def from_sigma(cls, sigma: float) -> "GaussianFilterSpec":
        return cls(sigma=float(sigma)).validate()

    def validate(self) -> "GaussianFilterSpec":
        if not self.sigma > 0:
            raise ConfigError(f"Gaussian sigma must be > 0, got {self.sigma}")
        if self.radius < math.ceil(3.0 * self.sigma):
            raise ConfigError(f"radius {self.radius} below ceil(3*sigma) = {math.ceil(3.0 * self.sigma)}")
        return self

    def to_dict(self) -> dict:
        return {"sigma": float(self.sigma), "radius": int(self.radius)}


def gaussian_taps(spec: GaussianFilterSpec) -> np.ndarray:
    """Normalised 1D taps of length 2*radius+1"""
    spec.validate()
    x = np.arange(-spec.radius, spec.radius + 1, dtype=np.float64)
    taps = np.exp(-(x * x) / (2.0 * spec.sigma * spec.sigma))
    return taps / taps.sum()


def gaussian_filter(image: Union[Tensor, np.ndarray], spec: GaussianFilterSpec) -> Tensor:
    """Separable Gaussian smoothing over the last two axes, mirror boundary"""
    taps = gaussian_taps(spec)
    data = np.asarray(image.data if isinstance(image, Tensor) else image, dtype=np.float64)
    out = ndimage.correlate1d(data, taps, axis=-1, mode="mirror")
    out = ndimage.correlate1d(out, taps, axis=-2, mode="mirror")
    return Tensor(out.astype(np.float32))
