"""
Sensor noise model: column noise plus signal-dependent pointwise noise
"""

import math
from dataclasses import asdict, dataclass
from typing import Union

import numpy as np

from ..tensor import Tensor
from ..utils.errors import ConfigError, DomainError
from ..utils.file_handlers import read_json, write_json

BUILTIN_SLOPE = 0.03583
BUILTIN_INTERCEPT = 1.379
BUILTIN_SIGMA_C = 0.6641


@dataclass(frozen=True)
class NoiseParams:
    """sigma_p(I) = slope * I + intercept; sigma_c is the per-column std"""
    slope: float = 0.0
    intercept: float = 0.0
    sigma_c: float = 0.0

    @classmethod
    def builtin(cls) -> "NoiseParams":
        return cls(slope=BUILTIN_SLOPE, intercept=BUILTIN_INTERCEPT, sigma_c=BUILTIN_SIGMA_C)

    @classmethod
    def zero(cls) -> "NoiseParams":
        return cls()

    def validate(self) -> "NoiseParams":
        for name, value in asdict(self).items():
            if not math.isfinite(value) or value < 0:
                raise ConfigError(f"noise parameter {name} must be finite and >= 0, got {value}")
        return self

    def to_dict(self) -> dict:
        return {"slope": float(self.slope), "intercept": float(self.intercept), "sigma_c": float(self.sigma_c)}

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseParams":
        try:
            params = cls(slope=float(data["slope"]), intercept=float(data["intercept"]),
                         sigma_c=float(data["sigma_c"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"noise parameters need numeric slope, intercept and sigma_c: {e}") from e
        return params.validate()

    def save(self, path) -> None:
        write_json(path, self.to_dict())

    @classmethod
    def load(cls, path) -> "NoiseParams":
        return cls.from_dict(read_json(path))


def sigma_p(intensity: float, p: NoiseParams) -> float:
    if intensity < 0:
        raise DomainError(f"intensity must be >= 0, got {intensity}")
    return p.slope * intensity + p.intercept


def sigma_p_map(clean: np.ndarray, p: NoiseParams) -> np.ndarray:
    """Pointwise sigma for every pixel of a non-negative image"""
    clean = np.asarray(clean, dtype=np.float64)
    if clean.size and clean.min() < 0:
        raise DomainError(f"clean image has negative values (min {clean.min()})")
    return p.slope * clean + p.intercept


def add_noise(clean: Union[Tensor, np.ndarray], p: NoiseParams, seed: int) -> Tensor:
    """
    noisy = clean + N_c + N_p(clean)

    One N(0, sigma_c^2) draw per column shared by all rows of that column,
    then an independent N(0, sigma_p(clean)^2) draw per pixel. Not clamped.
    """
    data = clean.data if isinstance(clean, Tensor) else np.asarray(clean)
    base = np.asarray(data, dtype=np.float64)
    sp = sigma_p_map(base, p)
    rng = np.random.default_rng(seed)
    column = rng.standard_normal(base.shape[:-2] + (1, base.shape[-1])) * p.sigma_c
    pointwise = rng.standard_normal(base.shape) * sp
    return Tensor((base + column + pointwise).astype(np.float32))
