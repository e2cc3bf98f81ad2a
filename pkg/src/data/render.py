"""
Gaussian atom rendering
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from ..tensor import Tensor
from ..utils.constants import PIXEL_PEAK, RenderMode
from ..utils.errors import ConfigError
from .sampling import AtomSet

# A distribution spec is a fixed value or a [low, high] uniform range
DistSpec = Union[float, Tuple[float, float]]

GT_PEAK = 255.0
GT_SIGMA = 0.75
GT_BACKGROUND = 0.0
TRUNCATE_SIGMAS = 4.0


def validate_spec(spec: DistSpec, name: str, minimum: float = 0.0) -> DistSpec:
    if isinstance(spec, (list, tuple)):
        if len(spec) != 2:
            raise ConfigError(f"{name}: a range needs exactly [low, high], got {spec!r}")
        low, high = float(spec[0]), float(spec[1])
        if low > high:
            raise ConfigError(f"{name}: low {low} exceeds high {high}")
        if low < minimum:
            raise ConfigError(f"{name}: values must be >= {minimum}, got {low}")
        return (low, high)
    value = float(spec)
    if value < minimum:
        raise ConfigError(f"{name}: value must be >= {minimum}, got {value}")
    return value


def sample_spec(spec: DistSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    if isinstance(spec, (list, tuple)):
        return rng.uniform(spec[0], spec[1], size)
    return np.full(size, float(spec))


def _spec_json(spec: DistSpec):
    return list(spec) if isinstance(spec, (list, tuple)) else float(spec)


@dataclass
class RenderParams:
    mode: str = RenderMode.GROUNDTRUTH
    peak_brightness: DistSpec = GT_PEAK
    atom_sigma: DistSpec = GT_SIGMA
    background: DistSpec = GT_BACKGROUND

    @classmethod
    def groundtruth(cls) -> "RenderParams":
        return cls()

    @classmethod
    def clean(cls, peak_brightness: DistSpec = (120.0, 220.0), atom_sigma: DistSpec = (1.0, 1.6),
              background: DistSpec = (5.0, 20.0)) -> "RenderParams":
        return cls(mode=RenderMode.CLEAN, peak_brightness=peak_brightness, atom_sigma=atom_sigma,
                   background=background)

    def validate(self) -> "RenderParams":
        if self.mode not in (RenderMode.CLEAN, RenderMode.GROUNDTRUTH):
            raise ConfigError(f"unknown render mode {self.mode!r}")
        self.peak_brightness = validate_spec(self.peak_brightness, "peak_brightness")
        self.atom_sigma = validate_spec(self.atom_sigma, "atom_sigma", minimum=1e-6)
        self.background = validate_spec(self.background, "background")
        if self.mode == RenderMode.GROUNDTRUTH and (
                self.peak_brightness != GT_PEAK or self.atom_sigma != GT_SIGMA or self.background != GT_BACKGROUND):
            raise ConfigError("groundtruth rendering uses fixed peak 255, sigma 0.75 and background 0")
        return self

    def to_dict(self) -> dict:
        return {"mode": self.mode, "peak_brightness": _spec_json(self.peak_brightness),
                "atom_sigma": _spec_json(self.atom_sigma), "background": _spec_json(self.background)}

    @classmethod
    def from_dict(cls, data: dict) -> "RenderParams":
        def _spec(value):
            return tuple(value) if isinstance(value, list) else value
        return cls(mode=data.get("mode", RenderMode.GROUNDTRUTH),
                   peak_brightness=_spec(data.get("peak_brightness", GT_PEAK)),
                   atom_sigma=_spec(data.get("atom_sigma", GT_SIGMA)),
                   background=_spec(data.get("background", GT_BACKGROUND))).validate()


def render_atoms(atoms: AtomSet, p: RenderParams, seed: int = 0, size: Sequence[int] = None) -> Tensor:
    """
    background + sum of peak * exp(-d^2 / (2 sigma^2)) per atom, clamped to [0, 255]

    Pixel (row y, column x) has its centre at (x, y). Each Gaussian is
    truncated at 4 sigma. size=(H, W) defaults to the atom set's image size.
    """
    p.validate()
    if size is None:
        w, h = atoms.image_size
    else:
        h, w = size
    rng = np.random.default_rng(seed)
    n = len(atoms)
    peaks = sample_spec(p.peak_brightness, rng, n)
    sigmas = sample_spec(p.atom_sigma, rng, n)
    background = sample_spec(p.background, rng, 1)[0]

    image = np.full((h, w), background, dtype=np.float64)
    for (x, y), peak, sigma in zip(atoms.positions, peaks, sigmas):
        reach = TRUNCATE_SIGMAS * sigma
        x0, x1 = max(int(math.floor(x - reach)), 0), min(int(math.ceil(x + reach)), w - 1)
        y0, y1 = max(int(math.floor(y - reach)), 0), min(int(math.ceil(y + reach)), h - 1)
        if x0 > x1 or y0 > y1:
            continue
        xs = np.arange(x0, x1 + 1)[None, :] - x
        ys = np.arange(y0, y1 + 1)[:, None] - y
        d2 = xs * xs + ys * ys
        patch = peak * np.exp(-d2 / (2.0 * sigma * sigma))
        patch[d2 > reach * reach] = 0.0
        image[y0:y1 + 1, x0:x1 + 1] += patch
    return Tensor(np.clip(image, 0.0, PIXEL_PEAK).astype(np.float32)[None])
