"""
Noisy / ground-truth sample generation
"""

import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..noise import NoiseParams, add_noise
from ..tensor import Tensor
from ..utils.constants import RenderMode
from ..utils.errors import ConfigError
from ..utils.helpers import derive_seeds, parse_size
from .render import RenderParams, render_atoms
from .sampling import POISSON_K, AtomSet, perlin_mask, poisson_disk

logger = logging.getLogger(__name__)


@dataclass
class GenerationConfig:
    size: Tuple[int, int] = (256, 256)   # (H, W)
    r_min: float = 4.0
    poisson_k: int = POISSON_K
    perlin_cell: int = 64
    perlin_threshold: float = 0.0
    clean_render: RenderParams = field(default_factory=RenderParams.clean)
    noise: NoiseParams = field(default_factory=NoiseParams.builtin)
    clamp_export: bool = False

    @classmethod
    def default(cls) -> "GenerationConfig":
        return cls()

    @classmethod
    def desk(cls) -> "GenerationConfig":
        return cls(size=(64, 64), perlin_cell=32)

    @property
    def height(self) -> int:
        return self.size[0]

    @property
    def width(self) -> int:
        return self.size[1]

    def validate(self) -> "GenerationConfig":
        self.size = parse_size(self.size)
        if self.r_min <= 0:
            raise ConfigError(f"r_min must be > 0, got {self.r_min}")
        if self.poisson_k < 1:
            raise ConfigError(f"poisson_k must be >= 1, got {self.poisson_k}")
        if self.perlin_cell < 2:
            raise ConfigError(f"perlin_cell must be >= 2, got {self.perlin_cell}")
        if self.clean_render.mode != RenderMode.CLEAN:
            raise ConfigError(f"clean_render must use clean mode, got {self.clean_render.mode!r}")
        self.clean_render.validate()
        self.noise.validate()
        return self

    def to_dict(self) -> dict:
        return {
            "size": list(self.size),
            "r_min": self.r_min,
            "poisson_k": self.poisson_k,
            "perlin_cell": self.perlin_cell,
            "perlin_threshold": self.perlin_threshold,
            "clean_render": self.clean_render.to_dict(),
            "noise": self.noise.to_dict(),
            "clamp_export": self.clamp_export,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GenerationConfig":
        base = cls()
        return cls(
            size=tuple(data.get("size", base.size)),
            r_min=float(data.get("r_min", base.r_min)),
            poisson_k=int(data.get("poisson_k", base.poisson_k)),
            perlin_cell=int(data.get("perlin_cell", base.perlin_cell)),
            perlin_threshold=float(data.get("perlin_threshold", base.perlin_threshold)),
            clean_render=RenderParams.from_dict(data["clean_render"]) if "clean_render" in data else base.clean_render,
            noise=NoiseParams.from_dict(data["noise"]) if "noise" in data else base.noise,
            clamp_export=bool(data.get("clamp_export", base.clamp_export)),
        ).validate()


@dataclass(eq=False)
class Sample:
    noisy: Tensor
    gt: Tensor
    atoms: AtomSet
    meta: dict = field(default_factory=dict)


def nearest_pixels(atoms: AtomSet, h: int, w: int) -> Tuple[np.ndarray, np.ndarray]:
    """(row, col) of each atom's nearest pixel centre, clamped into the image"""
    cols = np.clip(np.floor(atoms.positions[:, 0] + 0.5).astype(int), 0, w - 1)
    rows = np.clip(np.floor(atoms.positions[:, 1] + 0.5).astype(int), 0, h - 1)
    return rows, cols


def make_sample(cfg: GenerationConfig, seed: int) -> Sample:
    """Atoms -> vacuum mask -> ground truth + clean render -> noisy; pure in (cfg, seed)"""
    cfg.validate()
    h, w = cfg.size
    poisson_seed, mask_seed, render_seed, noise_seed = derive_seeds(seed, 4)

    raw = poisson_disk(w, h, cfg.r_min, poisson_seed, k=cfg.poisson_k)
    mask = perlin_mask(w, h, cfg.perlin_cell, cfg.perlin_threshold, mask_seed).data[0]
    rows, cols = nearest_pixels(raw, h, w)
    atoms = raw.subset(mask[rows, cols] > 0)

    gt = render_atoms(atoms, RenderParams.groundtruth(), seed=0, size=(h, w))
    clean = render_atoms(atoms, cfg.clean_render, seed=render_seed, size=(h, w))
    noisy = add_noise(clean, cfg.noise, noise_seed)
    logger.debug(f"Sample seed={seed}: {len(atoms)}/{len(raw)} atoms kept by mask")
    return Sample(noisy=noisy, gt=gt, atoms=atoms,
                  meta={"seed": int(seed), "raw_atoms": len(raw), "atoms": len(atoms)})
