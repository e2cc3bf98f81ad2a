"""
Atom placement (Poisson disk) and vacuum carving (Perlin mask)
"""

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..tensor import Tensor
from ..utils.errors import ConfigError

POISSON_K = 30


@dataclass(eq=False)
class AtomSet:
    """Atom centres in pixel units, x along columns and y along rows"""
    positions: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    image_size: Tuple[int, int] = (0, 0)   # (W, H)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.float64).reshape(-1, 2)

    def __len__(self) -> int:
        return len(self.positions)

    def subset(self, keep: np.ndarray) -> "AtomSet":
        return AtomSet(positions=self.positions[np.asarray(keep, dtype=bool)], image_size=self.image_size)

    def min_distance(self) -> float:
        """Smallest pairwise distance (brute force), inf for fewer than 2 atoms"""
        if len(self) < 2:
            return math.inf
        d = self.positions[:, None, :] - self.positions[None, :, :]
        dist = np.sqrt((d ** 2).sum(-1))
        np.fill_diagonal(dist, np.inf)
        return float(dist.min())

    def to_dict(self) -> dict:
        return {"image_size": list(self.image_size),
                "positions": [[float(x), float(y)] for x, y in self.positions]}

    @classmethod
    def from_dict(cls, data: dict) -> "AtomSet":
        return cls(positions=np.asarray(data.get("positions", []), dtype=np.float64),
                   image_size=tuple(int(v) for v in data.get("image_size", (0, 0))))


def poisson_disk(w: int, h: int, r_min: float, seed: int, k: int = POISSON_K) -> AtomSet:
    """
    Bridson blue-noise sampling on [0, w) x [0, h)

    Every pair of points is at least r_min apart; an active point is retired
    after k rejected candidates from the annulus [r_min, 2 r_min).
    """
    if r_min <= 0:
        raise ConfigError(f"r_min must be > 0, got {r_min}")
    if w <= 0 or h <= 0:
        return AtomSet(image_size=(w, h))
    rng = np.random.default_rng(seed)
    cell = r_min / math.sqrt(2.0)
    gw, gh = int(math.ceil(w / cell)), int(math.ceil(h / cell))
    grid = np.full((gh, gw), -1, dtype=np.int64)
    # at most one point per grid cell
    points = np.zeros((gw * gh, 2), dtype=np.float64)
    count = 0

    def _insert(x: float, y: float) -> None:
        nonlocal count
        grid[int(y / cell), int(x / cell)] = count
        points[count] = (x, y)
        count += 1

    def _fits(x: float, y: float) -> bool:
        gx, gy = int(x / cell), int(y / cell)
        window = grid[max(gy - 2, 0):gy + 3, max(gx - 2, 0):gx + 3]
        idx = window[window >= 0]
        if idx.size == 0:
            return True
        near = points[idx]
        return bool(np.all((near[:, 0] - x) ** 2 + (near[:, 1] - y) ** 2 >= r_min * r_min))

    _insert(rng.uniform(0, w), rng.uniform(0, h))
    active = [0]
    while active:
        slot = int(rng.integers(len(active)))
        qx, qy = points[active[slot]]
        angles = rng.uniform(0, 2 * math.pi, k)
        radii = r_min * np.sqrt(rng.uniform(1.0, 4.0, k))
        accepted = False
        for px, py in zip(qx + radii * np.cos(angles), qy + radii * np.sin(angles)):
            if not (0 <= px < w and 0 <= py < h):
                continue
            if _fits(px, py):
                _insert(float(px), float(py))
                active.append(count - 1)
                accepted = True
                break
        if not accepted:
            active[slot] = active[-1]
            active.pop()
    return AtomSet(positions=points[:count].copy(), image_size=(w, h))


def _fade(t: np.ndarray) -> np.ndarray:
    return t * t * t * (t * (t * 6 - 15) + 10)


def perlin_noise(w: int, h: int, cell: int, seed: int) -> np.ndarray:
    """Gradient-lattice Perlin noise in [-1, 1] with quintic smoothstep, shape [H, W]"""
    if cell < 2:
        raise ConfigError(f"Perlin cell size must be >= 2, got {cell}")
    rng = np.random.default_rng(seed)
    lw, lh = w // cell + 2, h // cell + 2
    angles = rng.uniform(0, 2 * math.pi, (lh, lw))
    gx, gy = np.cos(angles), np.sin(angles)

    ys = (np.arange(h) + 0.5) / cell
    xs = (np.arange(w) + 0.5) / cell
    y0, x0 = np.floor(ys).astype(int), np.floor(xs).astype(int)
    fy, fx = (ys - y0)[:, None], (xs - x0)[None, :]
    Y0, X0 = y0[:, None], x0[None, :]

    def _dot(oy: int, ox: int) -> np.ndarray:
        return gx[Y0 + oy, X0 + ox] * (fx - ox) + gy[Y0 + oy, X0 + ox] * (fy - oy)

    u, v = _fade(fx), _fade(fy)
    top = _dot(0, 0) + u * (_dot(0, 1) - _dot(0, 0))
    bottom = _dot(1, 0) + u * (_dot(1, 1) - _dot(1, 0))
    # 2D gradient noise stays within +-sqrt(1/2); rescale to [-1, 1]
    return np.clip((top + v * (bottom - top)) * math.sqrt(2.0), -1.0, 1.0)


def perlin_mask(w: int, h: int, cell: int, threshold: float, seed: int) -> Tensor:
    """Binary [1,H,W] mask: 1 = material (noise > threshold), 0 = vacuum"""
    noise = perlin_noise(w, h, cell, seed)
    return Tensor((noise > threshold).astype(np.float32)[None])
