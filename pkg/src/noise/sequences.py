"""
Vacuum frame sequences: synthesis and directory I/O
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence

import numpy as np

from ..tensor import Tensor, load_tensor, save_tensor
from ..utils.constants import TENSOR_SUFFIX
from ..utils.errors import ConfigError, DimensionError, FormatError
from ..utils.file_handlers import ensure_dir, read_json, write_json
from ..utils.helpers import derive_seeds
from .model import NoiseParams, add_noise

logger = logging.getLogger(__name__)

SEQUENCE_FILE = "sequence.json"


@dataclass(eq=False)
class VacuumSequence:
    intensity: float
    frames: List[Tensor] = field(default_factory=list)

    def validate(self) -> "VacuumSequence":
        if len(self.frames) < 2:
            raise ConfigError(f"a vacuum sequence needs at least 2 frames, got {len(self.frames)}")
        shape = self.frames[0].shape
        for i, frame in enumerate(self.frames):
            if frame.shape != shape:
                raise DimensionError(f"frame {i} has shape {frame.shape}, expected {shape}")
        return self

    def stack(self) -> np.ndarray:
        """Frames as a float64 [T, H, W] array"""
        return np.stack([f.data.reshape(f.shape[-2:]) for f in self.frames]).astype(np.float64)


def intensity_ladder(base: float = 100.0, count: int = 6) -> List[float]:
    """count intensities from base to 2*base in equal steps"""
    return [float(v) for v in np.linspace(base, 2.0 * base, count)]


def synth_vacuum(intensity: float, p: NoiseParams, n_frames: int, h: int, w: int, seed: int) -> VacuumSequence:
    if n_frames < 2:
        raise ConfigError(f"n_frames must be >= 2, got {n_frames}")
    clean = np.full((1, h, w), intensity, dtype=np.float32)
    frames = [add_noise(clean, p, s) for s in derive_seeds(seed, n_frames)]
    return VacuumSequence(intensity=float(intensity), frames=frames)


def write_sequences(out_dir, sequences: Sequence[VacuumSequence]) -> Path:
    out = ensure_dir(out_dir)
    for i, seq in enumerate(sequences):
        seq_dir = ensure_dir(out / f"seq_{i:03d}")
        for j, frame in enumerate(seq.frames):
            save_tensor(seq_dir / f"frame_{j:03d}{TENSOR_SUFFIX}", frame, f"frame_{j:03d}")
        write_json(seq_dir / SEQUENCE_FILE, {"intensity": seq.intensity, "frames": len(seq.frames)})
    logger.info(f"Wrote {len(sequences)} vacuum sequences to {out}")
    return out


def read_sequences(in_dir) -> List[VacuumSequence]:
    root = Path(in_dir)
    if not root.is_dir():
        raise ConfigError(f"sequence directory not found: {root}")
    sequences = []
    for seq_dir in sorted(p for p in root.iterdir() if (p / SEQUENCE_FILE).exists()):
        meta = read_json(seq_dir / SEQUENCE_FILE)
        if "intensity" not in meta:
            raise FormatError("sequence.json lacks intensity", path=str(seq_dir / SEQUENCE_FILE))
        frames = [load_tensor(f)[0] for f in sorted(seq_dir.glob(f"*{TENSOR_SUFFIX}"))]
        sequences.append(VacuumSequence(intensity=float(meta["intensity"]), frames=frames).validate())
    logger.info(f"Read {len(sequences)} vacuum sequences from {root}")
    return sequences
