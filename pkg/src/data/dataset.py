"""
Dataset directories

    <root>/index.json
    <root>/samples/<id>/noisy.tensor
    <root>/samples/<id>/gt.tensor
    <root>/samples/<id>/atoms.json
    <root>/samples/<id>/{noisy,gt}.pgm      (optional)
"""

import hashlib
import json
import logging
import shutil
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterator, List, Optional, Sequence

import numpy as np

from ..tensor import Tensor, load_tensor, save_tensor
from ..utils.constants import FORMAT_REVISION, PIXEL_PEAK, TENSOR_SUFFIX, VALIDATION_SEED_OFFSET
from ..utils.errors import ConfigError, FormatError, UsageError
from ..utils.file_handlers import ensure_dir, read_json, replace_dir, write_json
from ..utils.helpers import derive_seeds
from ..utils.pgm import write_pgm
from .generator import GenerationConfig, Sample, make_sample
from .sampling import AtomSet

logger = logging.getLogger(__name__)

INDEX_FILE = "index.json"
SAMPLES_DIR = "samples"


def sample_id(i: int) -> str:
    return f"{i:06d}"


def validation_seed(seed: int) -> int:
    """Seed of the held-out set generated alongside a training set"""
    return int(seed) + VALIDATION_SEED_OFFSET


def dataset_id(cfg: GenerationConfig, seed: int, count: int) -> str:
    payload = json.dumps({"config": cfg.to_dict(), "seed": int(seed), "count": int(count)}, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


def write_dataset(out, samples: Sequence[Sample], cfg: GenerationConfig, seed: int,
                  seeds: Sequence[int], pgm: bool = False) -> Path:
    """Write samples into a temp directory and swap it into place"""
    final = Path(out)
    ensure_dir(final.parent)
    tmp = Path(tempfile.mkdtemp(prefix=f".{final.name}.", dir=str(final.parent)))
    try:
        entries = []
        for i, (sample, s) in enumerate(zip(samples, seeds)):
            sid = sample_id(i)
            sdir = ensure_dir(tmp / SAMPLES_DIR / sid)
            noisy = sample.noisy
            if cfg.clamp_export:
                noisy = Tensor(np.clip(noisy.data, 0.0, PIXEL_PEAK))
            save_tensor(sdir / f"noisy{TENSOR_SUFFIX}", noisy, "noisy")
            save_tensor(sdir / f"gt{TENSOR_SUFFIX}", sample.gt, "gt")
            write_json(sdir / "atoms.json", sample.atoms.to_dict())
            if pgm:
                write_pgm(sdir / "noisy.pgm", noisy.data)
                write_pgm(sdir / "gt.pgm", sample.gt.data)
            entries.append({"id": sid, "seed": int(s), "atoms": len(sample.atoms)})
        write_json(tmp / INDEX_FILE, {
            "format_revision": FORMAT_REVISION,
            "dataset_id": dataset_id(cfg, seed, len(entries)),
            "seed": int(seed),
            "count": len(entries),
            "config": cfg.to_dict(),
            "samples": entries,
        })
        replace_dir(tmp, final)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    logger.info(f"Wrote dataset with {len(entries)} samples to {final}")
    return final


def generate_samples(cfg: GenerationConfig, count: int, seed: int, threads: int = 1) -> List[Sample]:
    cfg.validate()
    seeds = derive_seeds(seed, count)
    if threads > 1 and count > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda s: make_sample(cfg, s), seeds))
    return [make_sample(cfg, s) for s in seeds]


def generate_dataset(out, cfg: GenerationConfig, count: int, seed: int,
                     threads: int = 1, pgm: bool = False) -> Path:
    if count < 0:
        raise ConfigError(f"sample count must be >= 0, got {count}")
    samples = generate_samples(cfg, count, seed, threads)
    return write_dataset(out, samples, cfg, seed, derive_seeds(seed, count), pgm=pgm)


class Dataset:
    """Read-only view of a dataset directory; samples load lazily"""

    def __init__(self, path, index: dict):
        self.path = Path(path)
        self.index = index
        self.ids: List[str] = [e["id"] for e in index.get("samples", [])]
        self.config = GenerationConfig.from_dict(index["config"]) if "config" in index else None

    @property
    def dataset_id(self) -> str:
        return str(self.index.get("dataset_id", ""))

    @property
    def image_size(self):
        return self.config.size if self.config is not None else None

    def __len__(self) -> int:
        return len(self.ids)

    def _sample_dir(self, i: int) -> Path:
        return self.path / SAMPLES_DIR / self.ids[i]

    def noisy(self, i: int) -> Tensor:
        return load_tensor(self._sample_dir(i) / f"noisy{TENSOR_SUFFIX}")[0]

    def gt(self, i: int) -> Tensor:
        path = self._sample_dir(i) / f"gt{TENSOR_SUFFIX}"
        if not path.exists():
            raise UsageError(f"sample {self.ids[i]} has no ground truth ({path})")
        return load_tensor(path)[0]

    def atoms(self, i: int) -> AtomSet:
        return AtomSet.from_dict(read_json(self._sample_dir(i) / "atoms.json"))

    def load(self, i: int) -> Sample:
        return Sample(noisy=self.noisy(i), gt=self.gt(i), atoms=self.atoms(i),
                      meta=dict(self.index["samples"][i]))

    def __iter__(self) -> Iterator[Sample]:
        for i in range(len(self)):
            yield self.load(i)

    def stack(self, kind: str, indices: Optional[Sequence[int]] = None) -> np.ndarray:
        """[N,1,H,W] float32 array of noisy or gt images"""
        getter = self.noisy if kind == "noisy" else self.gt
        indices = range(len(self)) if indices is None else indices
        return np.stack([getter(i).data for i in indices]).astype(np.float32)


def read_dataset(path) -> Dataset:
    root = Path(path)
    index_path = root / INDEX_FILE
    if not index_path.exists():
        raise ConfigError(f"not a dataset directory (no {INDEX_FILE}): {root}")
    try:
        index = read_json(index_path)
    except json.JSONDecodeError as e:
        raise FormatError(f"unreadable dataset index: {e}", offset=e.pos, path=str(index_path)) from e
    if not isinstance(index, dict) or "samples" not in index:
        raise FormatError("dataset index lacks a samples list", path=str(index_path))
    return Dataset(root, index)
