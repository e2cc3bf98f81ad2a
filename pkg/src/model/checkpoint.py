"""
Checkpoint directories: manifest.json plus one tensor container per parameter
"""

import json
import logging
import shutil
import tempfile
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from ..tensor import Tensor, load_tensor, save_tensor
from ..utils.constants import FORMAT_REVISION, TENSOR_SUFFIX
from ..utils.errors import ConfigError, FormatError
from ..utils.file_handlers import ensure_dir, read_json, replace_dir, write_json
from .init import init_model
from .params import ArchConfig, ModelParams, map_parameters, named_parameters

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


def save_checkpoint(path, model: ModelParams, seed: int, epoch: int,
                    loss_history: Optional[List[float]] = None) -> Path:
    """Write a checkpoint directory atomically (temp directory, then rename)"""
    final = Path(path)
    ensure_dir(final.parent)
    tmp = Path(tempfile.mkdtemp(prefix=f".{final.name}.", dir=str(final.parent)))
    try:
        names = []
        for name, t in named_parameters(model):
            save_tensor(tmp / f"{name}{TENSOR_SUFFIX}", t, name)
            names.append(name)
        write_json(tmp / MANIFEST, {
            "format_revision": FORMAT_REVISION,
            "arch": model.arch.to_dict(),
            "seed": int(seed),
            "epoch": int(epoch),
            "loss_history": [float(v) for v in (loss_history or [])],
            "parameters": names,
        })
        replace_dir(tmp, final)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    logger.info(f"Checkpoint written to {final} (epoch {epoch}, {len(names)} tensors)")
    return final


def read_manifest(path) -> dict:
    manifest_path = Path(path) / MANIFEST
    if not manifest_path.exists():
        raise FormatError("checkpoint manifest missing", path=str(manifest_path))
    try:
        manifest = read_json(manifest_path)
    except json.JSONDecodeError as e:
        raise FormatError(f"unreadable checkpoint manifest: {e}", offset=e.pos, path=str(manifest_path)) from e
    for key in ("arch", "parameters"):
        if key not in manifest:
            raise FormatError(f"checkpoint manifest lacks {key!r}", path=str(manifest_path))
    return manifest


def load_checkpoint(path, expected_arch: Optional[ArchConfig] = None) -> Tuple[ModelParams, dict]:
    """
    Load a checkpoint directory

    Raises ConfigError when expected_arch is given and differs from the
    stored architecture, FormatError for missing or corrupt files.
    """
    path = Path(path)
    manifest = read_manifest(path)
    arch = ArchConfig.from_dict(manifest["arch"])
    if expected_arch is not None and expected_arch.to_dict() != arch.to_dict():
        raise ConfigError(f"checkpoint architecture {arch.to_dict()} does not match requested {expected_arch.to_dict()}")

    skeleton = init_model(arch, seed=0)
    expected_names = [name for name, _ in named_parameters(skeleton)]
    if list(manifest["parameters"]) != expected_names:
        raise FormatError("checkpoint parameter list does not match its architecture", path=str(path / MANIFEST))

    def _load(name: str, like: Tensor) -> Tensor:
        file = path / f"{name}{TENSOR_SUFFIX}"
        if not file.exists():
            raise FormatError(f"parameter file missing for {name}", path=str(file))
        loaded, _ = load_tensor(file)
        if loaded.shape != like.shape:
            raise FormatError(f"parameter {name} has shape {loaded.shape}, expected {like.shape}", path=str(file))
        return Tensor(np.array(loaded.data, dtype=np.float32), requires_grad=True, name=name)

    model = map_parameters(skeleton, _load)
    logger.info(f"Loaded checkpoint {path} (epoch {manifest.get('epoch')})")
    return model, manifest
