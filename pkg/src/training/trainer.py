"""
Supervised training loop: L1 loss, Adam, seeded mini-batches, checkpoints
"""

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from ..data import Dataset, read_dataset
from ..model import ArchConfig, ModelParams, init_model, named_parameters, save_checkpoint, scgn_forward
from ..tensor import Tensor, backward, zero_grad
from ..utils.constants import PIXEL_PEAK
from ..utils.errors import ConfigError, NumericalError
from ..utils.file_handlers import ensure_dir
from .config import TrainConfig
from .evaluation import evaluate
from .loss import l1_loss
from .optim import AdamState, adam_step, clip_grad_norm

logger = logging.getLogger(__name__)

LOG_FILE = "train_log.jsonl"


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    seconds: float
    metrics: Optional[dict] = None


@dataclass
class TrainLog:
    epochs: List[EpochRecord] = field(default_factory=list)

    @property
    def losses(self) -> List[float]:
        return [e.loss for e in self.epochs]

    def append(self, record: EpochRecord, path: Optional[Path] = None) -> None:
        self.epochs.append(record)
        if path is not None:
            with open(path, "a", encoding="utf-8") as f:
                f.write(json.dumps(asdict(record), sort_keys=True) + "\n")

    @classmethod
    def read(cls, path) -> "TrainLog":
        log = cls()
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    log.epochs.append(EpochRecord(**json.loads(line)))
        return log


def _load_pairs(ds: Dataset, limit: int) -> Tuple[np.ndarray, np.ndarray]:
    count = len(ds) if limit <= 0 else min(limit, len(ds))
    indices = range(count)
    noisy = ds.stack("noisy", indices) / np.float32(PIXEL_PEAK)
    gt = ds.stack("gt", indices) / np.float32(PIXEL_PEAK)
    return noisy.astype(np.float32), gt.astype(np.float32)


def _check_dataset(ds: Dataset, arch: ArchConfig) -> None:
    if len(ds) == 0:
        raise ConfigError(f"dataset {ds.path} has no samples")
    shape = ds.noisy(0).shape
    if len(shape) != 3 or shape[0] != 1:
        raise ConfigError(f"SCGN takes single-channel [1,H,W] images, dataset has {shape}")
    if arch.fbgw_enabled and min(shape[-2:]) < 2:
        raise ConfigError(f"frequency branch needs images of at least 2x2, dataset has {shape}")


def train(cfg: TrainConfig, dataset: Optional[Union[str, Dataset]] = None,
          val_dataset: Optional[Union[str, Dataset]] = None) -> Tuple[ModelParams, TrainLog]:
    """
    Train SCGN from a seeded initialisation

    Batches come from a seeded permutation per epoch (the last partial batch
    is kept). With cfg.out_dir set, train_log.jsonl, periodic checkpoints and
    a final `model` checkpoint are written there.
    """
    cfg.validate()
    model = init_model(cfg.arch, cfg.seed)
    log = TrainLog()
    if cfg.epochs == 0:
        logger.info("epochs=0, returning the initialised model")
        return model, log

    source = dataset if dataset is not None else cfg.dataset
    if source is None:
        raise ConfigError("no training dataset given")
    ds = source if isinstance(source, Dataset) else read_dataset(source)
    _check_dataset(ds, cfg.arch)
    val = val_dataset if val_dataset is not None else cfg.val_dataset
    if cfg.eval_every and val is None:
        raise ConfigError("eval_every is set but no validation dataset was given")

    noisy, gt = _load_pairs(ds, cfg.train_pairs)
    n = len(noisy)
    out_dir = ensure_dir(cfg.out_dir) if cfg.out_dir else None
    log_path = None
    if out_dir is not None:
        log_path = out_dir / LOG_FILE
        log_path.write_text("", encoding="utf-8")

    params = named_parameters(model)
    tensors = [t for _, t in params]
    state = AdamState()
    rng = np.random.default_rng(cfg.seed)
    logger.info(f"Training on {n} pairs for {cfg.epochs} epochs (batch {cfg.batch_size}, lr {cfg.lr})")

    for epoch in range(1, cfg.epochs + 1):
        started = time.perf_counter()
        order = rng.permutation(n)
        batches = [order[i:i + cfg.batch_size] for i in range(0, n, cfg.batch_size)]
        total = 0.0
        progress = tqdm(batches, desc=f"Epoch {epoch}/{cfg.epochs}", leave=False, disable=not cfg.progress)
        for idx in progress:
            pred = scgn_forward(Tensor(noisy[idx]), model)
            loss = l1_loss(pred, Tensor(gt[idx]))
            value = loss.item()
            if not math.isfinite(value):
                raise NumericalError("non-finite training loss", path="loss", step=state.t + 1)
            zero_grad(tensors)
            backward(loss)
            grads = [t.grad for t in tensors]
            if cfg.clip_grad_norm is not None:
                grads, norm = clip_grad_norm([np.zeros(t.shape) if g is None else g for t, g in zip(tensors, grads)],
                                             cfg.clip_grad_norm)
                logger.debug(f"gradient norm {norm:.4g}")
            adam_step(params, grads, state, cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps)
            total += value * len(idx)
            progress.set_postfix(loss=f"{value:.4f}")

        record = EpochRecord(epoch=epoch, loss=total / n, seconds=round(time.perf_counter() - started, 3))
        if cfg.eval_every and epoch % cfg.eval_every == 0:
            report = evaluate(model, val)
            record.metrics = {"psnr_db": report.psnr_db, "ssim": report.ssim, "iou": report.iou}
        log.append(record, log_path)
        logger.info(f"Epoch {epoch}/{cfg.epochs}: loss {record.loss:.5f} ({record.seconds:.1f}s)")

        if out_dir is not None and cfg.checkpoint_every and epoch % cfg.checkpoint_every == 0:
            save_checkpoint(out_dir / "checkpoints" / f"epoch_{epoch:04d}", model, cfg.seed, epoch, log.losses)

    if out_dir is not None:
        save_checkpoint(out_dir / "model", model, cfg.seed, cfg.epochs, log.losses)
    return model, log


def run_ablation(cfg: TrainConfig, val_dataset: Union[str, Dataset],
                 variants: Sequence[str] = ("full", "V1", "V2", "V3", "V5"),
                 seeds: Sequence[int] = (0, 1, 2)) -> Dict[str, float]:
    """Mean validation PSNR per architecture variant over several training seeds"""
    results = {}
    for name in variants:
        arch = ArchConfig.variant(name, n=cfg.arch.n, C=cfg.arch.C, r=cfg.arch.r)
        scores = []
        for seed in seeds:
            run = replace(cfg, arch=arch, seed=seed, out_dir=None, eval_every=0)
            model, _ = train(run)
            scores.append(evaluate(model, val_dataset).psnr_db)
        results[name] = float(np.mean(scores))
        logger.info(f"Ablation {name}: mean PSNR {results[name]:.2f} dB over {len(seeds)} seeds")
    return results
