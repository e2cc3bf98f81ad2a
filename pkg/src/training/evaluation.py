"""
Dataset evaluation for SCGN and the comparison methods
"""

import logging
from typing import List, Optional, Union

import numpy as np

from ..baselines import GaussianFilterSpec, gaussian_filter
from ..data import Dataset, read_dataset
from ..model import ModelParams, denoise
from ..metrics import MetricReport, MetricsConfig, evaluate_images
from ..tensor import Tensor
from ..utils.constants import Method
from ..utils.errors import ConfigError, UsageError

logger = logging.getLogger(__name__)

EVAL_BATCH = 8


def _open(dataset: Union[str, Dataset]) -> Dataset:
    return dataset if isinstance(dataset, Dataset) else read_dataset(dataset)


def predict(method: str, ds: Dataset, model: Optional[ModelParams] = None,
            gaussian: Optional[GaussianFilterSpec] = None) -> List[np.ndarray]:
    """Denoised [1,H,W] arrays, one per sample, in pixel units"""
    if method not in Method.ALL:
        raise ConfigError(f"unknown method {method!r}, expected one of {Method.ALL}")
    if method == Method.ORACLE:
        return [ds.gt(i).data for i in range(len(ds))]
    if method == Method.IDENTITY:
        return [ds.noisy(i).data for i in range(len(ds))]
    if method == Method.GAUSSIAN:
        spec = (gaussian or GaussianFilterSpec()).validate()
        return [gaussian_filter(ds.noisy(i), spec).data for i in range(len(ds))]
    if model is None:
        raise UsageError("method 'scgn' needs a model")
    preds = []
    for start in range(0, len(ds), EVAL_BATCH):
        indices = range(start, min(start + EVAL_BATCH, len(ds)))
        batch = denoise(model, Tensor(ds.stack("noisy", indices)))
        preds.extend(batch.data[i] for i in range(batch.shape[0]))
    return preds


def evaluate(model: Optional[ModelParams], dataset: Union[str, Dataset], metrics_cfg: Optional[MetricsConfig] = None,
             method: str = Method.SCGN, gaussian: Optional[GaussianFilterSpec] = None) -> MetricReport:
    """
    Denoise every noisy image of a dataset and score it against its ground truth

    identity returns the noisy input and oracle returns the ground truth;
    both exist to bound the table from below and above.
    """
    ds = _open(dataset)
    preds = predict(method, ds, model=model, gaussian=gaussian)
    gts = [ds.gt(i).data for i in range(len(ds))]
    meta = {"method": method, "dataset": str(ds.path), "dataset_id": ds.dataset_id}
    if method == Method.GAUSSIAN:
        meta["params"] = (gaussian or GaussianFilterSpec()).to_dict()
    elif method == Method.SCGN and model is not None:
        meta["params"] = model.arch.to_dict()
    report = evaluate_images(preds, gts, metrics_cfg, meta)
    logger.info(f"{method}: PSNR {report.psnr_db:.2f} dB, SSIM {report.ssim:.4f}, IoU {report.iou:.4f} "
                f"over {len(ds)} samples")
    return report
