"""
Metric aggregation, JSON round trip and table rendering
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..utils.constants import BINARIZE_THRESHOLD, PIXEL_PEAK, PSNR_CAP_DB
from ..utils.errors import ConfigError, DimensionError
from ..utils.file_handlers import read_json, write_json
from .localization import DEFAULT_MIN_SIZE, binarize, iou
from .quality import psnr, ssim

FLAG_PSNR_CAPPED = "psnr_capped"
FLAG_IOU_EMPTY = "iou_both_empty"


@dataclass
class MetricsConfig:
    peak: float = PIXEL_PEAK
    iou_threshold: float = BINARIZE_THRESHOLD
    localize_threshold: float = BINARIZE_THRESHOLD
    min_size: int = DEFAULT_MIN_SIZE
    psnr_cap: float = PSNR_CAP_DB
    clamp: bool = True

    def validate(self) -> "MetricsConfig":
        if self.peak <= 0:
            raise ConfigError(f"peak must be > 0, got {self.peak}")
        for name in ("iou_threshold", "localize_threshold"):
            value = getattr(self, name)
            if not 0 < value < self.peak:
                raise ConfigError(f"{name} must lie in (0, {self.peak:g}), got {value}")
        if self.min_size < 1:
            raise ConfigError(f"min_size must be >= 1, got {self.min_size}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SampleMetrics:
    psnr_db: float
    ssim: float
    iou: float
    flags: List[str] = field(default_factory=list)


@dataclass
class MetricReport:
    psnr_db: float = 0.0
    ssim: float = 0.0
    iou: float = 0.0
    per_sample: List[SampleMetrics] = field(default_factory=list)
    meta: Dict = field(default_factory=dict)

    @property
    def method(self) -> str:
        return str(self.meta.get("method", ""))

    def to_dict(self) -> dict:
        return {
            "psnr_db": self.psnr_db,
            "ssim": self.ssim,
            "iou": self.iou,
            "per_sample": [asdict(s) for s in self.per_sample],
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MetricReport":
        return cls(
            psnr_db=float(data["psnr_db"]),
            ssim=float(data["ssim"]),
            iou=float(data["iou"]),
            per_sample=[SampleMetrics(**s) for s in data.get("per_sample", [])],
            meta=dict(data.get("meta", {})),
        )

    def save(self, path) -> None:
        write_json(path, self.to_dict())

    @classmethod
    def load(cls, path) -> "MetricReport":
        return cls.from_dict(read_json(path))


def sample_metrics(pred: np.ndarray, gt: np.ndarray, cfg: MetricsConfig) -> SampleMetrics:
    flags = []
    value = psnr(pred, gt, cfg.peak)
    if math.isinf(value):
        value = cfg.psnr_cap
        flags.append(FLAG_PSNR_CAPPED)
    pred_mask = binarize(pred, cfg.iou_threshold)
    gt_mask = binarize(gt, cfg.iou_threshold)
    if not pred_mask.any() and not gt_mask.any():
        flags.append(FLAG_IOU_EMPTY)
    return SampleMetrics(psnr_db=float(value), ssim=ssim(pred, gt, cfg.peak),
                         iou=iou(pred_mask, gt_mask), flags=flags)


def evaluate_images(preds: Sequence[np.ndarray], gts: Sequence[np.ndarray],
                    cfg: Optional[MetricsConfig] = None, meta: Optional[dict] = None) -> MetricReport:
    """Per-sample PSNR/SSIM/IoU and their arithmetic means"""
    cfg = (cfg or MetricsConfig()).validate()
    if len(preds) != len(gts):
        raise DimensionError(f"{len(preds)} predictions for {len(gts)} ground-truth images")
    rows = []
    for pred, gt in zip(preds, gts):
        pred = np.asarray(getattr(pred, "data", pred), dtype=np.float64)
        gt = np.asarray(getattr(gt, "data", gt), dtype=np.float64)
        if cfg.clamp:
            pred = np.clip(pred, 0.0, cfg.peak)
        rows.append(sample_metrics(pred, gt, cfg))
    report = MetricReport(per_sample=rows, meta=dict(meta or {}))
    if rows:
        report.psnr_db = float(np.mean([r.psnr_db for r in rows]))
        report.ssim = float(np.mean([r.ssim for r in rows]))
        report.iou = float(np.mean([r.iou for r in rows]))
    report.meta.setdefault("samples", len(rows))
    report.meta.setdefault("metrics", cfg.to_dict())
    return report


def format_table(reports: Sequence[MetricReport]) -> str:
    """Aligned method x {PSNR, SSIM, IoU} table"""
    header = ("Method", "PSNR (dB)", "SSIM", "IoU")
    rows = [(r.method or "-", f"{r.psnr_db:.2f}", f"{r.ssim:.4f}", f"{r.iou:.4f}") for r in reports]
    widths = [max(len(row[i]) for row in [header] + rows) for i in range(len(header))]

    def _line(cells) -> str:
        first = cells[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return "  ".join([first] + rest)

    rule = "-" * len(_line(header))
    return "\n".join([_line(header), rule] + [_line(r) for r in rows])
