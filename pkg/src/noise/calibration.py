"""
Noise calibration from vacuum sequences

Per sequence the temporal mean is removed, column noise is estimated as
the row-mean of the residual of each column and the remainder is taken
as pointwise noise. sigma_p is then regressed on mean intensity, and the
per-sequence sigma_c^2 estimates are pooled with inverse-variance weights.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy import stats

from ..utils.errors import FitError
from .model import NoiseParams
from .sequences import VacuumSequence

logger = logging.getLogger(__name__)

# intensities closer than this (relative to the largest) count as one level
MIN_RELATIVE_SPREAD = 1e-3


@dataclass
class SequenceFit:
    intensity: float
    sigma_p: float
    sigma_c: float
    sigma_c_sq: float = 0.0
    column_var: float = 0.0
    column_count: int = 0
    fitted_sigma_p: float = 0.0
    residual: float = 0.0


@dataclass
class CalibrationReport:
    rows: List[SequenceFit] = field(default_factory=list)
    r_value: float = 0.0

    def to_dict(self) -> dict:
        return {"rows": [asdict(r) for r in self.rows], "r_value": self.r_value}


def sequence_statistics(seq: VacuumSequence) -> SequenceFit:
    """(mean intensity, sigma_p, sigma_c) of one vacuum sequence"""
    seq.validate()
    frames = seq.stack()
    t, h, _ = frames.shape
    if h < 2:
        raise FitError(f"frames need at least 2 rows for column separation, got {h}")
    residual = (frames - frames.mean(axis=0)) * np.sqrt(t / (t - 1))
    column = residual.mean(axis=1)
    pointwise = residual - column[:, None, :]
    sp = float(pointwise.std() * np.sqrt(h / (h - 1)))
    column_var = float(column.var())
    sc2 = column_var - sp * sp / h
    return SequenceFit(intensity=float(frames.mean()), sigma_p=sp, sigma_c=float(np.sqrt(max(sc2, 0.0))),
                       sigma_c_sq=sc2, column_var=column_var, column_count=int(column.size))


def pooled_sigma_c(rows: Sequence[SequenceFit]) -> float:
    """
    Inverse-variance mean of the per-sequence sigma_c^2 estimates

    A column-variance estimate over n columns has variance about
    2 * column_var^2 / n, so bright sequences, whose column means carry
    more pointwise noise, get less weight.
    """
    var = np.array([max(r.column_var, 1e-12) for r in rows])
    counts = np.array([max(r.column_count, 1) for r in rows], dtype=np.float64)
    weights = counts / (var * var)
    sc2 = float(np.sum(weights * np.array([r.sigma_c_sq for r in rows])) / np.sum(weights))
    return float(np.sqrt(max(sc2, 0.0)))


def fit_affine(intensities: Sequence[float], sigmas: Sequence[float]) -> Tuple[float, float, float]:
    """Least-squares line sigma = slope * I + intercept; returns (slope, intercept, r)"""
    x = np.asarray(intensities, dtype=np.float64)
    y = np.asarray(sigmas, dtype=np.float64)
    if x.size < 2:
        raise FitError(f"need >= 2 intensities to fit the pointwise noise line, got {x.size}")
    if np.ptp(x) <= MIN_RELATIVE_SPREAD * np.abs(x).max():
        raise FitError(f"all sequences share one intensity (spread {np.ptp(x):.4g}), regression is singular")
    fit = stats.linregress(x, y)
    slope, intercept = float(fit.slope), float(fit.intercept)
    if slope < 0:
        logger.warning(f"Fitted slope {slope:.6g} is negative, clamping to 0")
        slope = 0.0
    if intercept < 0:
        logger.warning(f"Fitted intercept {intercept:.6g} is negative, clamping to 0")
        intercept = 0.0
    r_value = float(fit.rvalue) if np.isfinite(fit.rvalue) else 0.0
    return slope, intercept, r_value


def calibrate_with_report(sequences: Sequence[VacuumSequence]) -> Tuple[NoiseParams, CalibrationReport]:
    if len(sequences) < 2:
        raise FitError(f"need >= 2 intensities (sequences), got {len(sequences)}")
    declared = sorted({float(seq.intensity) for seq in sequences})
    if len(declared) < 2:
        raise FitError(f"all {len(sequences)} sequences declare intensity {declared[0]:g}, regression is singular")
    rows = [sequence_statistics(seq) for seq in sequences]
    slope, intercept, r_value = fit_affine([r.intensity for r in rows], [r.sigma_p for r in rows])
    for row in rows:
        row.fitted_sigma_p = slope * row.intensity + intercept
        row.residual = row.sigma_p - row.fitted_sigma_p
    sigma_c = pooled_sigma_c(rows)
    params = NoiseParams(slope=slope, intercept=intercept, sigma_c=sigma_c)
    logger.info(f"Calibrated noise: slope={slope:.5g} intercept={intercept:.5g} sigma_c={sigma_c:.5g}")
    return params, CalibrationReport(rows=rows, r_value=r_value)


def calibrate(sequences: Sequence[VacuumSequence]) -> NoiseParams:
    return calibrate_with_report(sequences)[0]
