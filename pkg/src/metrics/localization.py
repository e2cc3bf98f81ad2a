"""
Atom localization by thresholding and connected components, and pixel IoU
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from ..tensor import Tensor
from ..utils.constants import BINARIZE_THRESHOLD, PIXEL_PEAK
from ..utils.errors import ConfigError, DimensionError
from .quality import ImageLike, as_image

EIGHT_CONNECTED = np.ones((3, 3), dtype=int)
DEFAULT_MIN_SIZE = 1


@dataclass(eq=False)
class LocalizationResult:
    mask: Tensor
    centroids: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))   # rows of (x, y)

    @property
    def count(self) -> int:
        return len(self.centroids)

    def to_dict(self) -> dict:
        return {"count": self.count, "centroids": [[float(x), float(y)] for x, y in self.centroids]}


def binarize(image: ImageLike, threshold: float = BINARIZE_THRESHOLD) -> np.ndarray:
    return as_image(image) > threshold


def localize(denoised: ImageLike, threshold: float = BINARIZE_THRESHOLD,
             min_size: int = DEFAULT_MIN_SIZE) -> LocalizationResult:
    """
    Binarize at threshold, label 8-connected components, drop those under
    min_size pixels; centroids are intensity-weighted (x, y) means.
    """
    if not 0 < threshold < PIXEL_PEAK:
        raise ConfigError(f"threshold must lie in (0, {PIXEL_PEAK:g}), got {threshold}")
    image = as_image(denoised)
    labels, n = ndimage.label(image > threshold, structure=EIGHT_CONNECTED)
    sizes = np.bincount(labels.ravel(), minlength=n + 1)
    kept = [i for i in range(1, n + 1) if sizes[i] >= min_size]
    mask = np.isin(labels, kept)
    if kept:
        centres = np.asarray(ndimage.center_of_mass(image, labels, kept), dtype=np.float64)
        centroids = centres[:, ::-1].copy()
    else:
        centroids = np.zeros((0, 2))
    return LocalizationResult(mask=Tensor(mask.astype(np.float32)[None]), centroids=centroids)


def iou(pred_mask: ImageLike, gt_mask: ImageLike) -> float:
    """|A and B| / |A or B| of two binary masks; 1.0 when both are empty"""
    a, b = as_image(pred_mask) > 0, as_image(gt_mask) > 0
    if a.shape != b.shape:
        raise DimensionError(f"mask shapes differ: {a.shape} vs {b.shape}")
    union = int(np.count_nonzero(a | b))
    if union == 0:
        return 1.0
    return int(np.count_nonzero(a & b)) / union
