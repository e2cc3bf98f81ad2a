"""
Image quality metrics and atomic localization
"""

from .quality import psnr, ssim, ssim_map, as_image, SSIM_WINDOW
from .localization import LocalizationResult, localize, iou, binarize, DEFAULT_MIN_SIZE
from .report import (
    MetricsConfig, MetricReport, SampleMetrics, evaluate_images, sample_metrics, format_table,
    FLAG_PSNR_CAPPED, FLAG_IOU_EMPTY,
)

__all__ = [
    'psnr', 'ssim', 'ssim_map', 'as_image', 'SSIM_WINDOW',
    'LocalizationResult', 'localize', 'iou', 'binarize', 'DEFAULT_MIN_SIZE',
    'MetricsConfig', 'MetricReport', 'SampleMetrics', 'evaluate_images', 'sample_metrics', 'format_table',
    'FLAG_PSNR_CAPPED', 'FLAG_IOU_EMPTY',
]
