"""
Classical denoising baselines
"""

from .gaussian import GaussianFilterSpec, gaussian_taps, gaussian_filter, DEFAULT_SIGMA

__all__ = ['GaussianFilterSpec', 'gaussian_taps', 'gaussian_filter', 'DEFAULT_SIGMA']
