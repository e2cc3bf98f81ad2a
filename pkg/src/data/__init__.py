"""
Synthetic nucleation image generation and dataset storage
"""

from .sampling import AtomSet, poisson_disk, perlin_noise, perlin_mask, POISSON_K
from .render import RenderParams, DistSpec, render_atoms, sample_spec, validate_spec, GT_PEAK, GT_SIGMA
from .generator import GenerationConfig, Sample, make_sample, nearest_pixels
from .dataset import (
    Dataset, read_dataset, write_dataset, generate_dataset, generate_samples, validation_seed,
    dataset_id, sample_id,
)

__all__ = [
    'AtomSet', 'poisson_disk', 'perlin_noise', 'perlin_mask', 'POISSON_K',
    'RenderParams', 'DistSpec', 'render_atoms', 'sample_spec', 'validate_spec', 'GT_PEAK', 'GT_SIGMA',
    'GenerationConfig', 'Sample', 'make_sample', 'nearest_pixels',
    'Dataset', 'read_dataset', 'write_dataset', 'generate_dataset', 'generate_samples',
    'validation_seed', 'dataset_id', 'sample_id',
]
