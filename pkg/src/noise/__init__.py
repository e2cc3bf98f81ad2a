"""
HRTEM sensor noise: synthesis and calibration
"""

from .model import NoiseParams, sigma_p, sigma_p_map, add_noise, BUILTIN_SLOPE, BUILTIN_INTERCEPT, BUILTIN_SIGMA_C
from .sequences import VacuumSequence, synth_vacuum, intensity_ladder, write_sequences, read_sequences
from .calibration import (
    SequenceFit, CalibrationReport, sequence_statistics, pooled_sigma_c, fit_affine, calibrate, calibrate_with_report,
)

__all__ = [
    'NoiseParams', 'sigma_p', 'sigma_p_map', 'add_noise', 'BUILTIN_SLOPE', 'BUILTIN_INTERCEPT', 'BUILTIN_SIGMA_C',
    'VacuumSequence', 'synth_vacuum', 'intensity_ladder', 'write_sequences', 'read_sequences',
    'SequenceFit', 'CalibrationReport', 'sequence_statistics', 'pooled_sigma_c', 'fit_affine', 'calibrate',
    'calibrate_with_report',
]
