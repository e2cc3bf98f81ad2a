"""
Utility functions
"""

from .errors import (
    NucError, DimensionError, ConfigError, UsageError, DomainError, FitError, FormatError, NumericalError,
)
from .file_handlers import ensure_dir, atomic_write_bytes, atomic_write_text, write_json, read_json, replace_dir
from .helpers import parse_size, derive_seeds, format_elapsed
from .env_handler import load_env, get_env_var, load_config_file, resolve_settings, write_resolved
from .console import configure_logging, banner, ok, warn, fail, info
from .pgm import write_pgm, read_pgm, to_uint8

__all__ = [
    'NucError', 'DimensionError', 'ConfigError', 'UsageError', 'DomainError', 'FitError',
    'FormatError', 'NumericalError',
    'ensure_dir', 'atomic_write_bytes', 'atomic_write_text', 'write_json', 'read_json', 'replace_dir',
    'parse_size', 'derive_seeds', 'format_elapsed',
    'load_env', 'get_env_var', 'load_config_file', 'resolve_settings', 'write_resolved',
    'configure_logging', 'banner', 'ok', 'warn', 'fail', 'info',
    'write_pgm', 'read_pgm', 'to_uint8',
]
