"""
SCGN denoising network: parameters, forward pass, initialisation, checkpoints, trace export
"""

from .params import (
    ArchConfig, ConvParams, ClassifierParams, SdgwParams, FbgwParams, BlockParams, ModelParams,
    VARIANTS, named_parameters, parameter_dict, parameter_count, count_parameters,
    map_parameters, cast_model,
)
from .scgn import (
    Trace, local_sd, sdgw_forward, fbgw_forward, channel_attention_forward, frequency_forward,
    sfe_block_forward, scgn_forward, denoise, band_weights, position_channels, range_checks_enabled,
)
from .init import init_model
from .checkpoint import save_checkpoint, load_checkpoint, read_manifest
from .visualize import tile_channels, write_trace, TRACE_INDEX

__all__ = [
    'ArchConfig', 'ConvParams', 'ClassifierParams', 'SdgwParams', 'FbgwParams', 'BlockParams',
    'ModelParams', 'VARIANTS', 'named_parameters', 'parameter_dict', 'parameter_count',
    'count_parameters', 'map_parameters', 'cast_model',
    'Trace', 'local_sd', 'sdgw_forward', 'fbgw_forward', 'channel_attention_forward',
    'frequency_forward', 'sfe_block_forward', 'scgn_forward', 'denoise', 'band_weights',
    'position_channels', 'range_checks_enabled',
    'init_model',
    'save_checkpoint', 'load_checkpoint', 'read_manifest',
    'tile_channels', 'write_trace', 'TRACE_INDEX',
]
