"""
SCGN forward pass

A residual CNN: shallow 3x3 conv, n spatial-frequency enhancement blocks,
3x3 tail conv. Each block splits its channels into a spatial branch
(deviation-guided gates) and a frequency branch (band-guided weights).
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from .. import tensor as nt
from ..tensor import ComplexTensor, Tensor, no_grad
from ..utils.constants import PIXEL_PEAK, SD_EPSILON, PadMode, PoolMode
from ..utils.env_handler import get_env_var
from ..utils.errors import DimensionError, NumericalError
from .params import (
    BlockParams, ClassifierParams, ConvParams, FbgwParams, FrequencyModule, ModelParams, SdgwParams,
)

logger = logging.getLogger(__name__)


@dataclass
class Trace:
    """Local SD maps, gates and band weights collected during one forward pass"""
    gates: List[np.ndarray] = field(default_factory=list)
    sd_maps: List[np.ndarray] = field(default_factory=list)
    band_weights: List[np.ndarray] = field(default_factory=list)

    def check(self) -> None:
        # closed [0, 1]: a float32 sigmoid rounds to exactly 1.0 once the logit passes ~17
        for i, g in enumerate(self.gates):
            if not np.all((g >= 0.0) & (g <= 1.0)):
                raise NumericalError(f"SDGW gate {i} left [0, 1]: min {g.min()}, max {g.max()}")
        for i, w in enumerate(self.band_weights):
            if not np.all((w >= 0.0) & (w <= 2.0)):
                raise NumericalError(f"band weight {i} left [0, 2]: min {w.min()}, max {w.max()}")


def range_checks_enabled() -> bool:
    return str(get_env_var("CHECK_RANGES", "0")).strip().lower() in ("1", "true", "yes", "on")


def _conv(x: Tensor, p: ConvParams, pad: Optional[str] = None) -> Tensor:
    return nt.conv2d(x, p.kernel, p.bias, pad=pad)


def _expect_channels(x: Tensor, channels: int, op: str) -> None:
    if x.ndim < 3 or x.shape[-3] != channels:
        raise DimensionError(f"{op}: expected {channels} channels on axis -3, got shape {x.shape}")


def local_sd(feature: Tensor) -> Tensor:
    """Per-channel standard deviation over a mirror-padded 3x3 window, floored by eps"""
    return nt.window_std3(nt.pad2d(feature, PadMode.MIRROR), SD_EPSILON)


def sdgw_forward(feature: Tensor, p: SdgwParams, trace: Optional[Trace] = None) -> Tensor:
    _expect_channels(feature, p.feat_conv.in_channels, "sdgw_forward")
    out = _conv(feature, p.feat_conv, PadMode.MIRROR)
    if p.weight_conv is None:
        return out
    sd = local_sd(feature)
    gate = nt.sigmoid(_conv(sd, p.weight_conv))
    if trace is not None:
        trace.sd_maps.append(sd.data.copy())
        trace.gates.append(gate.data.copy())
    return nt.mul(out, gate)


def position_channels(like: Tensor) -> Tensor:
    """
    Two constant channels of relative coordinates over the half-spectrum grid

    Channel 0 holds u/(H-1) along rows, channel 1 holds v/(Wr-1) along columns.
    """
    h, wr = like.shape[-2:]
    rows = np.arange(h, dtype=np.float64) / (h - 1)
    cols = np.arange(wr, dtype=np.float64) / (wr - 1)
    grid = np.stack([np.repeat(rows[:, None], wr, axis=1), np.repeat(cols[None, :], h, axis=0)])
    if like.ndim == 4:
        grid = np.broadcast_to(grid, (like.shape[0],) + grid.shape)
    return Tensor(np.ascontiguousarray(grid), dtype=like.dtype)


def _classify(pooled: Tensor, c: ClassifierParams) -> Tensor:
    return nt.sigmoid(_conv(nt.relu(_conv(pooled, c.conv1)), c.conv2))


def band_weights(bands: Tensor, p: FbgwParams) -> Tensor:
    """Per-channel weights in [0, 2]: sigmoid(avg chain) + sigmoid(max chain)"""
    avg = _classify(nt.global_pool(bands, PoolMode.AVG), p.cls_avg)
    mx = _classify(nt.global_pool(bands, PoolMode.MAX), p.max_classifier)
    return nt.add(avg, mx)


def _reweight(bands: Tensor, p: FbgwParams, trace: Optional[Trace]) -> Tensor:
    w = band_weights(bands, p)
    if trace is not None:
        trace.band_weights.append(w.data.copy())
    return nt.scale_channels(bands, w)


def fbgw_forward(feature: Tensor, p: FbgwParams, trace: Optional[Trace] = None) -> Tensor:
    """
    Frequency band-guided weighting

    rfft2 -> packed (re, im) channels [+ position channels] -> 1x1 decouple
    -> channel reweighting -> 1x1 recouple to 2*Cb channels -> irfft2.
    """
    if not p.spectral:
        return channel_attention_forward(feature, p, trace)
    _expect_channels(feature, p.decouple_conv.out_channels, "fbgw_forward")
    h, w = feature.shape[-2:]
    if h < 2 or w < 2:
        raise DimensionError(f"fbgw_forward: spatial size must be at least 2x2, got {h}x{w}")

    spectrum = nt.rfft2(feature).packed()
    if p.position_embedding:
        spectrum = nt.concat_channels([spectrum, position_channels(spectrum)])
    bands = _conv(spectrum, p.decouple_conv)
    recoupled = _conv(_reweight(bands, p, trace), p.recouple_conv)
    return nt.irfft2(ComplexTensor.from_packed(recoupled), w)


def channel_attention_forward(feature: Tensor, p: FbgwParams, trace: Optional[Trace] = None) -> Tensor:
    """Decouple/reweight/recouple chain applied directly in the spatial domain"""
    _expect_channels(feature, p.decouple_conv.in_channels, "channel_attention_forward")
    bands = _conv(feature, p.decouple_conv)
    return _conv(_reweight(bands, p, trace), p.recouple_conv)


def frequency_forward(feature: Tensor, p: FrequencyModule, trace: Optional[Trace] = None) -> Tensor:
    if isinstance(p, ConvParams):
        return _conv(feature, p, PadMode.MIRROR)
    return fbgw_forward(feature, p, trace)


def sfe_block_forward(feature: Tensor, p: BlockParams, trace: Optional[Trace] = None) -> Tensor:
    spatial, frequency = nt.split_channels(feature)
    for module in p.sdgw:
        spatial = sdgw_forward(spatial, module, trace)
    for module in p.fbgw:
        frequency = frequency_forward(frequency, module, trace)
    fused = _conv(nt.concat_channels([spatial, frequency]), p.fuse_conv, PadMode.MIRROR)
    return nt.add(fused, feature)


def scgn_forward(image: Tensor, m: ModelParams, trace: Optional[Trace] = None,
                 check_ranges: Optional[bool] = None) -> Tensor:
    """
    Full network, [1,H,W] -> [1,H,W] (or batched [N,1,H,W])

    With check_ranges (default: NUC_CHECK_RANGES) every gate and band
    weight is verified against its range after the pass.
    """
    if check_ranges is None:
        check_ranges = range_checks_enabled()
    if check_ranges and trace is None:
        trace = Trace()

    x = _conv(image, m.head_conv, PadMode.MIRROR)
    for block in m.blocks:
        x = sfe_block_forward(x, block, trace)
    out = _conv(x, m.tail_conv, PadMode.MIRROR)

    if check_ranges:
        trace.check()
    return out


def denoise(model: ModelParams, image: Union[Tensor, np.ndarray], trace: Optional[Trace] = None) -> Tensor:
    """Denoise a pixel-unit image (0-255 scale) without building a graph"""
    x = image if isinstance(image, Tensor) else Tensor(np.asarray(image, dtype=np.float32))
    if x.ndim == 2:
        x = Tensor(x.data[None])
    with no_grad():
        out = scgn_forward(nt.scale(x, 1.0 / PIXEL_PEAK), model, trace)
        out = nt.scale(out, PIXEL_PEAK)
    if not np.all(np.isfinite(out.data)):
        raise NumericalError("non-finite values in denoised output")
    return out
