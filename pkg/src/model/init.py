"""
Seeded parameter initialisation
"""

import logging

import numpy as np

from ..tensor import Tensor
from .params import (
    ArchConfig, BlockParams, ClassifierParams, ConvParams, FbgwParams, ModelParams, SdgwParams,
    count_parameters,
)

logger = logging.getLogger(__name__)


def _conv(rng: np.random.Generator, cin: int, cout: int, k: int) -> ConvParams:
    bound = np.sqrt(1.0 / (cin * k * k))
    kernel = rng.uniform(-bound, bound, size=(cout, cin, k, k)).astype(np.float32)
    return ConvParams(
        kernel=Tensor(kernel, requires_grad=True),
        bias=Tensor(np.zeros(cout, dtype=np.float32), requires_grad=True),
    )


def _classifier(rng, cb: int, hidden: int) -> ClassifierParams:
    return ClassifierParams(conv1=_conv(rng, cb, hidden, 1), conv2=_conv(rng, hidden, cb, 1))


def _frequency_module(rng, arch: ArchConfig):
    cb, hidden = arch.branch_channels, arch.hidden_channels
    if arch.fbgw_enabled:
        spectral_in = 2 * cb + (2 if arch.position_embedding_enabled else 0)
        decouple = _conv(rng, spectral_in, cb, 1)
        cls_avg = _classifier(rng, cb, hidden)
        cls_max = None if arch.shared_classifier else _classifier(rng, cb, hidden)
        return FbgwParams(decouple_conv=decouple, cls_avg=cls_avg, cls_max=cls_max,
                          recouple_conv=_conv(rng, cb, 2 * cb, 1), spectral=True)
    if arch.channel_attention_substitute:
        decouple = _conv(rng, cb, cb, 1)
        cls_avg = _classifier(rng, cb, hidden)
        cls_max = None if arch.shared_classifier else _classifier(rng, cb, hidden)
        return FbgwParams(decouple_conv=decouple, cls_avg=cls_avg, cls_max=cls_max,
                          recouple_conv=_conv(rng, cb, cb, 1), spectral=False)
    return _conv(rng, cb, cb, 3)


def init_model(arch: ArchConfig, seed: int) -> ModelParams:
    """
    Build a model with kernels drawn from U[-b, b], b = sqrt(1/fan_in), and zero biases

    The same seed always yields bit-identical buffers.
    """
    arch.validate()
    rng = np.random.default_rng(seed)
    cb = arch.branch_channels

    head = _conv(rng, 1, arch.C, 3)
    blocks = []
    for _ in range(arch.n):
        sdgw = [
            SdgwParams(feat_conv=_conv(rng, cb, cb, 3),
                       weight_conv=_conv(rng, cb, cb, 1) if arch.sdgw_enabled else None)
            for _ in range(2)
        ]
        fbgw = [_frequency_module(rng, arch) for _ in range(2)]
        blocks.append(BlockParams(sdgw=sdgw, fbgw=fbgw, fuse_conv=_conv(rng, arch.C, arch.C, 3)))
    tail = _conv(rng, arch.C, 1, 3)

    model = ModelParams(head_conv=head, blocks=blocks, tail_conv=tail, arch=arch)
    logger.debug(f"Initialised SCGN n={arch.n} C={arch.C} with {count_parameters(arch)} parameters (seed {seed})")
    return model
