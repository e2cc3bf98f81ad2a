"""
Parameter containers and architecture configuration for SCGN
"""

from dataclasses import dataclass, field, fields
from typing import Callable, Dict, Iterator, List, Optional, Tuple, Union

from ..tensor import Tensor
from ..utils.errors import ConfigError

# Ablation presets: (sdgw, fbgw, position embedding, channel attention substitute)
VARIANTS = {
    "full": (True, True, True, False),
    "V1": (False, False, False, False),
    "V2": (False, True, True, False),
    "V3": (True, False, False, False),
    "V4": (True, False, False, True),
    "V5": (True, True, False, False),
}


@dataclass
class ArchConfig:
    n: int = 8
    C: int = 64
    r: int = 4
    sdgw_enabled: bool = True
    fbgw_enabled: bool = True
    position_embedding_enabled: bool = True
    channel_attention_substitute: bool = False
    shared_classifier: bool = False

    @classmethod
    def full(cls, n: int = 8, C: int = 64, r: int = 4) -> "ArchConfig":
        return cls(n=n, C=C, r=r)

    @classmethod
    def variant(cls, name: str, n: int = 8, C: int = 64, r: int = 4) -> "ArchConfig":
        if name not in VARIANTS:
            raise ConfigError(f"unknown architecture variant {name!r}, expected one of {sorted(VARIANTS)}")
        sdgw, fbgw, pe, ca = VARIANTS[name]
        return cls(n=n, C=C, r=r, sdgw_enabled=sdgw, fbgw_enabled=fbgw,
                   position_embedding_enabled=pe, channel_attention_substitute=ca)

    @property
    def branch_channels(self) -> int:
        return self.C // 2

    @property
    def hidden_channels(self) -> int:
        return self.branch_channels // self.r

    @property
    def uses_classifier(self) -> bool:
        return self.fbgw_enabled or self.channel_attention_substitute

    @property
    def uses_position_embedding(self) -> bool:
        return self.fbgw_enabled and self.position_embedding_enabled

    def validate(self) -> "ArchConfig":
        if self.n < 0:
            raise ConfigError(f"block count n must be >= 0, got {self.n}")
        if self.C < 2 or self.C % 2:
            raise ConfigError(f"channel count C must be even and >= 2, got {self.C}")
        if self.r < 1:
            raise ConfigError(f"reduction ratio r must be >= 1, got {self.r}")
        if self.uses_classifier and self.branch_channels % self.r:
            raise ConfigError(f"reduction ratio r={self.r} does not divide branch width {self.branch_channels}")
        if self.fbgw_enabled and self.channel_attention_substitute:
            raise ConfigError("channel_attention_substitute replaces FBGW; disable fbgw_enabled to use it")
        return self

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "C": self.C,
            "r": self.r,
            "flags": {
                "sdgw_enabled": self.sdgw_enabled,
                "fbgw_enabled": self.fbgw_enabled,
                "position_embedding_enabled": self.position_embedding_enabled,
                "channel_attention_substitute": self.channel_attention_substitute,
                "shared_classifier": self.shared_classifier,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ArchConfig":
        flat = {k: v for k, v in data.items() if k != "flags"}
        flat.update(data.get("flags", {}))
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(flat) - known)
        if unknown:
            raise ConfigError(f"unknown architecture keys: {', '.join(unknown)}")
        return cls(**flat).validate()


@dataclass(eq=False)
class ConvParams:
    kernel: Tensor
    bias: Tensor

    @property
    def in_channels(self) -> int:
        return self.kernel.shape[1]

    @property
    def out_channels(self) -> int:
        return self.kernel.shape[0]


@dataclass(eq=False)
class ClassifierParams:
    conv1: ConvParams
    conv2: ConvParams


@dataclass(eq=False)
class SdgwParams:
    feat_conv: ConvParams
    weight_conv: Optional[ConvParams] = None


@dataclass(eq=False)
class FbgwParams:
    """
    Band weighting module

    spectral=False is the channel-attention substitute: the same
    decouple/classify/recouple chain applied to the spatial feature.
    """
    decouple_conv: ConvParams
    cls_avg: ClassifierParams
    recouple_conv: ConvParams
    cls_max: Optional[ClassifierParams] = None
    spectral: bool = True

    @property
    def position_embedding(self) -> bool:
        return self.spectral and self.decouple_conv.in_channels == 2 * self.decouple_conv.out_channels + 2

    @property
    def max_classifier(self) -> ClassifierParams:
        return self.cls_avg if self.cls_max is None else self.cls_max


FrequencyModule = Union[FbgwParams, ConvParams]


@dataclass(eq=False)
class BlockParams:
    sdgw: List[SdgwParams]
    fbgw: List[FrequencyModule]
    fuse_conv: ConvParams


@dataclass(eq=False)
class ModelParams:
    head_conv: ConvParams
    blocks: List[BlockParams]
    tail_conv: ConvParams
    arch: ArchConfig = field(default_factory=ArchConfig)


def _walk(obj, prefix: str) -> Iterator[Tuple[str, Tensor]]:
    if isinstance(obj, Tensor):
        yield prefix, obj
    elif isinstance(obj, list):
        for i, item in enumerate(obj):
            yield from _walk(item, f"{prefix}.{i}")
    elif hasattr(obj, "__dataclass_fields__"):
        for f in fields(obj):
            value = getattr(obj, f.name)
            if value is None or isinstance(value, (ArchConfig, bool)):
                continue
            yield from _walk(value, f"{prefix}.{f.name}" if prefix else f.name)


def named_parameters(model: ModelParams) -> List[Tuple[str, Tensor]]:
    """Dotted parameter names in a fixed order, e.g. blocks.0.sdgw.1.feat_conv.kernel"""
    return list(_walk(model, ""))


def parameter_dict(model: ModelParams) -> Dict[str, Tensor]:
    return dict(named_parameters(model))


def parameter_count(model: ModelParams) -> int:
    return sum(t.size for _, t in named_parameters(model))


def _conv_count(cin: int, cout: int, k: int) -> int:
    return cin * cout * k * k + cout


def count_parameters(arch: ArchConfig) -> int:
    """Closed-form parameter count for an architecture"""
    arch.validate()
    c, cb, hid = arch.C, arch.branch_channels, arch.hidden_channels
    classifiers = 1 if arch.shared_classifier else 2
    classifier = _conv_count(cb, hid, 1) + _conv_count(hid, cb, 1)

    sdgw = _conv_count(cb, cb, 3) + (_conv_count(cb, cb, 1) if arch.sdgw_enabled else 0)
    if arch.fbgw_enabled:
        spectral_in = 2 * cb + (2 if arch.position_embedding_enabled else 0)
        freq = _conv_count(spectral_in, cb, 1) + classifiers * classifier + _conv_count(cb, 2 * cb, 1)
    elif arch.channel_attention_substitute:
        freq = _conv_count(cb, cb, 1) + classifiers * classifier + _conv_count(cb, cb, 1)
    else:
        freq = _conv_count(cb, cb, 3)
    block = 2 * sdgw + 2 * freq + _conv_count(c, c, 3)
    return _conv_count(1, c, 3) + arch.n * block + _conv_count(c, 1, 3)


def _map(obj, prefix: str, fn: Callable[[str, Tensor], Tensor]):
    if isinstance(obj, Tensor):
        return fn(prefix, obj)
    if isinstance(obj, list):
        return [_map(item, f"{prefix}.{i}", fn) for i, item in enumerate(obj)]
    if hasattr(obj, "__dataclass_fields__") and not isinstance(obj, ArchConfig):
        kwargs = {}
        for f in fields(obj):
            value = getattr(obj, f.name)
            if value is None or isinstance(value, (ArchConfig, bool)):
                kwargs[f.name] = value
            else:
                kwargs[f.name] = _map(value, f"{prefix}.{f.name}" if prefix else f.name, fn)
        return type(obj)(**kwargs)
    return obj


def map_parameters(model: ModelParams, fn: Callable[[str, Tensor], Tensor]) -> ModelParams:
    """New model with every parameter replaced by fn(name, tensor); same structure and arch"""
    return _map(model, "", fn)


def cast_model(model: ModelParams, dtype) -> ModelParams:
    """Copy of the model with parameters in dtype, e.g. a float64 shadow for gradient checks"""
    return map_parameters(model, lambda _, t: t.astype(dtype, requires_grad=True))
