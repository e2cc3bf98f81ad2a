"""
Training configuration and presets
"""

from dataclasses import asdict, dataclass, field, fields
from typing import Optional

from ..model import ArchConfig
from ..utils.errors import ConfigError

PRESETS = ("paper", "desk")


@dataclass
class TrainConfig:
    epochs: int = 100
    lr: float = 2e-4
    batch_size: int = 6
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    arch: ArchConfig = field(default_factory=ArchConfig)
    dataset: Optional[str] = None
    val_dataset: Optional[str] = None
    out_dir: Optional[str] = None
    seed: int = 0
    checkpoint_every: int = 0
    eval_every: int = 0
    clip_grad_norm: Optional[float] = None
    train_pairs: int = 1000
    progress: bool = False

    @classmethod
    def full_scale(cls, **overrides) -> "TrainConfig":
        """100 epochs, lr 2e-4, batch 6, n=8, C=64 on 1000 pairs"""
        cfg = cls(arch=ArchConfig.full(n=8, C=64))
        return cfg.replace(**overrides)

    @classmethod
    def desk(cls, **overrides) -> "TrainConfig":
        """Reduced recipe for a desktop CPU: 64x64 images, n=2, C=16, 200 pairs, 20 epochs"""
        cfg = cls(epochs=20, lr=1e-3, batch_size=4, arch=ArchConfig.full(n=2, C=16), train_pairs=200)
        return cfg.replace(**overrides)

    @classmethod
    def preset(cls, name: str, **overrides) -> "TrainConfig":
        if name == "paper":
            return cls.full_scale(**overrides)
        if name == "desk":
            return cls.desk(**overrides)
        raise ConfigError(f"unknown training preset {name!r}, expected one of {PRESETS}")

    def replace(self, **overrides) -> "TrainConfig":
        known = {f.name for f in fields(self)}
        for key, value in overrides.items():
            if key not in known:
                raise ConfigError(f"unknown training option {key!r}")
            setattr(self, key, value)
        return self

    def validate(self) -> "TrainConfig":
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.lr < 0:
            raise ConfigError(f"learning rate must be >= 0, got {self.lr}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError(f"Adam betas must lie in [0, 1), got {self.beta1}, {self.beta2}")
        if self.adam_eps <= 0:
            raise ConfigError(f"adam_eps must be > 0, got {self.adam_eps}")
        if self.checkpoint_every < 0 or self.eval_every < 0:
            raise ConfigError("checkpoint_every and eval_every must be >= 0")
        if self.clip_grad_norm is not None and self.clip_grad_norm <= 0:
            raise ConfigError(f"clip_grad_norm must be > 0 when set, got {self.clip_grad_norm}")
        if self.train_pairs < 0:
            raise ConfigError(f"train_pairs must be >= 0, got {self.train_pairs}")
        self.arch.validate()
        return self

    def to_dict(self) -> dict:
        data = asdict(self)
        data["arch"] = self.arch.to_dict()
        return data
