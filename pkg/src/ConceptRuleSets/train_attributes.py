# train_attributes.py
"""
Defines the configurable parameter structure used for MLLP training.

Includes:
- `TrainConfig`: Layer widths, optimizer schedule, random binarization rate and threshold.
- `default_hidden_width`, `build_layer_widths`: Width heuristics from the binary feature count.
"""


from dataclasses import dataclass, fields
from typing import Any, Dict, List, Optional

import logging

# Logger Configuration
logger = logging.getLogger(__name__)

from .crs_core import TrainDefaults
from .errors import ConfigError


def default_hidden_width(n_features: int) -> int:
    """Next power of two >= 2J, clamped to the [32, 256] range."""
    width = 1
    while width < 2 * n_features:
        width *= 2
    return max(TrainDefaults.MIN_HIDDEN, min(TrainDefaults.MAX_HIDDEN, width))


def build_layer_widths(n_features: int, n_classes: int,
                       logical_layers: int = TrainDefaults.LOGICAL_LAYERS,
                       hidden: Optional[List[int]] = None) -> List[int]:
    """[J, n_1, ..., n_{2L-1}, C]; `hidden` may give one width for all or one per middle layer."""
    if logical_layers < 2 or logical_layers % 2:
        raise ConfigError(f"The number of logical layers must be even and >= 2, got {logical_layers}")
    n_middle = logical_layers - 1
    if not hidden:
        hidden = [default_hidden_width(n_features)] * n_middle
    elif len(hidden) == 1:
        hidden = list(hidden) * n_middle
    elif len(hidden) != n_middle:
        raise ConfigError(f"{len(hidden)} hidden widths given for {n_middle} middle layers")
    return [n_features, *hidden, n_classes]


@dataclass
class TrainConfig:
    layer_widths: List[int]
    epochs: int = TrainDefaults.EPOCHS
    batch_size: int = TrainDefaults.BATCH_SIZE
    lr: float = TrainDefaults.LR
    lr_decay_factor: float = TrainDefaults.LR_DECAY_FACTOR
    lr_decay_every: int = TrainDefaults.LR_DECAY_EVERY
    weight_decay: float = TrainDefaults.WEIGHT_DECAY
    rb_rate: float = TrainDefaults.RB_RATE
    threshold: float = TrainDefaults.THRESHOLD
    momentum: float = TrainDefaults.MOMENTUM
    seed: int = TrainDefaults.SEED

    def __post_init__(self):
        """Validate inputs, ensuring they meet expected constraints."""
        self.layer_widths = [int(w) for w in self.layer_widths]
        if len(self.layer_widths) < 3 or len(self.layer_widths) % 2 == 0:
            raise ConfigError(f"layer_widths needs an odd count >= 3 (input + 2L layers), got {self.layer_widths}")
        if any(w < 1 for w in self.layer_widths):
            raise ConfigError(f"every width must be >= 1, got {self.layer_widths}")
        if self.epochs < 0:
            raise ConfigError("epochs must be >= 0.")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1.")
        if self.lr <= 0:
            raise ConfigError("lr must be positive.")
        if not 0 < self.lr_decay_factor <= 1:
            raise ConfigError("lr_decay_factor must be in (0, 1].")
        if self.lr_decay_every < 1:
            raise ConfigError("lr_decay_every must be >= 1.")
        if self.weight_decay < 0:
            raise ConfigError("weight_decay must be >= 0.")
        if not 0 <= self.rb_rate <= 1:
            raise ConfigError("rb_rate must be between 0 and 1.")
        if not 0 < self.threshold < 1:
            raise ConfigError("threshold must be in (0, 1).")
        if not 0 <= self.momentum < 1:
            raise ConfigError("momentum must be in [0, 1).")

    @property
    def logical_layers(self) -> int:
        return len(self.layer_widths) - 1

    def lr_at(self, epoch: int) -> float:
        """Step-decayed learning rate for a 0-based epoch."""
        return self.lr * self.lr_decay_factor ** (epoch // self.lr_decay_every)

    def replace(self, **changes) -> "TrainConfig":
        values = self.to_dict()
        values.update(changes)
        return TrainConfig(**values)

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: (list(getattr(self, f.name)) if f.name == "layer_widths" else getattr(self, f.name))
                for f in fields(self)}

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "TrainConfig":
        known = {f.name for f in fields(TrainConfig)}
        unknown = set(data) - known
        if unknown:
            logger.warning(f"Unknown keys in training config: {unknown}")
        return TrainConfig(**{k: v for k, v in data.items() if k in known})
