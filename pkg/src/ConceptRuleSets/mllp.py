# mllp.py
"""
The Multilayer Logical Perceptron: the continuous relaxation of a Concept Rule Set.

Includes:
- `MllpModel`: Alternating conjunction / disjunction weight matrices in [0, 1].
- `init_model`: Uniform(0, 0.1) initialization from a seeded generator.
- `MaskSet`, `sample_masks`, `effective_weights`: Random binarization of a weight subset.
- `forward`, `forward_batch`, `backward`: Layer-wise evaluation and gradients.
- `loss`: Per-instance MSE against one-hot labels plus L2 on the weights.
"""

from dataclasses import dataclass, field
from typing import List, Optional
import logging

import numpy as np

# Logger Configuration
logger = logging.getLogger(__name__)

from .crs_core import TrainDefaults
from .errors import ConfigError, DimensionError
from .logic_layers import (
    LayerKind,
    WeightMatrix,
    binarize_weights,
    conj_layer_backward,
    conj_layer_forward,
    disj_layer_backward,
    disj_layer_forward,
)
from .train_attributes import TrainConfig


@dataclass
class MllpModel:
    layers: List[WeightMatrix]
    config: TrainConfig

    def __post_init__(self):
        if not self.layers:
            raise ConfigError("An MLLP needs at least one logical layer pair")
        for position, layer in enumerate(self.layers, start=1):
            if layer.index != position:
                raise ConfigError(f"Layer at position {position} is numbered {layer.index}")
        for previous, current in zip(self.layers, self.layers[1:]):
            if current.shape[1] != previous.shape[0]:
                raise DimensionError(f"Layer {current.index} expects {current.shape[1]} inputs, "
                                     f"layer {previous.index} has {previous.shape[0]} nodes")
        if self.widths != self.config.layer_widths:
            raise DimensionError(f"Weights give widths {self.widths}, config says {self.config.layer_widths}")

    @property
    def widths(self) -> List[int]:
        return [self.layers[0].shape[1], *(layer.shape[0] for layer in self.layers)]

    @property
    def n_features(self) -> int:
        return self.widths[0]

    @property
    def n_classes(self) -> int:
        return self.widths[-1]

    def weight_values(self) -> List[np.ndarray]:
        return [layer.values for layer in self.layers]

    def copy(self) -> "MllpModel":
        return MllpModel([layer.copy() for layer in self.layers], self.config.replace())


@dataclass
class MaskSet:
    masks: List[np.ndarray]
    rb_rate: float
    epoch: int = 0

    def __post_init__(self):
        for mask in self.masks:
            if not np.isin(mask, (0, 1)).all():
                raise ConfigError("Mask entries must be 0 or 1")

    @staticmethod
    def empty(model: MllpModel) -> "MaskSet":
        return MaskSet([np.zeros(layer.shape, dtype=np.uint8) for layer in model.layers], rb_rate=0.0)


@dataclass
class ForwardPass:
    """Everything `backward` needs from one batched forward evaluation."""
    activations: List[np.ndarray]  # h^(0) .. h^(2L), each B x n_l
    factors: List[np.ndarray] = field(default_factory=list)  # per logical layer, B x n_l x n_{l-1}
    weights: List[np.ndarray] = field(default_factory=list)  # effective weights per logical layer

    @property
    def output(self) -> np.ndarray:
        return self.activations[-1]


def init_model(config: TrainConfig) -> MllpModel:
    """Every weight i.i.d. Uniform(0, 0.1) from a generator seeded with `config.seed`."""
    rng = np.random.default_rng(config.seed)
    widths = config.layer_widths
    layers = [
        WeightMatrix(
            rng.uniform(0.0, TrainDefaults.INIT_HIGH, size=(widths[l], widths[l - 1])),
            LayerKind.for_layer(l),
            l,
        )
        for l in range(1, len(widths))
    ]
    logger.debug(f"🔹 Initialized MLLP with widths {widths}")
    return MllpModel(layers, config)


def sample_masks(model: MllpModel, rb_rate: float, rng: np.random.Generator, epoch: int = 0) -> MaskSet:
    """Each entry independently 1 with probability `rb_rate` (M = I(p < P), p ~ U(0, 1))."""
    if not 0.0 <= rb_rate <= 1.0:
        raise ConfigError(f"rb_rate must be in [0, 1], got {rb_rate}")
    masks = [(rng.uniform(size=layer.shape) < rb_rate).astype(np.uint8) for layer in model.layers]
    return MaskSet(masks, rb_rate, epoch)


def effective_weights(values: np.ndarray, mask: np.ndarray, threshold: float) -> np.ndarray:
    """Binarized where the mask is 1, the continuous value where it is 0."""
    values = np.asarray(values, dtype=np.float64)
    mask = np.asarray(mask)
    if values.shape != mask.shape:
        raise DimensionError(f"weights {values.shape} and mask {mask.shape} differ")
    return np.where(mask == 1, binarize_weights(values, threshold).astype(np.float64), values)


def forward_batch(model: MllpModel, features: np.ndarray, masks: Optional[MaskSet] = None) -> ForwardPass:
    """Evaluates the MLLP on a B x J batch with the (optionally masked) weights."""
    h = np.asarray(features, dtype=np.float64)
    if h.ndim != 2 or h.shape[1] != model.n_features:
        raise DimensionError(f"expected a batch with {model.n_features} features, got shape {h.shape}")

    result = ForwardPass(activations=[h])
    for position, layer in enumerate(model.layers):
        w = layer.values
        if masks is not None:
            w = effective_weights(w, masks.masks[position], model.config.threshold)
        if layer.kind == LayerKind.CONJUNCTION:
            h, factors = conj_layer_forward(h, w)
        else:
            h, factors = disj_layer_forward(h, w)
        result.activations.append(h)
        result.factors.append(factors)
        result.weights.append(w)
    return result


def forward(model: MllpModel, masks: Optional[MaskSet], x: np.ndarray) -> np.ndarray:
    """Output vector (length C) for one binary input vector of length J."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or len(x) != model.n_features:
        raise DimensionError(f"expected {model.n_features} features, got shape {x.shape}")
    return forward_batch(model, x[None, :], masks).output[0]


def loss(outputs: np.ndarray, labels: np.ndarray, model: MllpModel, weight_decay: float) -> float:
    """Batch mean of per-instance MSE plus weight_decay * sum of squared weights."""
    outputs = np.asarray(outputs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if outputs.shape != labels.shape:
        raise DimensionError(f"outputs {outputs.shape} and labels {labels.shape} differ")
    mse = float(np.mean((outputs - labels) ** 2))
    penalty = sum(float(np.sum(w ** 2)) for w in model.weight_values())
    return mse + weight_decay * penalty


def backward(model: MllpModel, result: ForwardPass, labels: np.ndarray,
             masks: Optional[MaskSet], weight_decay: float) -> List[np.ndarray]:
    """
    Gradient of `loss` with respect to every master weight.

    Both the data term and the L2 term are multiplied by (1 - M), so
    binarized entries receive exactly zero gradient.
    """
    outputs = result.output
    labels = np.asarray(labels, dtype=np.float64)
    upstream = 2.0 * (outputs - labels) / outputs.size

    grads: List[Optional[np.ndarray]] = [None] * len(model.layers)
    for position in reversed(range(len(model.layers))):
        layer = model.layers[position]
        h = result.activations[position]
        w = result.weights[position]
        factors = result.factors[position]
        if layer.kind == LayerKind.CONJUNCTION:
            grad_w, upstream = conj_layer_backward(h, w, factors, upstream)
        else:
            grad_w, upstream = disj_layer_backward(h, w, factors, upstream)

        grad_w = grad_w + 2.0 * weight_decay * layer.values
        if masks is not None:
            grad_w = np.where(masks.masks[position] == 1, 0.0, grad_w)
        grads[position] = grad_w
    return grads


def predict_argmax(model: MllpModel, features: np.ndarray) -> np.ndarray:
    """MLLP class decisions: argmax of the unmasked output, first index on ties."""
    return forward_batch(model, features).output.argmax(axis=1)
