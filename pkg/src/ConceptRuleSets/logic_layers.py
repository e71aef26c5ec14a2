# logic_layers.py
"""
Differentiable conjunction and disjunction primitives.

Includes:
- `LayerKind`, `WeightMatrix`: Continuous selector weights of one logical layer.
- `conj_forward`, `disj_forward` and their `*_backward` gradients for a single node.
- `conj_layer_forward`, `disj_layer_forward`, `*_layer_backward`: Batched versions used by training.
- `clip_weights`, `binarize_weight`, `binarize_weights`.

With binary inputs and weights, Conj is the AND over selected inputs and
Disj the OR; an all-zero weight row gives 1 (AND) and 0 (OR).
"""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union
import logging

import numpy as np

# Logger Configuration
logger = logging.getLogger(__name__)

from .errors import ConfigError, DimensionError

# Factors at or below this are excluded by re-multiplication instead of division.
EXCLUSION_FLOOR = 1e-12

# Activations of one layer, entries in [0, 1].
ActivationVector = np.ndarray


class LayerKind(str, Enum):
    CONJUNCTION = "conjunction"
    DISJUNCTION = "disjunction"

    @staticmethod
    def for_layer(index: int) -> "LayerKind":
        """Odd logical layers are conjunctions, even ones disjunctions."""
        return LayerKind.CONJUNCTION if index % 2 == 1 else LayerKind.DISJUNCTION


@dataclass
class WeightMatrix:
    values: np.ndarray  # n_l x n_{l-1}
    kind: LayerKind
    index: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.kind = LayerKind(self.kind)
        if self.values.ndim != 2:
            raise DimensionError(f"Layer {self.index} weights must be 2-D, got shape {self.values.shape}")
        if self.index < 1:
            raise ConfigError(f"Logical layers are numbered from 1, got {self.index}")
        if self.kind != LayerKind.for_layer(self.index):
            raise ConfigError(f"Layer {self.index} must be a {LayerKind.for_layer(self.index).value} layer")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def copy(self) -> "WeightMatrix":
        return WeightMatrix(self.values.copy(), self.kind, self.index)


def _check_operands(h: np.ndarray, w: np.ndarray):
    if h.ndim != 2 or w.ndim != 2 or h.shape[1] != w.shape[1]:
        raise DimensionError(f"inputs {h.shape} do not match weights {w.shape}")


def exclusive_products(factors: np.ndarray) -> np.ndarray:
    """Product over the last axis of every factor except the j-th, for each j."""
    total = np.prod(factors, axis=-1, keepdims=True)
    safe = factors > EXCLUSION_FLOOR
    divided = total / np.where(safe, factors, 1.0)
    if safe.all():
        return divided

    ones = np.ones_like(factors[..., :1])
    prefix = np.cumprod(np.concatenate([ones, factors[..., :-1]], axis=-1), axis=-1)
    suffix = np.cumprod(np.concatenate([ones, factors[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    return np.where(safe, divided, prefix * suffix)


def conj_layer_forward(h: np.ndarray, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Conj for a batch: h is B x n, w is m x n.

    Returns the B x m outputs and the B x m x n factors F_c = 1 - w(1 - h)
    kept for the backward pass.
    """
    _check_operands(h, w)
    factors = 1.0 - w[None, :, :] * (1.0 - h[:, None, :])
    return np.prod(factors, axis=-1), factors


def disj_layer_forward(h: np.ndarray, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Disj for a batch; factors are 1 - F_d = 1 - h*w."""
    _check_operands(h, w)
    factors = 1.0 - h[:, None, :] * w[None, :, :]
    return 1.0 - np.prod(factors, axis=-1), factors


def conj_layer_backward(h: np.ndarray, w: np.ndarray, factors: np.ndarray,
                        upstream: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Gradients (m x n for w, B x n for h) of sum(upstream * Conj(h, w))."""
    others = exclusive_products(factors)
    grad_w = np.einsum("bi,bij->ij", upstream, others * (h[:, None, :] - 1.0))
    grad_h = np.einsum("bi,bij->bj", upstream, others * w[None, :, :])
    return grad_w, grad_h


def disj_layer_backward(h: np.ndarray, w: np.ndarray, factors: np.ndarray,
                        upstream: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Gradients (m x n for w, B x n for h) of sum(upstream * Disj(h, w))."""
    others = exclusive_products(factors)
    grad_w = np.einsum("bi,bij->ij", upstream, others * h[:, None, :])
    grad_h = np.einsum("bi,bij->bj", upstream, others * w[None, :, :])
    return grad_w, grad_h


def _as_row(vector) -> np.ndarray:
    return np.asarray(vector, dtype=np.float64).reshape(1, -1)


def _check_lengths(h, w_row):
    if np.ndim(h) != 1 or np.ndim(w_row) != 1 or len(h) != len(w_row):
        raise DimensionError(f"h has length {np.shape(h)}, weight row {np.shape(w_row)}")


def conj_forward(h: ActivationVector, w_row: np.ndarray) -> float:
    """prod_j (1 - w_j (1 - h_j))"""
    _check_lengths(h, w_row)
    out, _ = conj_layer_forward(_as_row(h), _as_row(w_row))
    return float(out[0, 0])


def disj_forward(h: ActivationVector, w_row: np.ndarray) -> float:
    """1 - prod_j (1 - h_j w_j)"""
    _check_lengths(h, w_row)
    out, _ = disj_layer_forward(_as_row(h), _as_row(w_row))
    return float(out[0, 0])


def conj_backward(h: ActivationVector, w_row: np.ndarray,
                  upstream: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    _check_lengths(h, w_row)
    h, w = _as_row(h), _as_row(w_row)
    _, factors = conj_layer_forward(h, w)
    grad_w, grad_h = conj_layer_backward(h, w, factors, np.array([[float(upstream)]]))
    return grad_w[0], grad_h[0]


def disj_backward(h: ActivationVector, w_row: np.ndarray,
                  upstream: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    _check_lengths(h, w_row)
    h, w = _as_row(h), _as_row(w_row)
    _, factors = disj_layer_forward(h, w)
    grad_w, grad_h = disj_layer_backward(h, w, factors, np.array([[float(upstream)]]))
    return grad_w[0], grad_h[0]


def clip_weights(weights: Union[WeightMatrix, np.ndarray]) -> Union[WeightMatrix, np.ndarray]:
    """max(0, min(1, w)) entrywise; returns a new object of the same type."""
    if isinstance(weights, WeightMatrix):
        return WeightMatrix(np.clip(weights.values, 0.0, 1.0), weights.kind, weights.index)
    return np.clip(np.asarray(weights, dtype=np.float64), 0.0, 1.0)


def _check_threshold(threshold: float):
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"threshold must lie in (0, 1), got {threshold}")


def binarize_weight(w: float, threshold: float) -> int:
    """1 iff w > threshold (strict)."""
    _check_threshold(threshold)
    return int(w > threshold)


def binarize_weights(values: np.ndarray, threshold: float) -> np.ndarray:
    _check_threshold(threshold)
    return (np.asarray(values) > threshold).astype(np.uint8)
