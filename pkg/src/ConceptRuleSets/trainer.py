# trainer.py
"""
Random Binarization training of the MLLP and extraction of the discrete CRS.

Includes:
- `train`: Mini-batch gradient descent with per-epoch masks, gated gradients,
  weight clipping and step-decayed learning rate.
- `extract_crs`: Binarizes every weight with the threshold.
- `EpochRecord`, `write_training_log`: One CSV line per epoch.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Union
import logging

import numpy as np
import pandas as pd

# Logger Configuration
logger = logging.getLogger(__name__)

from .binarizer import BinarizedDataset, FeatureDictionary
from .crs_model import CrsModel, predict_batch
from .errors import DimensionError, NumericError
from .logic_layers import binarize_weights
from .metrics import macro_f1
from .mllp import MaskSet, MllpModel, backward, forward_batch, loss, sample_masks
from .train_attributes import TrainConfig
from .utils.seeding import derive_seed


@dataclass
class EpochRecord:
    epoch: int  # 1-based
    lr: float
    mean_loss: float
    crs_train_f1: Optional[float] = None


@dataclass
class StepRecord:
    """Handed to `on_step` after every optimizer update."""
    epoch: int
    batch: int
    before: List[np.ndarray]
    after: List[np.ndarray]
    masks: Optional[MaskSet]


def majority_class(data: BinarizedDataset) -> int:
    """Most frequent class, smallest index on ties."""
    return int(np.argmax(data.labels.sum(axis=0)))


def extract_crs(model: MllpModel, threshold: Optional[float] = None,
                dictionary: Optional[FeatureDictionary] = None,
                fallback_class: int = 0, label_order: Optional[List[str]] = None) -> CrsModel:
    """Replaces every weight by I(w > threshold), layer order and kinds preserved."""
    threshold = model.config.threshold if threshold is None else threshold
    layers = [binarize_weights(layer.values, threshold) for layer in model.layers]
    return CrsModel(layers, dictionary=dictionary, fallback_class=fallback_class,
                    label_order=list(label_order or []))


def _layer_norms(model: MllpModel) -> str:
    return ", ".join(f"W{layer.index}={np.linalg.norm(layer.values):.4g}" for layer in model.layers)


def train(model: MllpModel, data: BinarizedDataset, config: Optional[TrainConfig] = None,
          history: Optional[List[EpochRecord]] = None,
          on_step: Optional[Callable[[StepRecord], None]] = None,
          log_crs: bool = False) -> MllpModel:
    """
    Trains a copy of `model` and returns it.

    Each epoch draws fresh masks with rate P and reshuffles the rows; every
    mini-batch runs forward with the partly binarized weights, updates the
    continuous master weights (masked entries get zero gradient) and clips them
    back into [0, 1].
    """
    config = config or model.config
    if data.n_features != model.n_features or data.n_classes != model.n_classes:
        raise DimensionError(f"data is {data.n_features} -> {data.n_classes}, "
                             f"model is {model.n_features} -> {model.n_classes}")

    model = MllpModel([layer.copy() for layer in model.layers], config)
    rng = np.random.default_rng(derive_seed(config.seed, 1))
    features = data.features.astype(np.float64)
    labels = data.labels.astype(np.float64)
    velocity = [np.zeros_like(layer.values) for layer in model.layers]

    for epoch in range(config.epochs):
        lr = config.lr_at(epoch)
        masks = sample_masks(model, config.rb_rate, rng, epoch) if config.rb_rate > 0 else None
        order = rng.permutation(data.n)
        total_loss = 0.0

        for batch, start in enumerate(range(0, data.n, config.batch_size)):
            rows = order[start:start + config.batch_size]
            result = forward_batch(model, features[rows], masks)
            batch_loss = loss(result.output, labels[rows], model, config.weight_decay)
            if not np.isfinite(batch_loss):
                raise NumericError(f"non-finite loss {batch_loss} at epoch {epoch + 1}, batch {batch}; "
                                   f"layer norms: {_layer_norms(model)}")
            grads = backward(model, result, labels[rows], masks, config.weight_decay)

            before = [layer.values.copy() for layer in model.layers] if on_step else None
            for position, (layer, grad) in enumerate(zip(model.layers, grads)):
                step = grad
                if config.momentum:
                    velocity[position] = config.momentum * velocity[position] + grad
                    step = velocity[position]
                    if masks is not None:
                        step = np.where(masks.masks[position] == 1, 0.0, step)
                layer.values -= lr * step
                np.clip(layer.values, 0.0, 1.0, out=layer.values)
            if on_step:
                on_step(StepRecord(epoch, batch, before, [layer.values.copy() for layer in model.layers], masks))

            total_loss += batch_loss * len(rows)

        record = EpochRecord(epoch + 1, lr, total_loss / data.n)
        if log_crs:
            crs = extract_crs(model, fallback_class=majority_class(data))
            record.crs_train_f1 = macro_f1(predict_batch(crs, data.features), data.label_ids, data.n_classes)
        logger.debug(f"🔹 epoch {record.epoch}: lr={lr:.3g} loss={record.mean_loss:.6f}"
                     + (f" crs_f1={record.crs_train_f1:.4f}" if log_crs else ""))
        if history is not None:
            history.append(record)

    logger.info(f"✅ Trained {config.epochs} epochs (P={config.rb_rate}) on {data.n} rows")
    return model


def write_training_log(history: List[EpochRecord], file_path: Union[str, Path]) -> Path:
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([record.__dict__ for record in history],
                         columns=["epoch", "lr", "mean_loss", "crs_train_f1"])
    if frame["crs_train_f1"].isna().all():
        frame = frame.drop(columns=["crs_train_f1"])
    frame.to_csv(file_path, index=False)
    logger.info(f"✅ Training log saved to {file_path}")
    return file_path
