# metrics.py

from typing import Sequence

import numpy as np
from sklearn.metrics import f1_score

from .errors import DimensionError


def macro_f1(predictions: Sequence[int], truths: Sequence[int], n_classes: int) -> float:
    """Unweighted mean of per-class F1 over 0..C-1; a class with precision + recall = 0 scores 0."""
    predictions = np.asarray(predictions, dtype=int)
    truths = np.asarray(truths, dtype=int)
    if predictions.shape != truths.shape:
        raise DimensionError(f"{len(predictions)} predictions vs {len(truths)} truths")
    if predictions.size == 0:
        return 0.0
    return float(f1_score(truths, predictions, labels=list(range(n_classes)), average="macro", zero_division=0))
