# conftest.py

import itertools

import numpy as np
import pandas as pd
import pytest

from ConceptRuleSets.binarizer import BinarizedDataset, FeatureCondition, FeatureDictionary
from ConceptRuleSets.crs_model import CrsModel
from ConceptRuleSets.data_loader import dataset_from_frame
from ConceptRuleSets.logic_layers import LayerKind, WeightMatrix
from ConceptRuleSets.mllp import MllpModel
from ConceptRuleSets.train_attributes import TrainConfig

TIC_TAC_TOE_LINES = [
    (0, 1, 2), (3, 4, 5), (6, 7, 8),
    (0, 3, 6), (1, 4, 7), (2, 5, 8),
    (0, 4, 8), (2, 4, 6),
]
CELLS = ["top-left", "top-middle", "top-right", "middle-left", "middle-middle",
         "middle-right", "bottom-left", "bottom-middle", "bottom-right"]


def tic_tac_toe_frame(n_rows: int = 300, seed: int = 0) -> pd.DataFrame:
    """Random boards over {x, o, b}; positive when x owns a full line."""
    rng = np.random.default_rng(seed)
    boards = rng.choice(["x", "o", "b"], size=(n_rows, 9))
    wins = [any(all(board[i] == "x" for i in line) for line in TIC_TAC_TOE_LINES) for board in boards]
    frame = pd.DataFrame(boards, columns=CELLS)
    frame["class"] = np.where(wins, "positive", "negative")
    return frame


def all_binary_inputs(n_features: int) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=n_features)), dtype=np.uint8)


def plain_dictionary(n_features: int) -> FeatureDictionary:
    return FeatureDictionary([FeatureCondition(j, f"x{j}", f"x{j}", "equals", category="1")
                              for j in range(n_features)])


def model_from_layers(layers, **config) -> MllpModel:
    """An MLLP holding the given weight matrices as-is."""
    widths = [layers[0].shape[1], *(w.shape[0] for w in layers)]
    weights = [WeightMatrix(np.asarray(w, dtype=float), LayerKind.for_layer(l), l)
               for l, w in enumerate(layers, start=1)]
    return MllpModel(weights, TrainConfig(widths, **config))


def random_crs(rng: np.random.Generator, widths, density: float = 0.4) -> CrsModel:
    layers = [(rng.uniform(size=(widths[l], widths[l - 1])) < density).astype(np.uint8)
              for l in range(1, len(widths))]
    return CrsModel(layers)


@pytest.fixture
def tic_tac_toe():
    return dataset_from_frame(tic_tac_toe_frame(), "class")


@pytest.fixture
def continuous_frame():
    """Two informative continuous columns and one categorical column, three classes."""
    rng = np.random.default_rng(7)
    n = 90
    labels = np.repeat(["low", "mid", "high"], n // 3)
    centers = {"low": 1.0, "mid": 5.0, "high": 9.0}
    return pd.DataFrame({
        "alcohol": [centers[c] + rng.uniform(-1, 1) for c in labels],
        "hue": [centers[c] * 2 + rng.uniform(-1, 1) for c in labels],
        "region": rng.choice(["north", "south"], size=n),
        "class": labels,
    })


@pytest.fixture
def xor_data() -> BinarizedDataset:
    """XOR of two Boolean columns, one-hot encoded as [a=0, a=1, b=0, b=1]."""
    rows = []
    labels = []
    for a, b in itertools.product((0, 1), repeat=2):
        rows.append([1 - a, a, 1 - b, b])
        labels.append([1, 0] if a == b else [0, 1])
    features = np.tile(np.array(rows, dtype=np.uint8), (8, 1))
    one_hot = np.tile(np.array(labels, dtype=np.uint8), (8, 1))
    entries = [FeatureCondition(0, "a", "a = 0", "equals", category="0"),
               FeatureCondition(1, "a", "a = 1", "equals", category="1"),
               FeatureCondition(2, "b", "b = 0", "equals", category="0"),
               FeatureCondition(3, "b", "b = 1", "equals", category="1")]
    return BinarizedDataset(features, one_hot, FeatureDictionary(entries), ["same", "different"])
