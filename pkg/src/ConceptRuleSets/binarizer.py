# binarizer.py
"""
Turns typed tabular data into binary feature vectors and one-hot labels.

Includes:
- `entropy`, `mdlp_cuts`: Recursive minimal-entropy partitioning with the MDL stop.
- `Discretizer`, `fit_discretizer`: Cut points, category lists and label order fitted on data.
- `FeatureCondition`, `FeatureDictionary`: Human-readable meaning of every binary column.
- `BinarizedDataset`, `binarize`: The N x J feature matrix and N x C label matrix.
"""

from dataclasses import dataclass, field
import math
from typing import Any, Dict, List, Optional, Sequence
import logging

import numpy as np
import pandas as pd
from scipy.stats import entropy as shannon_entropy

# Logger Configuration
logger = logging.getLogger(__name__)

from .data_loader import RawDataset
from .errors import ConfigError, DataError, DimensionError

# Weighted entropies closer than this are treated as a tie.
TIE_TOLERANCE = 1e-12


def entropy(labels: Sequence) -> float:
    """Shannon entropy (bits) of the empirical class distribution."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise DataError("empty partition")
    _, counts = np.unique(labels, return_counts=True)
    return float(shannon_entropy(counts, base=2))


def _best_cut(values: np.ndarray, classes: np.ndarray, n_classes: int) -> Optional[tuple]:
    """Lowest weighted-entropy boundary split of a sorted segment, or None."""
    distinct, group_of = np.unique(values, return_inverse=True)
    if len(distinct) < 2:
        return None

    group_counts = np.zeros((len(distinct), n_classes), dtype=np.int64)
    np.add.at(group_counts, (group_of, classes), 1)

    # Adjacent groups that are both pure in the same class are not boundaries.
    pure = (group_counts > 0).sum(axis=1) == 1
    majority = group_counts.argmax(axis=1)
    same_pure = pure[:-1] & pure[1:] & (majority[:-1] == majority[1:])
    candidates = np.flatnonzero(~same_pure)
    if candidates.size == 0:
        return None

    cumulative = np.cumsum(group_counts, axis=0)
    left = cumulative[candidates]
    right = cumulative[-1] - left
    n_left = left.sum(axis=1)
    n_right = right.sum(axis=1)
    n_total = len(values)

    weighted = (n_left * shannon_entropy(left.T, base=2) + n_right * shannon_entropy(right.T, base=2)) / n_total
    best = int(np.flatnonzero(weighted <= weighted.min() + TIE_TOLERANCE)[0])
    g = candidates[best]
    cut = (distinct[g] + distinct[g + 1]) / 2.0
    split_at = int(n_left[best])
    return cut, split_at, float(weighted[best])


def _accept_cut(classes: np.ndarray, split_at: int, weighted: float) -> bool:
    """MDL acceptance test for splitting `classes` at `split_at`."""
    n = len(classes)
    left, right = classes[:split_at], classes[split_at:]
    ent = entropy(classes)
    ent_left, ent_right = entropy(left), entropy(right)
    k, k1, k2 = len(np.unique(classes)), len(np.unique(left)), len(np.unique(right))

    gain = ent - weighted
    delta = math.log2(3.0 ** k - 2) - (k * ent - k1 * ent_left - k2 * ent_right)
    return gain > (math.log2(n - 1) + delta) / n


def mdlp_cuts(values: Sequence[float], labels: Sequence) -> List[float]:
    """
    Fayyad-Irani recursive binary partitioning of one continuous column.

    Candidate cuts are midpoints between adjacent distinct values at class
    boundaries; a cut is kept only when its information gain passes the MDL
    criterion, then both halves are partitioned again.
    """
    values = np.asarray(values, dtype=float)
    labels = np.asarray(labels)
    if values.shape != labels.shape:
        raise DimensionError(f"values and labels differ in length: {values.shape} vs {labels.shape}")
    if values.size < 2:
        return []

    order = np.argsort(values, kind="stable")
    values = values[order]
    _, classes = np.unique(labels[order], return_inverse=True)
    n_classes = int(classes.max()) + 1

    cuts = []
    segments = [(0, len(values))]
    while segments:
        start, end = segments.pop()
        if end - start < 2:
            continue
        seg_classes = classes[start:end]
        found = _best_cut(values[start:end], seg_classes, n_classes)
        if found is None:
            continue
        cut, split_at, weighted = found
        if not _accept_cut(seg_classes, split_at, weighted):
            continue
        cuts.append(float(cut))
        segments.append((start, start + split_at))
        segments.append((start + split_at, end))

    return sorted(cuts)


def _format_number(value: float) -> str:
    return f"{value:.6g}"


@dataclass(frozen=True)
class FeatureCondition:
    index: int
    column: str
    text: str
    kind: str  # "interval" or "equals"
    low: Optional[float] = None  # None = unbounded
    high: Optional[float] = None
    category: Optional[str] = None

    def holds(self, value: Any) -> bool:
        """Evaluates the condition against one raw column value."""
        if self.kind == "equals":
            return str(value) == self.category
        value = float(value)
        above = self.low is None or value >= self.low
        below = self.high is None or value < self.high
        return above and below

    def to_dict(self) -> Dict[str, Any]:
        return {k: v for k, v in self.__dict__.items() if v is not None}

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "FeatureCondition":
        return FeatureCondition(
            index=int(data["index"]),
            column=data["column"],
            text=data["text"],
            kind=data["kind"],
            low=data.get("low"),
            high=data.get("high"),
            category=data.get("category"),
        )


@dataclass
class FeatureDictionary:
    entries: List[FeatureCondition] = field(default_factory=list)
    dropped: List[str] = field(default_factory=list)

    def __post_init__(self):
        indices = [e.index for e in self.entries]
        if indices != list(range(len(indices))):
            raise ConfigError("Feature dictionary indices must run 0..J-1 without gaps")

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: int) -> FeatureCondition:
        return self.entries[index]

    def groups(self) -> Dict[str, List[int]]:
        """Source column -> indices of the binary features derived from it."""
        result: Dict[str, List[int]] = {}
        for entry in self.entries:
            result.setdefault(entry.column, []).append(entry.index)
        return result

    def to_dict(self) -> Dict[str, Any]:
        return {"entries": [e.to_dict() for e in self.entries], "dropped": list(self.dropped)}

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "FeatureDictionary":
        return FeatureDictionary(
            entries=[FeatureCondition.from_dict(e) for e in data.get("entries", [])],
            dropped=list(data.get("dropped", [])),
        )


@dataclass
class Discretizer:
    columns: List[str]
    kinds: Dict[str, str]
    label_column: str
    label_order: List[str]
    cuts: Dict[str, List[float]] = field(default_factory=dict)
    categories: Dict[str, List[str]] = field(default_factory=dict)

    def __post_init__(self):
        for column, column_cuts in self.cuts.items():
            if any(b <= a for a, b in zip(column_cuts, column_cuts[1:])):
                raise ConfigError(f"Cut points for '{column}' must be strictly increasing")
        for column, values in self.categories.items():
            if len(set(values)) != len(values):
                raise ConfigError(f"Duplicate categories for '{column}'")
        if len(set(self.label_order)) != len(self.label_order):
            raise ConfigError("Duplicate class labels in label order")

    @property
    def dropped_columns(self) -> List[str]:
        """Columns that would only yield one constant binary feature."""
        dropped = []
        for column in self.columns:
            if self.kinds[column] == "continuous" and not self.cuts.get(column):
                dropped.append(column)
            elif self.kinds[column] == "categorical" and len(self.categories.get(column, [])) < 2:
                dropped.append(column)
        return dropped

    @property
    def dictionary(self) -> FeatureDictionary:
        entries: List[FeatureCondition] = []
        dropped = set(self.dropped_columns)
        for column in self.columns:
            if column in dropped:
                continue
            if self.kinds[column] == "continuous":
                bounds = [None, *self.cuts[column], None]
                for low, high in zip(bounds, bounds[1:]):
                    if low is None:
                        text = f"{column} < {_format_number(high)}"
                    elif high is None:
                        text = f"{column} ≥ {_format_number(low)}"
                    else:
                        text = f"{_format_number(low)} ≤ {column} < {_format_number(high)}"
                    entries.append(FeatureCondition(len(entries), column, text, "interval", low=low, high=high))
            else:
                for category in self.categories[column]:
                    entries.append(FeatureCondition(
                        len(entries), column, f"{column} = {category}", "equals", category=category))
        return FeatureDictionary(entries=entries, dropped=[c for c in self.columns if c in dropped])

    @property
    def n_features(self) -> int:
        return len(self.dictionary)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "columns": list(self.columns),
            "kinds": dict(self.kinds),
            "label_column": self.label_column,
            "label_order": list(self.label_order),
            "cuts": {k: list(v) for k, v in self.cuts.items()},
            "categories": {k: list(v) for k, v in self.categories.items()},
            "dropped": self.dropped_columns,
            "dictionary": self.dictionary.to_dict(),
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "Discretizer":
        return Discretizer(
            columns=list(data["columns"]),
            kinds=dict(data["kinds"]),
            label_column=data["label_column"],
            label_order=[str(v) for v in data["label_order"]],
            cuts={k: [float(c) for c in v] for k, v in data.get("cuts", {}).items()},
            categories={k: [str(c) for c in v] for k, v in data.get("categories", {}).items()},
        )


@dataclass
class BinarizedDataset:
    features: np.ndarray  # N x J, {0,1}
    labels: np.ndarray  # N x C, one-hot
    dictionary: FeatureDictionary
    label_order: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.features.ndim != 2 or self.labels.ndim != 2:
            raise DimensionError("features and labels must be 2-D")
        if len(self.features) != len(self.labels):
            raise DimensionError(f"{len(self.features)} feature rows vs {len(self.labels)} label rows")
        if self.features.shape[1] != len(self.dictionary):
            raise DimensionError(f"{self.features.shape[1]} features vs {len(self.dictionary)} dictionary entries")
        if len(self.labels) and not np.all(self.labels.sum(axis=1) == 1):
            raise DataError("Every label row must be one-hot")

    @property
    def n(self) -> int:
        return len(self.features)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return self.labels.shape[1]

    @property
    def label_ids(self) -> np.ndarray:
        return self.labels.argmax(axis=1)

    def subset(self, indices) -> "BinarizedDataset":
        indices = np.asarray(indices, dtype=int)
        return BinarizedDataset(self.features[indices], self.labels[indices], self.dictionary, list(self.label_order))


def _numeric_column(frame: pd.DataFrame, column: str) -> np.ndarray:
    try:
        return pd.to_numeric(frame[column], errors="raise").to_numpy(dtype=float)
    except (ValueError, TypeError) as err:
        raise DataError(f"Column '{column}' is declared continuous but holds non-numeric values: {err}") from err


def fit_discretizer(data: RawDataset, label_order: Optional[List[str]] = None) -> Discretizer:
    """
    Fits cut points per continuous column and records category and label orders.

    `label_order` fixes the class order (e.g. across folds); by default it is
    the order of first appearance.
    """
    if label_order is None:
        label_order = [str(v) for v in pd.unique(data.labels)]
    label_order = list(label_order)
    missing = set(data.labels.astype(str)) - set(label_order)
    if missing:
        raise DataError(f"unknown class: {sorted(missing)}")
    label_index = {label: i for i, label in enumerate(label_order)}
    label_ids = data.labels.astype(str).map(label_index).to_numpy()

    columns = data.feature_columns
    cuts: Dict[str, List[float]] = {}
    categories: Dict[str, List[str]] = {}
    for column in columns:
        if data.schema[column] == "continuous":
            cuts[column] = mdlp_cuts(_numeric_column(data.frame, column), label_ids)
            logger.debug(f"🔹 {column}: {len(cuts[column])} cut(s)")
        else:
            categories[column] = [str(v) for v in pd.unique(data.frame[column])]

    discretizer = Discretizer(
        columns=columns,
        kinds={c: data.schema[c] for c in columns},
        label_column=data.label_column,
        label_order=label_order,
        cuts=cuts,
        categories=categories,
    )
    logger.info(f"✅ Discretizer fitted on {data.n} rows: J = {discretizer.n_features}, "
                f"dropped {discretizer.dropped_columns}")
    return discretizer


def binarize_features(frame: pd.DataFrame, disc: Discretizer) -> np.ndarray:
    """N x J binary matrix for the feature columns of `frame`; other columns are ignored."""
    missing = [c for c in disc.columns if c not in frame.columns]
    if missing:
        raise DataError(f"Columns {missing} expected by the discretizer are missing")

    n = len(frame)
    dropped = set(disc.dropped_columns)
    blocks = []
    for column in disc.columns:
        if column in dropped:
            continue
        if disc.kinds[column] == "continuous":
            values = _numeric_column(frame, column)
            cuts = np.asarray(disc.cuts[column])
            bins = np.searchsorted(cuts, values, side="right")
            block = np.zeros((n, len(cuts) + 1), dtype=np.uint8)
            block[np.arange(n), bins] = 1
        else:
            categories = disc.categories[column]
            lookup = {c: i for i, c in enumerate(categories)}
            positions = frame[column].astype(str).map(lookup)
            unseen = positions.isna()
            if unseen.any():
                logger.warning(f"⚠️ {int(unseen.sum())} row(s) with unseen categories in '{column}': "
                               f"{sorted(set(frame[column][unseen].astype(str)))}")
            block = np.zeros((n, len(categories)), dtype=np.uint8)
            seen_rows = np.flatnonzero(~unseen.to_numpy())
            block[seen_rows, positions[~unseen].to_numpy(dtype=int)] = 1
        blocks.append(block)

    if not blocks:
        return np.zeros((n, 0), dtype=np.uint8)
    return np.hstack(blocks)


def binarize(data: RawDataset, disc: Discretizer) -> BinarizedDataset:
    """Applies a fitted discretizer; labels become one-hot in `disc.label_order`."""
    features = binarize_features(data.frame, disc)

    label_index = {label: i for i, label in enumerate(disc.label_order)}
    positions = data.labels.astype(str).map(label_index)
    if positions.isna().any():
        unknown = sorted(set(data.labels[positions.isna()].astype(str)))
        raise DataError(f"unknown class: {unknown}")
    labels = np.zeros((data.n, len(disc.label_order)), dtype=np.uint8)
    labels[np.arange(data.n), positions.to_numpy(dtype=int)] = 1

    return BinarizedDataset(features, labels, disc.dictionary, list(disc.label_order))
