# data_loader.py
"""
Typed tabular input.

Includes:
- `RawDataset`: A frame plus per-column kinds and the label column.
- `load_dataset`: Reads a table through the suffix readers, applies schema overrides,
  rejects missing values and infers column kinds.
- `load_schema`: Reads a column-kind schema file.
"""

from dataclasses import dataclass
import json
from pathlib import Path
from typing import Dict, List, Optional, Union
import logging

import numpy as np
import pandas as pd

# Logger Configuration
logger = logging.getLogger(__name__)

from .crs_core import COLUMN_KINDS
from .errors import ConfigError, DataError
from .handlers import get_handler


@dataclass
class RawDataset:
    frame: pd.DataFrame
    schema: Dict[str, str]
    label_column: str
    row_ids: Optional[np.ndarray] = None

    def __post_init__(self):
        self.row_ids = np.arange(len(self.frame)) if self.row_ids is None else np.asarray(self.row_ids)
        self.frame = self.frame.reset_index(drop=True)

        unknown = {k for k in self.schema.values() if k not in COLUMN_KINDS}
        if unknown:
            raise ConfigError(f"Unknown column kinds {sorted(unknown)}; expected one of {COLUMN_KINDS}")
        labels = [c for c, k in self.schema.items() if k == "label"]
        if labels != [self.label_column]:
            raise ConfigError(f"Exactly one label column expected, schema has {labels}")
        missing_cols = [c for c in self.schema if c not in self.frame.columns]
        if missing_cols:
            raise DataError(f"Columns {missing_cols} not present in data")
        if len(self.frame) < 1:
            raise DataError("Dataset has no rows")
        if len(self.row_ids) != len(self.frame):
            raise DataError("row_ids length does not match the number of rows")

    @property
    def n(self) -> int:
        return len(self.frame)

    @property
    def feature_columns(self) -> List[str]:
        """Continuous and categorical columns in schema order."""
        return [c for c, k in self.schema.items() if k in ("continuous", "categorical")]

    @property
    def labels(self) -> pd.Series:
        return self.frame[self.label_column]

    def subset(self, indices) -> "RawDataset":
        """Rows at positional `indices`; `row_ids` keep pointing at the source rows."""
        indices = np.asarray(indices, dtype=int)
        return RawDataset(
            frame=self.frame.iloc[indices].reset_index(drop=True),
            schema=dict(self.schema),
            label_column=self.label_column,
            row_ids=self.row_ids[indices],
        )


def load_schema(file_path: Union[str, Path]) -> Dict[str, str]:
    """Reads a JSON object mapping column name to a kind in `COLUMN_KINDS`."""
    file_path = Path(file_path)
    try:
        with file_path.open("r", encoding="utf-8") as f:
            schema = json.load(f)
    except (IOError, json.JSONDecodeError) as err:
        raise ConfigError(f"Cannot read schema {file_path}: {err}") from err

    if not isinstance(schema, dict) or not all(isinstance(v, str) for v in schema.values()):
        raise ConfigError(f"Schema {file_path} must be a JSON object of column -> kind")
    return schema


def infer_schema(frame: pd.DataFrame, label_column: str,
                 overrides: Optional[Dict[str, str]] = None) -> Dict[str, str]:
    """All-numeric columns are continuous, everything else categorical; overrides win."""
    overrides = dict(overrides or {})
    schema = {}
    for column in frame.columns:
        if column in overrides:
            schema[column] = overrides[column]
        elif column == label_column:
            schema[column] = "label"
        elif pd.api.types.is_numeric_dtype(frame[column]) and not pd.api.types.is_bool_dtype(frame[column]):
            schema[column] = "continuous"
        else:
            schema[column] = "categorical"
    return schema


def prepare_frame(frame: pd.DataFrame, schema: Dict[str, str]) -> pd.DataFrame:
    """Drops ignored columns, stringifies categorical and label values."""
    keep = [c for c, k in schema.items() if k != "ignore"]
    frame = frame[keep].copy()
    for column in keep:
        if schema[column] in ("categorical", "label"):
            frame[column] = frame[column].astype(str).str.strip()
    return frame


def dataset_from_frame(frame: pd.DataFrame, label_column: str,
                       overrides: Optional[Dict[str, str]] = None) -> RawDataset:
    if label_column not in frame.columns:
        raise ConfigError(f"Label column '{label_column}' not found; columns are {list(frame.columns)}")

    schema = infer_schema(frame, label_column, overrides)
    null_counts = frame[[c for c, k in schema.items() if k != "ignore"]].isna().sum()
    null_counts = null_counts[null_counts > 0]
    if len(null_counts):
        raise DataError(f"Missing values are not supported: {null_counts.to_dict()}")

    frame = prepare_frame(frame, schema)
    schema = {c: k for c, k in schema.items() if k != "ignore"}
    dataset = RawDataset(frame=frame, schema=schema, label_column=label_column)

    n_classes = dataset.labels.nunique()
    if n_classes < 2:
        raise DataError(f"Label column '{label_column}' needs at least 2 classes, found {n_classes}")
    return dataset


def read_table(file_path: Union[str, Path]) -> pd.DataFrame:
    file_path = Path(file_path)
    if not file_path.exists():
        raise DataError(f"File not found: {file_path}")

    handler = get_handler(file_path)
    try:
        return handler(file_path)
    except (IOError, ValueError, pd.errors.ParserError) as err:
        raise DataError(f"Cannot read {file_path}: {err}") from err


def load_dataset(file_path: Union[str, Path], label_column: str,
                 schema_path: Optional[Union[str, Path]] = None) -> RawDataset:
    """Reads a table and returns a validated `RawDataset`."""
    overrides = load_schema(schema_path) if schema_path else None
    frame = read_table(file_path)
    dataset = dataset_from_frame(frame, label_column, overrides)
    logger.info(f"✅ Loaded {dataset.n} rows, {len(dataset.feature_columns)} feature columns from {file_path}")
    return dataset
