# datasets.py
"""
Manifest of the UCI benchmark tables the experiment is usually run on.

Files are fetched by the user; each must be a delimited table with a header
row (add one to the raw `.data` files) whose label column is `label_column`.

Includes:
- `DatasetInfo`: Expected shape of a benchmark table plus its cleaning notes.
- `DATASETS`, `get_dataset`, `list_datasets`: Lookup by name.
- `check_dataset`: Compares a loaded table with its manifest entry.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional
import logging

# Logger Configuration
logger = logging.getLogger(__name__)

from .errors import ConfigError


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    label_column: str
    instances: int
    classes: int
    features: int
    binary_features: int
    notes: str = ""
    desk_scale: bool = False  # reproducible on one core within minutes

    def to_dict(self) -> Dict[str, object]:
        return dict(self.__dict__)


DATASETS: Dict[str, DatasetInfo] = {info.name: info for info in (
    DatasetInfo("adult", "income", 32561, 2, 14, 155,
                "adult.data only; rows containing '?' are dropped before loading, "
                "fnlwgt kept as continuous."),
    DatasetInfo("bank-marketing", "y", 45211, 2, 16, 88,
                "bank-full.csv, ';'-separated: convert to ',' or load as .csv after re-saving."),
    DatasetInfo("banknote", "class", 1372, 2, 4, 17,
                "data_banknote_authentication.txt with header variance,skewness,curtosis,entropy,class."),
    DatasetInfo("blogger", "ProLBlogger", 100, 2, 5, 15,
                "All five features are categorical.", desk_scale=True),
    DatasetInfo("chess", "class", 28056, 18, 6, 40,
                "krkopt.data (king-rook vs king); file columns treated as categorical, "
                "ranks as continuous."),
    DatasetInfo("connect-4", "class", 67557, 3, 42, 126,
                "connect-4.data; every board cell is categorical (x, o, b)."),
    DatasetInfo("letRecog", "letter", 20000, 26, 16, 155,
                "letter-recognition.data; label is the first column."),
    DatasetInfo("magic04", "class", 19020, 2, 10, 79,
                "magic04.data; ten continuous features."),
    DatasetInfo("mushroom", "class", 8124, 2, 22, 117,
                "agaricus-lepiota.data; '?' in stalk-root kept as its own category.", desk_scale=True),
    DatasetInfo("nursery", "class", 12960, 5, 8, 27,
                "nursery.data; all features categorical.", desk_scale=True),
    DatasetInfo("tic-tac-toe", "class", 958, 2, 9, 27,
                "tic-tac-toe.data; nine categorical board cells.", desk_scale=True),
    DatasetInfo("wine", "class", 178, 3, 13, 37,
                "wine.data; label is the first column, 13 continuous features.", desk_scale=True),
)}


def list_datasets(desk_scale_only: bool = False) -> List[str]:
    return [name for name, info in DATASETS.items() if info.desk_scale or not desk_scale_only]


def get_dataset(name: str) -> DatasetInfo:
    info = DATASETS.get(name)
    if info is None:
        raise ConfigError(f"Unknown dataset '{name}'; known: {sorted(DATASETS)}")
    return info


def check_dataset(name: str, instances: int, classes: int, features: int,
                  binary_features: Optional[int] = None) -> List[str]:
    """Differences between a loaded table and the manifest, logged as warnings."""
    info = get_dataset(name)
    observed = {"instances": instances, "classes": classes, "features": features,
                "binary_features": binary_features}
    mismatches = []
    for key, value in observed.items():
        expected = getattr(info, key)
        if value is not None and value != expected:
            mismatches.append(f"{key}: expected {expected}, got {value}")
    for mismatch in mismatches:
        logger.warning(f"⚠️ {name} {mismatch}")
    return mismatches
