# model_store.py
"""
Reads and writes discretizers, MLLP models and CRS models as versioned JSON documents.

Includes:
- `document_header`, `read_document`: The shared `{"header": ..., "data": ...}` layout and its checks.
- `save_discretizer` / `load_discretizer`
- `save_mllp` / `load_mllp`: Continuous weights, layer kinds and the training config.
- `save_crs` / `load_crs`: Binary weights, feature dictionary, fallback class and label order.
- `StoredModel`: What the loaders return, the model plus its discretizer and provenance.
"""

from dataclasses import dataclass, field
import json
from pathlib import Path
from typing import Any, Dict, Optional, Union
import logging

import numpy as np

# Logger Configuration
logger = logging.getLogger(__name__)

from .binarizer import Discretizer, FeatureDictionary
from .crs_core import APP_NAME, DATA_VERSION, GENERATOR, SUPPORTED_DATA_VERSIONS
from .crs_model import CrsModel
from .errors import DataError
from .logic_layers import LayerKind, WeightMatrix
from .mllp import MllpModel
from .train_attributes import TrainConfig
from .utils.json import dump_document

FILE_TYPE_DISCRETIZER = "discretizer"
FILE_TYPE_MLLP = "mllp"
FILE_TYPE_CRS = "crs"
FILE_TYPE_REPORT = "report"


def document_header(file_type: str) -> Dict[str, str]:
    return {
        "app_name": APP_NAME,
        "data_version": DATA_VERSION,
        "file_type": file_type,
        "generator": GENERATOR,
    }


def read_document(file_path: Union[str, Path], file_type: str) -> Dict[str, Any]:
    """Loads a document and returns its `data` block after checking the header."""
    file_path = Path(file_path)
    try:
        with file_path.open("r", encoding="utf-8") as f:
            document = json.load(f)
    except (IOError, json.JSONDecodeError) as err:
        logger.error(f"❌ Error loading {file_path}: {err}")
        raise DataError(f"Cannot read {file_path}: {err}") from err

    if not isinstance(document, dict) or "data" not in document:
        raise DataError(f"{file_path} is not a {APP_NAME} document")
    header = document.get("header", {})
    if header.get("file_type") != file_type:
        raise DataError(f"{file_path} holds a '{header.get('file_type')}' document, expected '{file_type}'")
    if header.get("data_version") not in SUPPORTED_DATA_VERSIONS:
        raise DataError(f"{file_path} has unsupported data_version {header.get('data_version')!r}")
    return document["data"]


def _write(file_type: str, data: Dict[str, Any], file_path: Union[str, Path]) -> Path:
    path = dump_document({"header": document_header(file_type), "data": data}, file_path)
    logger.info(f"✅ {file_type} saved to {path}")
    return path


def save_discretizer(disc: Discretizer, file_path: Union[str, Path]) -> Path:
    return _write(FILE_TYPE_DISCRETIZER, disc.to_dict(), file_path)


def load_discretizer(file_path: Union[str, Path]) -> Discretizer:
    data = read_document(file_path, FILE_TYPE_DISCRETIZER)
    try:
        return Discretizer.from_dict(data)
    except (KeyError, TypeError) as err:
        raise DataError(f"Malformed discretizer in {file_path}: {err}") from err


@dataclass
class StoredModel:
    """A loaded model with the discretizer that produced its features and any provenance."""
    model: Any
    discretizer: Optional[Discretizer] = None
    extra: Dict[str, Any] = field(default_factory=dict)


def save_mllp(model: MllpModel, file_path: Union[str, Path],
              discretizer: Optional[Discretizer] = None,
              extra: Optional[Dict[str, Any]] = None) -> Path:
    data = {
        "config": model.config.to_dict(),
        "widths": model.widths,
        "layers": [{"index": layer.index, "kind": layer.kind.value, "values": layer.values}
                   for layer in model.layers],
        "discretizer": discretizer.to_dict() if discretizer else None,
        "extra": extra or {},
    }
    return _write(FILE_TYPE_MLLP, data, file_path)


def _discretizer_of(data: Dict[str, Any]) -> Optional[Discretizer]:
    return Discretizer.from_dict(data["discretizer"]) if data.get("discretizer") else None


def load_mllp(file_path: Union[str, Path]) -> StoredModel:
    data = read_document(file_path, FILE_TYPE_MLLP)
    try:
        config = TrainConfig.from_dict(data["config"])
        layers = [WeightMatrix(np.asarray(entry["values"], dtype=np.float64),
                               LayerKind(entry["kind"]), int(entry["index"]))
                  for entry in data["layers"]]
        model = MllpModel(layers, config)
        disc = _discretizer_of(data)
    except (KeyError, TypeError, ValueError) as err:
        raise DataError(f"Malformed MLLP model in {file_path}: {err}") from err
    logger.info(f"✅ Loaded MLLP with widths {model.widths} from {file_path}")
    return StoredModel(model, disc, dict(data.get("extra") or {}))


def save_crs(crs: CrsModel, file_path: Union[str, Path],
             discretizer: Optional[Discretizer] = None,
             extra: Optional[Dict[str, Any]] = None) -> Path:
    """`extra` holds free-form provenance, e.g. the simplification report."""
    data = {
        "widths": crs.widths,
        "layers": list(crs.layers),
        "fallback_class": crs.fallback_class,
        "label_order": list(crs.label_order),
        "dictionary": crs.dictionary.to_dict() if crs.dictionary is not None else None,
        "discretizer": discretizer.to_dict() if discretizer else None,
        "extra": extra or {},
    }
    return _write(FILE_TYPE_CRS, data, file_path)


def load_crs(file_path: Union[str, Path]) -> StoredModel:
    data = read_document(file_path, FILE_TYPE_CRS)
    try:
        dictionary = FeatureDictionary.from_dict(data["dictionary"]) if data.get("dictionary") else None
        # Emptied layers (0 x n) do not survive a JSON list round trip on their own.
        widths = [int(w) for w in data["widths"]]
        layers = [np.asarray(w, dtype=np.uint8).reshape(widths[l + 1], widths[l])
                  for l, w in enumerate(data["layers"])]
        crs = CrsModel(layers, dictionary, int(data.get("fallback_class", 0)),
                       [str(v) for v in data.get("label_order", [])])
        disc = _discretizer_of(data)
    except (KeyError, TypeError, ValueError) as err:
        raise DataError(f"Malformed CRS model in {file_path}: {err}") from err
    logger.info(f"✅ Loaded CRS with widths {crs.widths} from {file_path}")
    return StoredModel(crs, disc, dict(data.get("extra") or {}))
