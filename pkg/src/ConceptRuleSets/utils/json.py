# json.py
"""
Utilities for writing model and report documents.

Includes:
- `DataclassJSONEncoder`: Serializes dataclass instances and numpy values to JSON-friendly types.
- `dump_document`: Writes a header + payload document as UTF-8 JSON.
"""

import json
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Union
import logging

import numpy as np

# Logger Configuration
logger = logging.getLogger(__name__)


class DataclassJSONEncoder(json.JSONEncoder):
    def default(self, obj):
        if is_dataclass(obj) and not isinstance(obj, type):
            return asdict(obj)
        if isinstance(obj, Enum):
            return obj.value
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, Path):
            return str(obj)
        return super().default(obj)


def dump_document(document: Dict[str, Any], file_path: Union[str, Path]) -> Path:
    """Writes `document` to `file_path` (parents created), sorted keys, UTF-8."""
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with file_path.open("w", encoding="utf-8") as f:
        json.dump(document, f, indent=2, ensure_ascii=False, sort_keys=True, cls=DataclassJSONEncoder)
        f.write("\n")
    logger.debug(f"Document written to {file_path}")
    return file_path
