# handlers/__init__.py
"""
Table readers keyed by file suffix.

Includes:
- `FILE_HANDLERS`: suffix -> reader returning a `pandas.DataFrame`.
- `get_handler`: Looks up the reader for a path.
"""

import importlib
import logging
from pathlib import Path
from typing import Callable

import pandas as pd

logger = logging.getLogger(__name__)

from ..errors import DataError

TableReader = Callable[[Path], pd.DataFrame]

FILE_HANDLERS: dict[str, TableReader] = {}

from . import base_handlers
FILE_HANDLERS.update(base_handlers.register())

# readers whose backend may be missing
OPTIONAL_READERS = {
    ".parquet": __package__ + ".parquet_handler",
}

for suffix, module_name in OPTIONAL_READERS.items():
    try:
        readers = importlib.import_module(module_name).register()
    except ImportError as e:
        logger.debug(f"⚠️ No reader for {suffix}: {e}")
        continue
    FILE_HANDLERS.update(readers)

logger.debug(f"📦 Table readers: {sorted(FILE_HANDLERS)}")


def get_handler(file_path: Path) -> TableReader:
    suffix = file_path.suffix.lower()
    if suffix in FILE_HANDLERS:
        return FILE_HANDLERS[suffix]
    if suffix in OPTIONAL_READERS:
        raise DataError(f"Reading {suffix} files needs pyarrow installed")
    raise DataError(f"Unsupported file type: {file_path.suffix} (known: {sorted(FILE_HANDLERS)})")
