# /handlers/parquet_handler.py

from pathlib import Path
import logging

import pandas as pd

logger = logging.getLogger(__name__)


def register():
    try:
        import pyarrow  # noqa: F401
        logger.debug("✅ pyarrow loaded, parquet input enabled.")
    except ImportError as e:
        logger.debug(f"❌ pyarrow not found: {e}")
        return {}

    def handler(path: Path) -> pd.DataFrame:
        logger.info(f"📄 Reading parquet table: {path}")
        return pd.read_parquet(path)

    return {".parquet": handler}
