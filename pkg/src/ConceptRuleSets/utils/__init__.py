# utils/__init__.py

import logging

# Create a logger for the utils package
logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

from .json import DataclassJSONEncoder, dump_document
from .seeding import derive_seed

__all__ = ["DataclassJSONEncoder", "dump_document", "derive_seed"]
