# errors.py
"""
Exception types raised across the package.

The CLI maps them onto exit codes (see `crs_core.ExitCodes`).
"""


class CRSError(Exception):
    """Base class for every error raised by ConceptRuleSets."""


class ConfigError(CRSError, ValueError):
    """Invalid parameters, widths, flags or fold settings."""


class DataError(CRSError, ValueError):
    """Unreadable, incomplete or incompatible input data and documents."""


class DimensionError(CRSError, ValueError):
    """Operand shapes that do not chain."""


class NumericError(CRSError, ArithmeticError):
    """Training produced a non-finite loss."""


class NodeNotFoundError(CRSError, LookupError):
    """A (layer, index) reference outside the model."""
