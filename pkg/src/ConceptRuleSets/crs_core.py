# crs_core.py

from dataclasses import dataclass


APP_NAME = "ConceptRuleSets"
DATA_VERSION = "1.0.0"
GENERATOR = "direct"

# Readable document versions; anything else is rejected at load.
SUPPORTED_DATA_VERSIONS = ("1.0.0",)

COLUMN_KINDS = ["continuous", "categorical", "label", "ignore"]

RB_GRID = (0.0, 0.5, 0.7, 0.8, 0.9, 0.95)


@dataclass(frozen=True)
class TrainDefaults:
    LOGICAL_LAYERS: int = 4
    MIN_HIDDEN: int = 32
    MAX_HIDDEN: int = 256
    EPOCHS: int = 400
    BATCH_SIZE: int = 128
    LR: float = 5e-3
    LR_DECAY_FACTOR: float = 0.75
    LR_DECAY_EVERY: int = 100
    WEIGHT_DECAY: float = 1e-8
    RB_RATE: float = 0.8
    THRESHOLD: float = 0.5
    INIT_HIGH: float = 0.1
    MOMENTUM: float = 0.0
    SEED: int = 0


@dataclass(frozen=True)
class ExperimentDefaults:
    FOLDS: int = 5
    VALIDATION_FRACTION: float = 0.2
    JOBS: int = 1


@dataclass(frozen=True)
class ExitCodes:
    OK: int = 0
    CONFIG_ERROR: int = 2
    DATA_ERROR: int = 3
    NUMERIC_FAILURE: int = 4
