# ConceptRuleSets/__init__.py

import logging

# Create a logger for the library
logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

from .binarizer import BinarizedDataset, Discretizer, binarize, fit_discretizer, mdlp_cuts
from .crs_model import CrsModel, edge_count, predict, predict_batch, render_model, render_rules, rule_tree
from .data_loader import RawDataset, load_dataset
from .errors import ConfigError, CRSError, DataError, DimensionError, NodeNotFoundError, NumericError
from .experiment import ExperimentConfig, ExperimentReport, run_experiment, stratified_kfold
from .metrics import macro_f1
from .mllp import MllpModel, init_model
from .simplifier import SimplificationReport, simplify
from .train_attributes import TrainConfig, build_layer_widths
from .trainer import extract_crs, train

__all__ = [
    "BinarizedDataset", "Discretizer", "binarize", "fit_discretizer", "mdlp_cuts",
    "CrsModel", "edge_count", "predict", "predict_batch", "render_model", "render_rules", "rule_tree",
    "RawDataset", "load_dataset",
    "CRSError", "ConfigError", "DataError", "DimensionError", "NodeNotFoundError", "NumericError",
    "ExperimentConfig", "ExperimentReport", "run_experiment", "stratified_kfold",
    "macro_f1",
    "MllpModel", "init_model",
    "SimplificationReport", "simplify",
    "TrainConfig", "build_layer_widths",
    "extract_crs", "train",
]
