# experiment.py
"""
Cross-validated evaluation of CRS on one table.

Includes:
- `ExperimentConfig`: Data location, fold count, binarization-rate grid and training overrides.
- `stratified_kfold`: Deterministic stratified folds with a plain k-fold fallback.
- `run_experiment`: Per fold, discretize, tune P on a validation split, retrain, extract,
  simplify and score on the held-out fold.
- `FoldResult`, `ExperimentReport`, `write_report`: Aggregation and the report files.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union
import logging
import time

import numpy as np
import pandas as pd
from sklearn.model_selection import KFold, StratifiedKFold, train_test_split

# Logger Configuration
logger = logging.getLogger(__name__)

from .binarizer import BinarizedDataset, Discretizer, binarize, fit_discretizer
from .crs_core import RB_GRID, ExperimentDefaults, TrainDefaults
from .crs_model import edge_count, fallback_rows, predict_batch
from .data_loader import RawDataset, load_dataset
from .datasets import check_dataset, get_dataset
from .errors import ConfigError, CRSError, DataError
from .metrics import macro_f1
from .mllp import init_model, predict_argmax
from .model_store import FILE_TYPE_REPORT, document_header
from .simplifier import simplify
from .train_attributes import TrainConfig, build_layer_widths
from .trainer import extract_crs, majority_class, train
from .utils.json import dump_document
from .utils.seeding import derive_seed

# Simplification variants reported for model complexity: (dead nodes, redundant edges)
VARIANTS = {
    "CRS_DN": (True, False),
    "CRS_RR": (False, True),
    "CRS_DN&RR": (True, True),
}

# Training fields the experiment sets itself.
_MANAGED_TRAIN_FIELDS = {"layer_widths", "rb_rate", "seed"}


@dataclass
class ExperimentConfig:
    data_path: Optional[str] = None
    label_column: Optional[str] = None
    schema_path: Optional[str] = None
    dataset: Optional[str] = None  # manifest name, fills in label_column
    folds: int = ExperimentDefaults.FOLDS
    validation_fraction: float = ExperimentDefaults.VALIDATION_FRACTION
    rb_grid: List[float] = field(default_factory=lambda: list(RB_GRID))
    train: Dict[str, Any] = field(default_factory=dict)
    logical_layers: int = TrainDefaults.LOGICAL_LAYERS
    hidden: Optional[List[int]] = None
    global_discretize: bool = False
    structural_only: bool = False
    ablation: bool = False
    output_dir: Optional[str] = None
    seed: int = TrainDefaults.SEED
    jobs: int = ExperimentDefaults.JOBS

    def __post_init__(self):
        if self.dataset and not self.label_column:
            self.label_column = get_dataset(self.dataset).label_column
        if not self.label_column:
            raise ConfigError("label_column is required (or a known dataset name)")
        if self.folds < 2:
            raise ConfigError(f"folds must be >= 2, got {self.folds}")
        if not 0 < self.validation_fraction < 1:
            raise ConfigError("validation_fraction must be in (0, 1)")
        self.rb_grid = [float(p) for p in self.rb_grid]
        if not self.rb_grid:
            raise ConfigError("rb_grid must not be empty")
        if any(not 0 <= p <= 1 for p in self.rb_grid):
            raise ConfigError(f"rb_grid values must be in [0, 1], got {self.rb_grid}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

        known = {f.name for f in fields(TrainConfig)} - _MANAGED_TRAIN_FIELDS
        unknown = set(self.train) - known
        if unknown:
            raise ConfigError(f"Unknown training overrides {sorted(unknown)}; allowed: {sorted(known)}")
        TrainConfig(layer_widths=[1, 1, 1], **self.train)
        build_layer_widths(1, 2, self.logical_layers, self.hidden)

    def train_config(self, n_features: int, n_classes: int, rb_rate: float, seed: int) -> TrainConfig:
        widths = build_layer_widths(n_features, n_classes, self.logical_layers, self.hidden)
        return TrainConfig(layer_widths=widths, rb_rate=rb_rate, seed=seed, **self.train)

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(data) - known
        if unknown:
            logger.warning(f"Unknown keys in experiment config: {unknown}")
        return ExperimentConfig(**{k: v for k, v in data.items() if k in known})


@dataclass
class FoldResult:
    fold: int
    n_train: int
    n_test: int
    n_features: int
    selected_rb_rate: float
    validation_f1: Dict[str, float]  # grid value -> validation macro-F1
    crs_f1: float
    crs_simplified_f1: float
    edges: Dict[str, int]
    fallback_count: int
    simplification: Dict[str, Any] = field(default_factory=dict)
    mllp_p0_f1: Optional[float] = None
    crs_p0_f1: Optional[float] = None
    timings: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Everything except the wall-clock timings."""
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "timings"}


def _mean(values: List[Optional[float]]) -> Optional[float]:
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


@dataclass
class ExperimentReport:
    config: Dict[str, Any]
    n_instances: int
    n_classes: int
    label_order: List[str]
    folds: List[FoldResult] = field(default_factory=list)
    n_binary_features: Optional[int] = None  # J of the full table, set for manifest datasets

    @property
    def mean_crs_f1(self) -> float:
        return _mean([f.crs_f1 for f in self.folds])

    @property
    def mean_crs_simplified_f1(self) -> float:
        return _mean([f.crs_simplified_f1 for f in self.folds])

    @property
    def mean_mllp_p0_f1(self) -> Optional[float]:
        return _mean([f.mllp_p0_f1 for f in self.folds])

    @property
    def mean_crs_p0_f1(self) -> Optional[float]:
        return _mean([f.crs_p0_f1 for f in self.folds])

    @property
    def mean_edges(self) -> Dict[str, float]:
        names = self.folds[0].edges.keys() if self.folds else []
        return {name: _mean([f.edges[name] for f in self.folds]) for name in names}

    @property
    def total_fallbacks(self) -> int:
        return int(sum(f.fallback_count for f in self.folds))

    def means(self) -> Dict[str, Any]:
        return {
            "crs_f1": self.mean_crs_f1,
            "crs_simplified_f1": self.mean_crs_simplified_f1,
            "mllp_p0_f1": self.mean_mllp_p0_f1,
            "crs_p0_f1": self.mean_crs_p0_f1,
            "edges": self.mean_edges,
            "fallback_total": self.total_fallbacks,
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "n_instances": self.n_instances,
            "n_classes": self.n_classes,
            "label_order": list(self.label_order),
            "n_binary_features": self.n_binary_features,
            "folds": [f.to_dict() for f in self.folds],
            "mean": self.means(),
        }

    def to_frame(self) -> pd.DataFrame:
        """One row per fold plus a `mean` row; F1 values in percent."""
        rows = []
        for f in self.folds:
            row = {"fold": str(f.fold), "selected_rb_rate": f.selected_rb_rate,
                   "crs_f1": 100 * f.crs_f1, "crs_simplified_f1": 100 * f.crs_simplified_f1}
            if f.mllp_p0_f1 is not None:
                row["mllp_p0_f1"] = 100 * f.mllp_p0_f1
                row["crs_p0_f1"] = 100 * f.crs_p0_f1
            row.update({f"edges_{name}": count for name, count in f.edges.items()})
            row["fallback_count"] = f.fallback_count
            rows.append(row)

        frame = pd.DataFrame(rows)
        mean_row = {column: frame[column].mean() for column in frame.columns if column != "fold"}
        mean_row["fold"] = "mean"
        return pd.concat([frame, pd.DataFrame([mean_row])], ignore_index=True).round(4)

    def to_text(self) -> str:
        frame = self.to_frame()
        title = (f"# CRS {len(self.folds)}-fold cross-validation: {self.n_instances} instances, "
                 f"{self.n_classes} classes")
        if self.n_binary_features is not None:
            title += f", {self.n_binary_features} binary features"
        lines = [
            title,
            frame.to_string(index=False, float_format=lambda v: f"{v:.2f}"),
        ]
        return "\n".join(lines) + "\n"


def stratified_kfold(labels, k: int, seed: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """(train indices, test indices) per fold; plain shuffled k-fold when a class has fewer than k rows."""
    labels = np.asarray(labels)
    n = len(labels)
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    if k > n:
        raise ConfigError(f"cannot split {n} instances into {k} folds")

    random_state = derive_seed(seed)
    _, counts = np.unique(labels, return_counts=True)
    if counts.min() < k:
        logger.warning(f"⚠️ Smallest class has {counts.min()} instance(s) < {k} folds; "
                       f"using unstratified k-fold")
        splitter = KFold(n_splits=k, shuffle=True, random_state=random_state)
        return [(train_idx, test_idx) for train_idx, test_idx in splitter.split(np.zeros(n))]

    splitter = StratifiedKFold(n_splits=k, shuffle=True, random_state=random_state)
    return [(train_idx, test_idx) for train_idx, test_idx in splitter.split(np.zeros(n), labels)]


def _validation_split(labels: np.ndarray, fraction: float, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    positions = np.arange(len(labels))
    try:
        fit, val = train_test_split(positions, test_size=fraction, random_state=seed, stratify=labels)
    except ValueError:
        logger.warning("⚠️ Validation split cannot be stratified; falling back to a random split")
        fit, val = train_test_split(positions, test_size=fraction, random_state=seed)
    return np.sort(fit), np.sort(val)


def _train_and_extract(config: ExperimentConfig, data: BinarizedDataset, rb_rate: float, seed: int):
    train_config = config.train_config(data.n_features, data.n_classes, rb_rate, seed)
    model = train(init_model(train_config), data, train_config)
    crs = extract_crs(model, dictionary=data.dictionary, fallback_class=majority_class(data),
                      label_order=data.label_order)
    return model, crs


def _select_rb_rate(config: ExperimentConfig, fold: int, train_set: BinarizedDataset) -> Tuple[float, Dict[str, float]]:
    """Grid value with the best validation macro-F1 of the extracted CRS; earlier values win ties."""
    if len(config.rb_grid) == 1:
        return config.rb_grid[0], {}

    fit, val = _validation_split(train_set.label_ids, config.validation_fraction, derive_seed(config.seed, fold))
    fit_set, val_set = train_set.subset(fit), train_set.subset(val)
    scores: Dict[str, float] = {}
    best_rate, best_score = config.rb_grid[0], -1.0
    for grid_index, rb_rate in enumerate(config.rb_grid):
        _, crs = _train_and_extract(config, fit_set, rb_rate, derive_seed(config.seed, fold, grid_index))
        score = macro_f1(predict_batch(crs, val_set.features), val_set.label_ids, val_set.n_classes)
        scores[f"{rb_rate:g}"] = score
        logger.debug(f"🔹 fold {fold} P={rb_rate:g}: validation macro-F1 {score:.4f}")
        if score > best_score:
            best_rate, best_score = rb_rate, score
    return best_rate, scores


def _run_fold(config: ExperimentConfig, data: RawDataset, fold: int,
              train_idx: np.ndarray, test_idx: np.ndarray,
              global_disc: Optional[Discretizer] = None) -> FoldResult:
    timings: Dict[str, float] = {}
    started = time.perf_counter()
    raw_train, raw_test = data.subset(train_idx), data.subset(test_idx)
    # every fold shares the class order of the full table
    label_order = [str(v) for v in pd.unique(data.labels)]
    disc = global_disc or fit_discretizer(raw_train, label_order=label_order)
    if disc.n_features == 0:
        raise DataError("no binary features left after discretization")
    train_set, test_set = binarize(raw_train, disc), binarize(raw_test, disc)
    timings["discretize"] = time.perf_counter() - started

    started = time.perf_counter()
    rb_rate, validation_f1 = _select_rb_rate(config, fold, train_set)
    timings["grid_search"] = time.perf_counter() - started

    started = time.perf_counter()
    grid_size = len(config.rb_grid)
    _, crs = _train_and_extract(config, train_set, rb_rate, derive_seed(config.seed, fold, grid_size))
    timings["train"] = time.perf_counter() - started

    truths = test_set.label_ids
    crs_f1 = macro_f1(predict_batch(crs, test_set.features), truths, test_set.n_classes)
    fallback_count = int(fallback_rows(crs, test_set.features).sum())
    if fallback_count:
        logger.warning(f"⚠️ fold {fold}: {fallback_count} test row(s) fell back to the majority class")

    started = time.perf_counter()
    edges = {"CRS_O": edge_count(crs)}
    variants = {}
    for name, (dead_nodes, redundant) in VARIANTS.items():
        variants[name] = simplify(crs, train_set, dead_nodes=dead_nodes, redundant=redundant,
                                  structural_only=config.structural_only)
        edges[name] = edge_count(variants[name][0])
    simplified, report = variants["CRS_DN&RR"]
    crs_simplified_f1 = macro_f1(predict_batch(simplified, test_set.features), truths, test_set.n_classes)
    timings["simplify"] = time.perf_counter() - started

    result = FoldResult(
        fold=fold,
        n_train=train_set.n,
        n_test=test_set.n,
        n_features=train_set.n_features,
        selected_rb_rate=rb_rate,
        validation_f1=validation_f1,
        crs_f1=crs_f1,
        crs_simplified_f1=crs_simplified_f1,
        edges=edges,
        fallback_count=fallback_count,
        simplification=report.to_dict(),
        timings=timings,
    )

    if config.ablation:
        started = time.perf_counter()
        model_p0, crs_p0 = _train_and_extract(config, train_set, 0.0, derive_seed(config.seed, fold, grid_size + 1))
        result.mllp_p0_f1 = macro_f1(predict_argmax(model_p0, test_set.features), truths, test_set.n_classes)
        result.crs_p0_f1 = macro_f1(predict_batch(crs_p0, test_set.features), truths, test_set.n_classes)
        timings["ablation"] = time.perf_counter() - started

    logger.info(f"✅ fold {fold}: P={rb_rate:g}, CRS macro-F1 {100 * crs_f1:.2f}, "
                f"edges {edges['CRS_O']} -> {edges['CRS_DN&RR']}")
    return result


def _run_fold_with_context(args) -> FoldResult:
    config, data, fold, train_idx, test_idx, global_disc = args
    try:
        return _run_fold(config, data, fold, train_idx, test_idx, global_disc)
    except CRSError as err:
        raise type(err)(f"fold {fold}: {err}") from err


def run_experiment(config: ExperimentConfig, data: Optional[RawDataset] = None) -> ExperimentReport:
    """
    Runs the cross-validation and, when `config.output_dir` is set, writes the report files.

    `data` replaces reading `config.data_path`.
    """
    if data is None:
        if not config.data_path:
            raise ConfigError("data_path is required when no dataset is passed in")
        data = load_dataset(config.data_path, config.label_column, config.schema_path)

    label_order = [str(v) for v in pd.unique(data.labels)]
    global_disc = None
    if config.global_discretize:
        logger.warning("⚠️ Discretizing on the full table: test folds influence the cut points")
        global_disc = fit_discretizer(data, label_order=label_order)

    n_binary_features = None
    if config.dataset:
        # J is only compared on the full table; folds still fit their own cuts
        full_disc = global_disc or fit_discretizer(data, label_order=label_order)
        n_binary_features = full_disc.n_features
        check_dataset(config.dataset, data.n, len(label_order), len(data.feature_columns),
                      binary_features=n_binary_features)

    folds = stratified_kfold(data.labels.to_numpy(), config.folds, config.seed)

    jobs = [(config, data, fold, train_idx, test_idx, global_disc)
            for fold, (train_idx, test_idx) in enumerate(folds)]
    logger.info(f"🔹 Running {len(jobs)} folds on {data.n} rows (P grid {config.rb_grid}, jobs={config.jobs})")
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_fold_with_context, jobs))
    else:
        results = [_run_fold_with_context(job) for job in jobs]

    report = ExperimentReport(
        config=config.to_dict(),
        n_instances=data.n,
        n_classes=len(label_order),
        label_order=label_order,
        folds=results,
        n_binary_features=n_binary_features,
    )
    logger.info(f"✅ Mean CRS macro-F1 {100 * report.mean_crs_f1:.2f} over {len(results)} folds")
    if config.output_dir:
        write_report(report, config.output_dir)
    return report


def rb_grid_frame(report: ExperimentReport) -> pd.DataFrame:
    rows = [{"fold": f.fold, "rb_rate": float(rate), "validation_f1": 100 * score}
            for f in report.folds for rate, score in f.validation_f1.items()]
    return pd.DataFrame(rows, columns=["fold", "rb_rate", "validation_f1"])


def write_report(report: ExperimentReport, output_dir: Union[str, Path]) -> Dict[str, Path]:
    """report.json/.csv/.txt and rb_grid.csv are byte-stable for a seed; timings.json is not."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": output_dir / "report.json",
        "csv": output_dir / "report.csv",
        "txt": output_dir / "report.txt",
        "rb_grid": output_dir / "rb_grid.csv",
        "timings": output_dir / "timings.json",
    }

    dump_document({"header": document_header(FILE_TYPE_REPORT), "data": report.to_dict()}, paths["json"])
    report.to_frame().to_csv(paths["csv"], index=False)
    paths["txt"].write_text(report.to_text(), encoding="utf-8")
    rb_grid_frame(report).to_csv(paths["rb_grid"], index=False)
    dump_document({str(f.fold): f.timings for f in report.folds}, paths["timings"])

    logger.info(f"✅ Report written to {output_dir}")
    return paths
