# cli.py
"""
Command-line entry point, `crs <subcommand>`.

Includes:
- `build_parser`: Subcommands discretize, train, extract, simplify, predict, eval,
  export-rules and experiment.
- `main`: Runs one subcommand and maps package errors onto exit codes.
"""

import argparse
import json
from pathlib import Path
import sys
from typing import List, Optional
import logging

import pandas as pd

# Logger Configuration
logger = logging.getLogger(__name__)

from .binarizer import binarize, binarize_features, fit_discretizer
from .crs_core import RB_GRID, ExitCodes, ExperimentDefaults, TrainDefaults
from .crs_model import fallback_rows, predict_batch, render_model, render_rules, rule_tree
from .data_loader import load_dataset, prepare_frame, read_table
from .errors import ConfigError, DataError, DimensionError, NodeNotFoundError, NumericError
from .experiment import ExperimentConfig, run_experiment
from .metrics import macro_f1
from .mllp import init_model
from .model_store import load_crs, load_discretizer, load_mllp, save_crs, save_discretizer, save_mllp
from .simplifier import simplify
from .train_attributes import TrainConfig, build_layer_widths
from .trainer import extract_crs, majority_class, train, write_training_log


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from err


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from err


def _node(text: str):
    try:
        layer, index = text.split(":")
        return int(layer), int(index)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected LAYER:INDEX, got {text!r}") from err


def _add_data_args(parser: argparse.ArgumentParser, required: bool = True):
    parser.add_argument("--data", required=required, help="Table to read (.csv, .tsv, .data, .parquet).")
    parser.add_argument("--label-col", dest="label_col", required=required, help="Name of the class column.")
    parser.add_argument("--schema", help="JSON file mapping column -> continuous|categorical|label|ignore.")


def _add_train_args(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("training")
    group.add_argument("--layers", type=int, default=TrainDefaults.LOGICAL_LAYERS,
                       help="Number of logical layers 2L (even).")
    group.add_argument("--hidden", type=_int_list, help="Middle-layer widths, one value or one per layer.")
    group.add_argument("--epochs", type=int, default=TrainDefaults.EPOCHS)
    group.add_argument("--batch", type=int, default=TrainDefaults.BATCH_SIZE)
    group.add_argument("--lr", type=float, default=TrainDefaults.LR)
    group.add_argument("--lr-decay", dest="lr_decay", type=float, default=TrainDefaults.LR_DECAY_FACTOR)
    group.add_argument("--lr-decay-every", dest="lr_decay_every", type=int, default=TrainDefaults.LR_DECAY_EVERY)
    group.add_argument("--weight-decay", dest="weight_decay", type=float, default=TrainDefaults.WEIGHT_DECAY)
    group.add_argument("--threshold", type=float, default=TrainDefaults.THRESHOLD)
    group.add_argument("--momentum", type=float, default=TrainDefaults.MOMENTUM)
    group.add_argument("--seed", type=int, default=TrainDefaults.SEED)


def _train_overrides(args) -> dict:
    return {
        "epochs": args.epochs,
        "batch_size": args.batch,
        "lr": args.lr,
        "lr_decay_factor": args.lr_decay,
        "lr_decay_every": args.lr_decay_every,
        "weight_decay": args.weight_decay,
        "threshold": args.threshold,
        "momentum": args.momentum,
    }


def cmd_discretize(args) -> int:
    data = load_dataset(args.data, args.label_col, args.schema)
    disc = fit_discretizer(data)
    save_discretizer(disc, args.out)
    for entry in disc.dictionary.entries:
        print(f"{entry.index:>5}  {entry.text}")
    if disc.dropped_columns:
        print(f"dropped: {', '.join(disc.dropped_columns)}")
    return ExitCodes.OK


def cmd_train(args) -> int:
    data = load_dataset(args.data, args.label_col, args.schema)
    disc = load_discretizer(args.discretizer) if args.discretizer else fit_discretizer(data)
    train_set = binarize(data, disc)
    if train_set.n_features == 0:
        raise DataError("no binary features left after discretization")

    widths = build_layer_widths(train_set.n_features, train_set.n_classes, args.layers, args.hidden)
    config = TrainConfig(layer_widths=widths, rb_rate=args.rb_rate, seed=args.seed, **_train_overrides(args))
    history = []
    model = train(init_model(config), train_set, config, history=history, log_crs=args.log_crs)
    save_mllp(model, args.out, disc, extra={"majority_class": majority_class(train_set)})
    if args.log:
        write_training_log(history, args.log)
    print(f"trained MLLP {widths}, final loss {history[-1].mean_loss:.6f}" if history
          else f"initialized MLLP {widths}")
    return ExitCodes.OK


def cmd_extract(args) -> int:
    stored = load_mllp(args.model)
    model, disc = stored.model, stored.discretizer
    crs = extract_crs(
        model,
        threshold=args.threshold,
        dictionary=disc.dictionary if disc else None,
        fallback_class=int(stored.extra.get("majority_class", 0)),
        label_order=disc.label_order if disc else None,
    )
    save_crs(crs, args.out, disc)
    print(render_model(crs), end="")
    return ExitCodes.OK


def cmd_simplify(args) -> int:
    stored = load_crs(args.model)
    crs, disc = stored.model, stored.discretizer
    train_set = None
    if args.data:
        if disc is None:
            raise DataError(f"{args.model} carries no discretizer; cannot binarize {args.data}")
        train_set = binarize(load_dataset(args.data, args.label_col or disc.label_column, args.schema), disc)

    simplified, report = simplify(crs, train_set, dead_nodes=not args.no_dead_nodes,
                                  redundant=not args.no_redundant, structural_only=args.structural_only)
    save_crs(simplified, args.out, disc, extra={**stored.extra, "simplification": report.to_dict()})
    print(report.to_text(), end="")
    if args.report_csv:
        rows = [{"metric": k, "value": v} for k, v in report.to_dict().items() if not isinstance(v, dict)]
        rows += [{"metric": f"dead_nodes_{cause}_layer_{layer}", "value": count}
                 for cause, per_layer in report.dead_nodes_removed.items()
                 for layer, count in sorted(per_layer.items())]
        pd.DataFrame(rows).to_csv(args.report_csv, index=False)
    return ExitCodes.OK


def _features_for(stored, data_path: str):
    disc = stored.discretizer
    if disc is None:
        raise DataError("the model carries no discretizer; cannot read raw data")
    frame = read_table(data_path)
    missing = [c for c in disc.columns if c not in frame.columns]
    if missing:
        raise DataError(f"Columns {missing} expected by the discretizer are missing")
    nulls = frame[disc.columns].isna().sum()
    if nulls.any():
        raise DataError(f"Missing values are not supported: {nulls[nulls > 0].to_dict()}")
    frame = prepare_frame(frame, {c: disc.kinds[c] for c in disc.columns})
    return binarize_features(frame, disc)


def cmd_predict(args) -> int:
    stored = load_crs(args.model)
    crs = stored.model
    features = _features_for(stored, args.data)
    predictions = [crs.class_label(int(p)) for p in predict_batch(crs, features)]
    fallbacks = fallback_rows(crs, features)
    if fallbacks.any():
        logger.warning(f"⚠️ {int(fallbacks.sum())} row(s) matched no rule and got the fallback class")

    out = pd.DataFrame({"prediction": predictions, "fallback": fallbacks.astype(int)})
    if args.out:
        out.to_csv(args.out, index=False)
        logger.info(f"✅ Predictions saved to {args.out}")
    else:
        out.to_csv(sys.stdout, index=False)
    return ExitCodes.OK


def cmd_eval(args) -> int:
    if not args.data:
        raise ConfigError("--data is required")
    stored = load_crs(args.model)
    crs, disc = stored.model, stored.discretizer
    if disc is None:
        raise DataError("the model carries no discretizer; cannot read raw data")
    data = binarize(load_dataset(args.data, args.label_col or disc.label_column, args.schema), disc)
    predictions = predict_batch(crs, data.features)
    score = macro_f1(predictions, data.label_ids, data.n_classes)
    fallbacks = int(fallback_rows(crs, data.features).sum())
    print(f"instances   {data.n}")
    print(f"macro-F1    {100 * score:.2f}")
    print(f"fallbacks   {fallbacks}")
    return ExitCodes.OK


def cmd_export_rules(args) -> int:
    crs = load_crs(args.model).model
    if args.format == "json":
        text = json.dumps(rule_tree(crs), indent=2, ensure_ascii=False) + "\n"
    elif args.node:
        text = render_rules(crs, args.node, args.max_depth) + "\n"
    else:
        text = render_model(crs)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        logger.info(f"✅ Rules written to {args.out}")
    else:
        print(text, end="")
    return ExitCodes.OK


def cmd_experiment(args) -> int:
    if not args.data:
        raise ConfigError("--data is required")
    config = ExperimentConfig(
        data_path=args.data,
        label_column=args.label_col,
        schema_path=args.schema,
        dataset=args.dataset,
        folds=args.folds,
        validation_fraction=args.validation_fraction,
        rb_grid=args.rb_grid,
        train=_train_overrides(args),
        logical_layers=args.layers,
        hidden=args.hidden,
        global_discretize=args.global_discretize,
        structural_only=args.structural_only,
        ablation=args.ablation,
        output_dir=args.out,
        seed=args.seed,
        jobs=args.jobs,
    )
    report = run_experiment(config)
    print(report.to_text(), end="")
    return ExitCodes.OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crs", description="Learn, simplify and evaluate Concept Rule Sets.")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("-v", "--verbose", action="store_true", help="Shortcut for --log-level DEBUG.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discretize", help="Fit cut points and write the discretizer.")
    _add_data_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("train", help="Train an MLLP with Random Binarization.")
    _add_data_args(p)
    _add_train_args(p)
    p.add_argument("--rb-rate", dest="rb_rate", type=float, default=TrainDefaults.RB_RATE)
    p.add_argument("--discretizer", help="Reuse a saved discretizer instead of fitting one.")
    p.add_argument("--log", help="Per-epoch training log (CSV).")
    p.add_argument("--log-crs", dest="log_crs", action="store_true",
                   help="Also log the extracted CRS training macro-F1 every epoch.")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("extract", help="Binarize a trained MLLP into a CRS.")
    p.add_argument("--model", required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("simplify", help="Remove dead nodes and redundant edges.")
    p.add_argument("--model", required=True)
    _add_data_args(p, required=False)
    p.add_argument("--structural-only", dest="structural_only", action="store_true")
    p.add_argument("--no-dead-nodes", dest="no_dead_nodes", action="store_true")
    p.add_argument("--no-redundant", dest="no_redundant", action="store_true")
    p.add_argument("--report-csv", dest="report_csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("predict", help="Classify the rows of a table.")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="Macro-F1 of a CRS on a labelled table.")
    p.add_argument("--model", required=True)
    _add_data_args(p, required=False)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export-rules", help="Print the rules of a CRS.")
    p.add_argument("--model", required=True)
    p.add_argument("--node", type=_node, help="LAYER:INDEX of a single node.")
    p.add_argument("--max-depth", dest="max_depth", type=int)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_rules)

    p = sub.add_parser("experiment", help="Cross-validated evaluation with a P grid search.")
    _add_data_args(p, required=False)
    _add_train_args(p)
    p.add_argument("--dataset", help="Manifest name; supplies the label column.")
    p.add_argument("--folds", type=int, default=ExperimentDefaults.FOLDS)
    p.add_argument("--validation-fraction", dest="validation_fraction", type=float,
                   default=ExperimentDefaults.VALIDATION_FRACTION)
    p.add_argument("--rb-grid", dest="rb_grid", type=_float_list, default=list(RB_GRID))
    p.add_argument("--global-discretize", dest="global_discretize", action="store_true")
    p.add_argument("--structural-only", dest="structural_only", action="store_true")
    p.add_argument("--ablation", action="store_true", help="Also report MLLP(P=0) and CRS(P=0).")
    p.add_argument("--jobs", type=int, default=ExperimentDefaults.JOBS)
    p.add_argument("--out", help="Directory for report.json/.csv/.txt, rb_grid.csv and timings.json.")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, NodeNotFoundError) as err:
        logger.error(f"❌ {err}")
        return ExitCodes.CONFIG_ERROR
    except (DataError, DimensionError) as err:
        logger.error(f"❌ {err}")
        return ExitCodes.DATA_ERROR
    except NumericError as err:
        logger.error(f"❌ {err}")
        return ExitCodes.NUMERIC_FAILURE


if __name__ == "__main__":
    sys.exit(main())
