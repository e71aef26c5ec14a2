# simplifier.py
"""
Reduces the complexity of an extracted CRS.

Includes:
- `detect_dead_nodes`, `remove_nodes`: Nodes on no input-to-output path, or never activated by training data.
- `subset`, `eliminate_redundant`: Edges to rules/rule sets dominated by a sibling with a subset of weights.
- `simplify`, `SimplificationReport`: Both passes iterated to a fixpoint.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Set, Tuple
import logging

import numpy as np

# Logger Configuration
logger = logging.getLogger(__name__)

from .binarizer import BinarizedDataset
from .crs_model import CrsModel, crs_forward_batch, edge_count
from .errors import ConfigError, DimensionError
from .logic_layers import LayerKind

NO_PATH = "no-path"
NEVER_ACTIVATED = "never-activated"

Node = Tuple[int, int]


@dataclass
class SimplificationReport:
    edges_before: int = 0
    edges_after: int = 0
    dead_nodes_removed: Dict[str, Dict[int, int]] = field(
        default_factory=lambda: {NO_PATH: {}, NEVER_ACTIVATED: {}})
    redundant_edges_removed: int = 0
    iterations: int = 0

    @property
    def total_dead_nodes(self) -> int:
        return sum(sum(per_layer.values()) for per_layer in self.dead_nodes_removed.values())

    def record_dead(self, dead: Dict[Node, str]):
        for (layer, _), cause in dead.items():
            per_layer = self.dead_nodes_removed[cause]
            per_layer[layer] = per_layer.get(layer, 0) + 1

    def to_dict(self):
        return {
            "edges_before": self.edges_before,
            "edges_after": self.edges_after,
            "dead_nodes_removed": {cause: {str(k): v for k, v in sorted(per_layer.items())}
                                   for cause, per_layer in self.dead_nodes_removed.items()},
            "redundant_edges_removed": self.redundant_edges_removed,
            "iterations": self.iterations,
        }

    def to_text(self) -> str:
        rows = [
            ("edges before", self.edges_before),
            ("edges after", self.edges_after),
            ("redundant edges removed", self.redundant_edges_removed),
        ]
        for cause, per_layer in self.dead_nodes_removed.items():
            for layer, count in sorted(per_layer.items()):
                rows.append((f"dead nodes ({cause}), layer {layer}", count))
        rows.append(("iterations", self.iterations))
        width = max(len(label) for label, _ in rows)
        return "\n".join(f"{label.ljust(width)}  {value:>8}" for label, value in rows) + "\n"


def _forward_reachable(crs: CrsModel) -> list:
    """Per layer, nodes connected to at least one input feature through edges."""
    reachable = [np.ones(crs.n_features, dtype=bool)]
    for w in crs.layers:
        reachable.append((w.astype(bool) & reachable[-1][None, :]).any(axis=1))
    return reachable


def _backward_reachable(crs: CrsModel) -> list:
    """Per layer, nodes with an edge path up to some output node."""
    reachable = [np.ones(crs.n_classes, dtype=bool)]
    for w in reversed(crs.layers):
        reachable.insert(0, (w.astype(bool) & reachable[0][:, None]).any(axis=0))
    return reachable


def detect_dead_nodes(crs: CrsModel, train: Optional[BinarizedDataset] = None) -> Dict[Node, str]:
    """
    Hidden nodes that can be deleted, mapped to their cause.

    no-path: the node cannot reach an output, or no input reaches it and its
    constant value is the identity of the next layer (a false rule under OR,
    a true rule set under AND). never-activated: with `train` given, the node
    is 0 on every training row.
    """
    dead: Dict[Node, str] = {}
    forward_ok = _forward_reachable(crs)
    backward_ok = _backward_reachable(crs)
    constants = crs_forward_batch(crs, np.zeros((1, crs.n_features), dtype=np.uint8))

    for layer in range(1, crs.depth):
        conjunction = LayerKind.for_layer(layer) == LayerKind.CONJUNCTION
        neutral = 0 if conjunction else 1
        for index in range(crs.widths[layer]):
            if not backward_ok[layer][index]:
                dead[(layer, index)] = NO_PATH
            elif not forward_ok[layer][index] and constants[layer][0, index] == neutral:
                dead[(layer, index)] = NO_PATH

    if train is not None:
        if train.n_features != crs.n_features:
            raise DimensionError(f"training data has {train.n_features} features, model {crs.n_features}")
        representations = crs_forward_batch(crs, train.features)
        for layer in range(1, crs.depth):
            for index in np.flatnonzero(~representations[layer].any(axis=0)):
                dead.setdefault((layer, int(index)), NEVER_ACTIVATED)

    return dead


def remove_nodes(crs: CrsModel, nodes) -> CrsModel:
    """Drops the nodes' rows in their layer and their columns in the next layer."""
    nodes: Set[Node] = set(nodes)
    for layer, index in nodes:
        if layer <= 0 or layer >= crs.depth:
            raise ConfigError(f"cannot remove node {index} of layer {layer}: input and output nodes are fixed")
        if not 0 <= index < crs.widths[layer]:
            raise ConfigError(f"node {index} does not exist in layer {layer}")
    if not nodes:
        return crs.copy()

    layers = [w.copy() for w in crs.layers]
    for layer in range(1, crs.depth):
        drop = sorted(index for l, index in nodes if l == layer)
        if drop:
            layers[layer - 1] = np.delete(layers[layer - 1], drop, axis=0)
            layers[layer] = np.delete(layers[layer], drop, axis=1)
    return CrsModel(layers, crs.dictionary, crs.fallback_class, list(crs.label_order))


def subset(row_i, row_j) -> int:
    """1 iff every position set in row_i is also set in row_j."""
    row_i, row_j = np.asarray(row_i), np.asarray(row_j)
    if row_i.shape != row_j.shape or row_i.ndim != 1:
        raise DimensionError(f"rows differ in shape: {row_i.shape} vs {row_j.shape}")
    return int(not np.any((row_i == 1) & (row_j == 0)))


def _dominance(previous: np.ndarray) -> np.ndarray:
    """D[k, j] = 1 when node k's weight row is a subset of node j's (k != j, lower index wins on equality)."""
    rows = previous.astype(np.int32)
    is_subset = (rows @ (1 - rows).T) == 0  # [k, j]: row k subset of row j
    identical = is_subset & is_subset.T
    n = len(rows)
    k_index, j_index = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return is_subset & (k_index != j_index) & ~(identical & (k_index > j_index))


def eliminate_redundant(crs: CrsModel) -> CrsModel:
    """
    For every layer l >= 2, drops edge (i, j) when node i also connects to a
    sibling k whose weight row is a subset of j's: k implies j under OR and j
    is implied by k under AND, so j adds nothing.
    """
    layers = [w.copy() for w in crs.layers]
    for layer in range(2, crs.depth + 1):
        dominance = _dominance(layers[layer - 2]).astype(np.int32)
        w = layers[layer - 1].astype(np.int32)
        redundant = (w @ dominance) > 0
        layers[layer - 1] = (w.astype(bool) & ~redundant).astype(np.uint8)
    return CrsModel(layers, crs.dictionary, crs.fallback_class, list(crs.label_order))


def simplify(crs: CrsModel, train: Optional[BinarizedDataset] = None,
             dead_nodes: bool = True, redundant: bool = True,
             structural_only: bool = False) -> Tuple[CrsModel, SimplificationReport]:
    """
    Alternates redundant-edge elimination and dead-node removal until neither
    changes the model. `structural_only` ignores `train` for dead nodes.
    """
    report = SimplificationReport(edges_before=edge_count(crs))
    activation_data = None if structural_only else train
    current = crs.copy()
    limit = sum(current.widths) + edge_count(current) + 1

    while report.iterations < limit:
        report.iterations += 1
        changed = False

        if redundant:
            reduced = eliminate_redundant(current)
            removed = edge_count(current) - edge_count(reduced)
            if removed:
                report.redundant_edges_removed += removed
                current = reduced
                changed = True

        if dead_nodes:
            dead = detect_dead_nodes(current, activation_data)
            if dead:
                report.record_dead(dead)
                current = remove_nodes(current, dead)
                changed = True

        if not changed:
            break

    report.edges_after = edge_count(current)
    logger.debug(f"🔹 Simplified {report.edges_before} -> {report.edges_after} edges "
                 f"in {report.iterations} iteration(s)")
    return current, report
