# crs_model.py
"""
The discrete Concept Rule Sets model.

Includes:
- `CrsModel`: Binary adjacency matrices, odd layers are rules (AND), even layers rule sets (OR).
- `crs_forward`, `crs_forward_batch`: Layer-wise Boolean representations.
- `predict`, `predict_batch`, `fallback_rows`: First firing output node wins, else the fallback class.
- `edge_count`: Number of 1-entries over all layers.
- `render_rules`, `render_model`, `rule_tree`: Human-readable and JSON views of the rules.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Set, Tuple
import logging

import numpy as np

# Logger Configuration
logger = logging.getLogger(__name__)

from .binarizer import FeatureDictionary
from .errors import ConfigError, DimensionError, NodeNotFoundError
from .logic_layers import LayerKind


@dataclass
class LayerRepresentation:
    h: np.ndarray
    layer_index: int


@dataclass
class CrsModel:
    layers: List[np.ndarray]  # W^(1) .. W^(2L), each n_l x n_{l-1}
    dictionary: Optional[FeatureDictionary] = None
    fallback_class: int = 0
    label_order: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.layers or len(self.layers) % 2:
            raise ConfigError(f"A CRS needs an even, non-zero number of logical layers, got {len(self.layers)}")
        converted = []
        for position, layer in enumerate(self.layers, start=1):
            layer = np.asarray(layer)
            if layer.ndim != 2:
                raise DimensionError(f"Layer {position} must be 2-D, got shape {layer.shape}")
            if not np.isin(layer, (0, 1)).all():
                raise ConfigError(f"Layer {position} holds non-binary entries")
            converted.append(layer.astype(np.uint8))
        self.layers = converted

        for position in range(1, len(self.layers)):
            if self.layers[position].shape[1] != self.layers[position - 1].shape[0]:
                raise DimensionError(f"Layer {position + 1} expects {self.layers[position].shape[1]} inputs, "
                                     f"layer {position} has {self.layers[position - 1].shape[0]} nodes")
        if self.dictionary is not None and len(self.dictionary) != self.n_features:
            raise DimensionError(f"Dictionary has {len(self.dictionary)} entries for {self.n_features} features")
        if self.label_order and len(self.label_order) != self.n_classes:
            raise DimensionError(f"{len(self.label_order)} class labels for {self.n_classes} output nodes")
        if not 0 <= self.fallback_class < self.n_classes:
            raise ConfigError(f"fallback_class {self.fallback_class} outside 0..{self.n_classes - 1}")

    @property
    def widths(self) -> List[int]:
        return [self.layers[0].shape[1], *(layer.shape[0] for layer in self.layers)]

    @property
    def n_features(self) -> int:
        return self.layers[0].shape[1]

    @property
    def n_classes(self) -> int:
        return self.layers[-1].shape[0]

    @property
    def depth(self) -> int:
        """2L, the number of logical layers."""
        return len(self.layers)

    def weights(self, layer: int) -> np.ndarray:
        """W^(layer) for 1-based `layer`."""
        return self.layers[layer - 1]

    def class_label(self, index: int) -> str:
        return self.label_order[index] if self.label_order else str(index)

    def copy(self) -> "CrsModel":
        return CrsModel([w.copy() for w in self.layers], self.dictionary, self.fallback_class, list(self.label_order))


def crs_forward_batch(crs: CrsModel, features: np.ndarray) -> List[np.ndarray]:
    """h^(0) .. h^(2L) for an N x J binary batch, each N x n_l over {0, 1}."""
    h = np.asarray(features)
    if h.ndim != 2 or h.shape[1] != crs.n_features:
        raise DimensionError(f"expected a batch with {crs.n_features} features, got shape {h.shape}")
    h = h.astype(np.int32)

    representations = [h.astype(np.uint8)]
    for position, w in enumerate(crs.layers, start=1):
        w = w.astype(np.int32)
        if LayerKind.for_layer(position) == LayerKind.CONJUNCTION:
            # AND: no connected input is 0 (empty rows give 1)
            h = ((1 - h) @ w.T == 0).astype(np.int32)
        else:
            # OR: some connected input is 1 (empty rows give 0)
            h = (h @ w.T > 0).astype(np.int32)
        representations.append(h.astype(np.uint8))
    return representations


def crs_forward(crs: CrsModel, x: np.ndarray) -> List[LayerRepresentation]:
    x = np.asarray(x)
    if x.ndim != 1 or len(x) != crs.n_features:
        raise DimensionError(f"expected {crs.n_features} features, got shape {x.shape}")
    return [LayerRepresentation(h[0], l) for l, h in enumerate(crs_forward_batch(crs, x[None, :]))]


def _decide(outputs: np.ndarray, fallback_class: int) -> np.ndarray:
    fired = outputs.any(axis=1)
    return np.where(fired, outputs.argmax(axis=1), fallback_class)


def predict_batch(crs: CrsModel, features: np.ndarray) -> np.ndarray:
    return _decide(crs_forward_batch(crs, features)[-1], crs.fallback_class)


def predict(crs: CrsModel, x: np.ndarray) -> int:
    """Smallest index of a firing output node; the fallback class when none fires."""
    return int(_decide(crs_forward(crs, x)[-1].h[None, :], crs.fallback_class)[0])


def fallback_rows(crs: CrsModel, features: np.ndarray) -> np.ndarray:
    """True for rows on which no output node fires."""
    return ~crs_forward_batch(crs, features)[-1].any(axis=1)


def edge_count(crs: CrsModel) -> int:
    return int(sum(int(w.sum()) for w in crs.layers))


def node_name(crs: CrsModel, layer: int, index: int) -> str:
    if layer == crs.depth:
        return f"class {crs.class_label(index)}"
    prefix = "R" if LayerKind.for_layer(layer) == LayerKind.CONJUNCTION else "S"
    return f"{prefix}{layer}.{index}"


def _check_node(crs: CrsModel, layer: int, index: int):
    if not 0 <= layer <= crs.depth:
        raise NodeNotFoundError(f"layer {layer} outside 0..{crs.depth}")
    if not 0 <= index < crs.widths[layer]:
        raise NodeNotFoundError(f"node {index} outside 0..{crs.widths[layer] - 1} in layer {layer}")


class _RuleRenderer:
    INDENT = "    "

    def __init__(self, crs: CrsModel, max_depth: Optional[int]):
        self.crs = crs
        self.max_depth = max_depth
        self.references: Set[Tuple[int, int]] = set()

    def condition(self, index: int) -> str:
        if self.crs.dictionary is None:
            return f"(x{index})"
        return f"({self.crs.dictionary[index].text})"

    def lines(self, layer: int, index: int, depth: int = 0) -> List[str]:
        if layer == 0:
            return [self.condition(index)]

        children = [int(j) for j in np.flatnonzero(self.crs.weights(layer)[index])]
        conjunction = LayerKind.for_layer(layer) == LayerKind.CONJUNCTION
        if not children:
            return ["TRUE" if conjunction else "FALSE"]
        if layer == 1:
            return ["IF " + " AND ".join(self.condition(j) for j in children)]

        joiner = "AND" if conjunction else "OR"
        result: List[str] = []
        for position, child in enumerate(children):
            if position:
                result.append(joiner)
            result.extend(self.child_block(layer - 1, child, depth + 1))
        return result

    def child_block(self, layer: int, index: int, depth: int) -> List[str]:
        if layer == 1:
            return self.lines(layer, index, depth)
        name = node_name(self.crs, layer, index)
        if self.max_depth is not None and depth > self.max_depth:
            self.references.add((layer, index))
            return [name]
        return [f"{name}:"] + [self.INDENT + line for line in self.lines(layer, index, depth)]


def render_rules(crs: CrsModel, node: Tuple[int, int], max_depth: Optional[int] = None) -> str:
    """
    Text of one node: a rule renders as `IF (c1) AND (c2)`, a rule set as its
    rules joined by `OR` lines, higher levels as named, indented blocks.

    Nodes nested deeper than `max_depth` levels are printed by name only.
    """
    layer, index = node
    _check_node(crs, layer, index)
    return "\n".join(_RuleRenderer(crs, max_depth).lines(layer, index))


def render_model(crs: CrsModel) -> str:
    """Every output class, then the definitions of the intermediate rule sets they name."""
    out = [f"# Concept Rule Sets: widths {crs.widths}, {edge_count(crs)} edges, "
           f"fallback class {crs.class_label(crs.fallback_class)}"]

    pending: List[Tuple[int, int]] = []
    seen: Set[Tuple[int, int]] = set()

    def emit(layer: int, index: int, title: str):
        renderer = _RuleRenderer(crs, max_depth=1)
        out.append("")
        out.append(title)
        out.extend(renderer.lines(layer, index))
        for reference in sorted(renderer.references):
            if reference not in seen:
                seen.add(reference)
                pending.append(reference)

    for index in range(crs.n_classes):
        emit(crs.depth, index, f"== {node_name(crs, crs.depth, index)} ==")

    while pending:
        pending.sort(key=lambda ref: (-ref[0], ref[1]))
        layer, index = pending.pop(0)
        emit(layer, index, f"== {node_name(crs, layer, index)} ==")

    return "\n".join(out) + "\n"


def rule_tree(crs: CrsModel) -> Dict[str, Any]:
    """
    Machine-readable rule graph of every node reachable from an output:
    `nodes[name] = {op, layer, index, children}` with `COND` leaves.
    """
    nodes: Dict[str, Dict[str, Any]] = {}

    def visit(layer: int, index: int) -> str:
        name = node_name(crs, layer, index) if layer else f"x{index}"
        if name in nodes:
            return name
        if layer == 0:
            text = crs.dictionary[index].text if crs.dictionary is not None else name
            nodes[name] = {"op": "COND", "layer": 0, "index": index, "condition": text}
            return name
        op = "AND" if LayerKind.for_layer(layer) == LayerKind.CONJUNCTION else "OR"
        nodes[name] = {"op": op, "layer": layer, "index": index, "children": []}
        nodes[name]["children"] = [visit(layer - 1, int(j)) for j in np.flatnonzero(crs.weights(layer)[index])]
        return name

    outputs = {crs.class_label(i): visit(crs.depth, i) for i in range(crs.n_classes)}
    return {
        "outputs": outputs,
        "fallback_class": crs.class_label(crs.fallback_class),
        "nodes": nodes,
    }
