# test_crs_model.py

import numpy as np
import pytest

from ConceptRuleSets.binarizer import FeatureCondition, FeatureDictionary, binarize_features, fit_discretizer
from ConceptRuleSets.crs_model import (
    CrsModel,
    crs_forward,
    crs_forward_batch,
    edge_count,
    fallback_rows,
    predict,
    predict_batch,
    render_model,
    render_rules,
    rule_tree,
)
from ConceptRuleSets.data_loader import dataset_from_frame
from ConceptRuleSets.errors import ConfigError, DimensionError, NodeNotFoundError

from conftest import all_binary_inputs, random_crs


@pytest.fixture
def wine_dictionary():
    return FeatureDictionary([
        FeatureCondition(0, "x", "x < 2.5", "interval", high=2.5),
        FeatureCondition(1, "color", "color = red", "equals", category="red"),
        FeatureCondition(2, "color", "color = blue", "equals", category="blue"),
    ])


@pytest.fixture
def one_level(wine_dictionary):
    layers = [np.array([[1, 1, 0], [0, 0, 1], [0, 0, 0]]),
              np.array([[1, 1, 0], [0, 0, 0]])]
    return CrsModel(layers, wine_dictionary, fallback_class=1, label_order=["yes", "no"])


def naive_output(crs, x):
    h = list(x)
    for layer, w in enumerate(crs.layers, start=1):
        if layer % 2:
            h = [int(all(h[j] for j in np.flatnonzero(row))) for row in w]
        else:
            h = [int(any(h[j] for j in np.flatnonzero(row))) for row in w]
    return h


def test_single_level_forward():
    crs = CrsModel([np.array([[1, 1]]), np.array([[1]])])
    assert crs_forward(crs, np.array([1, 1]))[-1].h.tolist() == [1]
    assert crs_forward(crs, np.array([1, 0]))[-1].h.tolist() == [0]
    representations = crs_forward(crs, np.array([1, 1]))
    assert [r.layer_index for r in representations] == [0, 1, 2]


def test_forward_matches_naive_evaluation():
    rng = np.random.default_rng(31)
    for _ in range(20):
        n_features = int(rng.integers(1, 7))
        widths = [n_features, *(int(v) for v in rng.integers(1, 6, size=3)), 2]
        crs = random_crs(rng, widths)
        inputs = all_binary_inputs(n_features)
        outputs = crs_forward_batch(crs, inputs)[-1]
        for x, out in zip(inputs, outputs):
            assert out.tolist() == naive_output(crs, x)


def test_empty_rows_follow_and_or_conventions(one_level):
    representations = crs_forward(one_level, np.array([0, 0, 0]))
    assert representations[1].h.tolist() == [0, 0, 1]
    assert representations[2].h.tolist() == [0, 0]


def test_predict_takes_first_firing_output():
    identity = np.eye(3, dtype=np.uint8)
    crs = CrsModel([identity, identity], fallback_class=2)
    assert predict(crs, np.array([0, 1, 0])) == 1
    assert predict(crs, np.array([1, 1, 0])) == 0
    assert predict(crs, np.array([0, 0, 0])) == 2
    batch = np.array([[0, 1, 0], [1, 1, 0], [0, 0, 0]])
    assert predict_batch(crs, batch).tolist() == [1, 0, 2]
    assert fallback_rows(crs, batch).tolist() == [False, False, True]


def test_edge_count():
    assert edge_count(CrsModel([np.array([[1, 1]]), np.array([[1]])])) == 3
    assert edge_count(CrsModel([np.zeros((4, 3)), np.zeros((2, 4))])) == 0


def test_model_validation(wine_dictionary):
    with pytest.raises(ConfigError):
        CrsModel([np.ones((2, 3))])
    with pytest.raises(ConfigError):
        CrsModel([np.full((2, 3), 0.5), np.ones((1, 2))])
    with pytest.raises(DimensionError):
        CrsModel([np.ones((2, 3)), np.ones((1, 4))])
    with pytest.raises(ConfigError):
        CrsModel([np.ones((2, 3)), np.ones((2, 2))], fallback_class=2)
    with pytest.raises(DimensionError):
        CrsModel([np.ones((2, 4)), np.ones((2, 2))], wine_dictionary)
    with pytest.raises(DimensionError):
        CrsModel([np.ones((2, 3)), np.ones((2, 2))], label_order=["only"])


def test_forward_rejects_wrong_width(one_level):
    with pytest.raises(DimensionError):
        crs_forward(one_level, np.array([1, 0]))
    with pytest.raises(DimensionError):
        predict_batch(one_level, np.ones((2, 4)))


def test_render_rule(one_level):
    assert render_rules(one_level, (1, 0)) == "IF (x < 2.5) AND (color = red)"
    assert render_rules(one_level, (1, 2)) == "TRUE"
    assert render_rules(one_level, (0, 2)) == "(color = blue)"


def test_render_rule_set(one_level):
    assert render_rules(one_level, (2, 0)) == "IF (x < 2.5) AND (color = red)\nOR\nIF (color = blue)"
    assert render_rules(one_level, (2, 1)) == "FALSE"


def test_render_without_dictionary():
    crs = CrsModel([np.array([[1, 0, 1]]), np.array([[1]])])
    assert render_rules(crs, (2, 0)) == "IF (x0) AND (x2)"


def test_render_nested_levels():
    layers = [np.array([[1, 0], [0, 1]]), np.array([[1, 0], [1, 1]]),
              np.array([[1, 1]]), np.array([[1], [0]])]
    crs = CrsModel(layers, label_order=["a", "b"])
    assert render_rules(crs, (3, 0)).splitlines() == [
        "S2.0:",
        "    IF (x0)",
        "AND",
        "S2.1:",
        "    IF (x0)",
        "    OR",
        "    IF (x1)",
    ]
    assert render_rules(crs, (4, 0), max_depth=0) == "R3.0"


def test_unknown_node_is_reported(one_level):
    with pytest.raises(NodeNotFoundError):
        render_rules(one_level, (3, 0))
    with pytest.raises(NodeNotFoundError):
        render_rules(one_level, (1, 5))


def test_render_model(one_level):
    text = render_model(one_level)
    lines = text.splitlines()
    assert lines[0] == "# Concept Rule Sets: widths [3, 3, 2], 5 edges, fallback class no"
    assert "== class yes ==" in lines
    assert "== class no ==" in lines
    assert text.endswith("\n")


def test_render_model_defines_referenced_nodes():
    layers = [np.array([[1, 0], [0, 1]]), np.array([[1, 0], [1, 1]]),
              np.array([[1, 1]]), np.array([[1], [0]])]
    text = render_model(CrsModel(layers, label_order=["a", "b"]))
    lines = text.splitlines()
    assert "R3.0:" in lines
    assert "== S2.0 ==" in lines and "== S2.1 ==" in lines


def test_rule_tree(one_level):
    tree = rule_tree(one_level)
    assert tree["outputs"] == {"yes": "class yes", "no": "class no"}
    assert tree["fallback_class"] == "no"
    assert tree["nodes"]["class yes"]["children"] == ["R1.0", "R1.1"]
    assert tree["nodes"]["class no"] == {"op": "OR", "layer": 2, "index": 1, "children": []}
    assert tree["nodes"]["R1.0"] == {"op": "AND", "layer": 1, "index": 0, "children": ["x0", "x1"]}
    assert tree["nodes"]["x2"]["condition"] == "color = blue"
    assert "R1.2" not in tree["nodes"]


def tree_truth(tree, name, row, dictionary):
    """Truth of a `rule_tree` node, reading the raw row through the dictionary conditions."""
    node = tree["nodes"][name]
    if node["op"] == "COND":
        condition = dictionary[node["index"]]
        assert condition.text == node["condition"]
        return condition.holds(row[condition.column])
    children = [tree_truth(tree, child, row, dictionary) for child in node["children"]]
    return all(children) if node["op"] == "AND" else any(children)


def rule_text_truth(text, row, by_text):
    if text == "TRUE":
        return True
    truths = []
    for condition in text.removeprefix("IF ").split(" AND "):
        entry = by_text[condition[1:-1]]
        truths.append(entry.holds(row[entry.column]))
    return all(truths)


def test_rendered_rules_agree_with_the_forward_pass(continuous_frame):
    data = dataset_from_frame(continuous_frame, "class")
    disc = fit_discretizer(data)
    features = binarize_features(data.frame, disc)
    by_text = {entry.text: entry for entry in disc.dictionary.entries}
    rng = np.random.default_rng(5)

    for _ in range(20):
        layers = random_crs(rng, [disc.n_features, 6, 4, 5, 3], density=0.3).layers
        crs = CrsModel(layers, disc.dictionary)
        tree = rule_tree(crs)
        for i in range(data.n):
            row = data.frame.iloc[i]
            reps = crs_forward(crs, features[i])
            for name, node in tree["nodes"].items():
                if node["op"] != "COND":
                    assert tree_truth(tree, name, row, disc.dictionary) == bool(reps[node["layer"]].h[node["index"]])
            for index in range(crs.widths[1]):
                text = render_rules(crs, (1, index))
                assert rule_text_truth(text, row, by_text) == bool(reps[1].h[index])
