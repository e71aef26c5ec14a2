# test_mllp.py

import numpy as np
import pytest

from ConceptRuleSets.crs_model import crs_forward_batch
from ConceptRuleSets.errors import ConfigError, DimensionError
from ConceptRuleSets.logic_layers import LayerKind, WeightMatrix
from ConceptRuleSets.mllp import (
    MaskSet,
    MllpModel,
    backward,
    effective_weights,
    forward,
    forward_batch,
    init_model,
    loss,
    sample_masks,
)
from ConceptRuleSets.train_attributes import TrainConfig
from ConceptRuleSets.trainer import extract_crs

from conftest import all_binary_inputs, model_from_layers, random_crs


def test_init_is_deterministic_and_small():
    config = TrainConfig([4, 8, 8, 8, 2], seed=3)
    first, second = init_model(config), init_model(config)
    for a, b in zip(first.weight_values(), second.weight_values()):
        assert np.array_equal(a, b)
        assert a.min() >= 0.0 and a.max() < 0.1
    assert init_model(config.replace(seed=4)).weight_values()[0].tolist() != first.weight_values()[0].tolist()


def test_init_shapes_and_kinds():
    model = init_model(TrainConfig([4, 8, 8, 8, 2]))
    assert [layer.shape for layer in model.layers] == [(8, 4), (8, 8), (8, 8), (2, 8)]
    assert [layer.kind for layer in model.layers] == [
        LayerKind.CONJUNCTION, LayerKind.DISJUNCTION, LayerKind.CONJUNCTION, LayerKind.DISJUNCTION]
    assert model.widths == [4, 8, 8, 8, 2]


def test_invalid_widths_are_rejected():
    with pytest.raises(ConfigError):
        init_model(TrainConfig([4, 8, 8, 2]))
    with pytest.raises(ConfigError):
        TrainConfig([4, 0, 2])


def test_weights_must_match_the_config():
    layers = [WeightMatrix(np.zeros((3, 4)), LayerKind.CONJUNCTION, 1),
              WeightMatrix(np.zeros((2, 3)), LayerKind.DISJUNCTION, 2)]
    with pytest.raises(DimensionError):
        MllpModel(layers, TrainConfig([4, 5, 2]))


def test_masks_at_the_extremes():
    model = init_model(TrainConfig([6, 8, 3]))
    rng = np.random.default_rng(0)
    assert all(not mask.any() for mask in sample_masks(model, 0.0, rng).masks)
    assert all(mask.all() for mask in sample_masks(model, 1.0, rng).masks)
    with pytest.raises(ConfigError):
        sample_masks(model, 1.5, rng)


def test_mask_rate_concentrates():
    model = init_model(TrainConfig([100, 100, 2]))
    masks = sample_masks(model, 0.8, np.random.default_rng(42))
    entries = sum(mask.size for mask in masks.masks)
    ones = sum(int(mask.sum()) for mask in masks.masks)
    assert entries >= 10000
    assert 0.78 <= ones / entries <= 0.82


def test_effective_weights_examples():
    w = np.array([[0.7, 0.3]])
    assert effective_weights(w, np.array([[1, 1]]), 0.5).tolist() == [[1.0, 0.0]]
    assert effective_weights(w, np.array([[0, 0]]), 0.5).tolist() == [[0.7, 0.3]]
    assert effective_weights(w, np.array([[1, 0]]), 0.5).tolist() == [[1.0, 0.3]]
    with pytest.raises(DimensionError):
        effective_weights(w, np.array([[1, 0, 1]]), 0.5)


def test_loss_examples():
    model = model_from_layers([np.zeros((2, 2)), np.zeros((2, 2))])
    labels = np.array([[1.0, 0.0]])
    assert loss(labels, labels, model, 0.0) == 0.0
    assert loss(np.array([[0.5, 0.5]]), labels, model, 0.0) == pytest.approx(0.25)
    assert loss(labels, labels, model, 0.1) == 0.0
    with pytest.raises(DimensionError):
        loss(np.array([[0.5]]), labels, model, 0.0)


def test_empty_first_layer_row_outputs_one():
    model = model_from_layers([np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([[1.0, 0.0]])])
    result = forward_batch(model, np.array([[0.0, 0.0]]))
    assert result.activations[1][0].tolist() == [1.0, 0.0]
    assert forward(model, None, np.array([0.0, 0.0])).tolist() == [1.0]


def test_outputs_stay_in_unit_interval():
    model = init_model(TrainConfig([6, 10, 10, 10, 3], seed=1))
    rng = np.random.default_rng(1)
    for layer in model.layers:
        layer.values[:] = rng.uniform(size=layer.shape)
    out = forward_batch(model, rng.integers(0, 2, size=(40, 6))).output
    assert out.shape == (40, 3)
    assert np.all((out >= 0.0) & (out <= 1.0))


def test_forward_rejects_wrong_feature_count():
    model = init_model(TrainConfig([4, 8, 2]))
    with pytest.raises(DimensionError):
        forward(model, None, np.ones(5))


def test_binary_mllp_matches_discrete_evaluation():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        n_features = int(rng.integers(1, 11))
        widths = [n_features, *(int(v) for v in rng.integers(1, 7, size=3)), int(rng.integers(1, 4))]
        crs = random_crs(rng, widths, density=float(rng.uniform(0.1, 0.6)))
        model = model_from_layers([w.astype(float) for w in crs.layers])
        inputs = all_binary_inputs(n_features)
        continuous = forward_batch(model, inputs).output
        assert np.array_equal(continuous, crs_forward_batch(crs, inputs)[-1].astype(float))


def test_full_masks_match_discrete_evaluation():
    rng = np.random.default_rng(5)
    model = init_model(TrainConfig([5, 6, 6, 6, 2], seed=5))
    for layer in model.layers:
        layer.values[:] = rng.uniform(size=layer.shape)
    masks = MaskSet([np.ones(layer.shape, dtype=np.uint8) for layer in model.layers], 1.0)
    inputs = all_binary_inputs(5)
    crs = extract_crs(model)
    assert np.array_equal(forward_batch(model, inputs, masks).output,
                          crs_forward_batch(crs, inputs)[-1].astype(float))


def test_backward_matches_finite_differences():
    rng = np.random.default_rng(17)
    model = init_model(TrainConfig([5, 4, 4, 4, 2], seed=17))
    for layer in model.layers:
        layer.values[:] = rng.uniform(0.05, 0.95, size=layer.shape)
    features = rng.integers(0, 2, size=(6, 5)).astype(float)
    labels = np.eye(2)[rng.integers(0, 2, size=6)]
    weight_decay = 0.01

    def objective():
        return loss(forward_batch(model, features).output, labels, model, weight_decay)

    grads = backward(model, forward_batch(model, features), labels, None, weight_decay)
    step = 1e-6
    for layer, grad in zip(model.layers, grads):
        numeric = np.zeros_like(grad)
        for index in np.ndindex(grad.shape):
            original = layer.values[index]
            layer.values[index] = original + step
            plus = objective()
            layer.values[index] = original - step
            minus = objective()
            layer.values[index] = original
            numeric[index] = (plus - minus) / (2 * step)
        assert np.allclose(grad, numeric, rtol=1e-4, atol=1e-8)


def test_masked_entries_get_zero_gradient():
    model = init_model(TrainConfig([4, 6, 2], seed=2))
    rng = np.random.default_rng(2)
    masks = sample_masks(model, 0.5, rng)
    features = rng.integers(0, 2, size=(8, 4))
    labels = np.eye(2)[rng.integers(0, 2, size=8)]
    grads = backward(model, forward_batch(model, features, masks), labels, masks, 0.1)
    for grad, mask in zip(grads, masks.masks):
        assert np.all(grad[mask == 1] == 0.0)
