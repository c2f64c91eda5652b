#!/usr/bin/python
#
# Copyright 2026 The wgcn Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import numpy as np
import pytest
import scipy.sparse

import wgcn
from wgcn import model

from .util import random_graph


@pytest.fixture
def instance():
    rng = np.random.default_rng(21)
    g = random_graph(rng, 8, 0.4)
    operator = wgcn.sym_normalize(g.adjacency)
    features = rng.standard_normal((8, 4))
    labels = rng.integers(0, 3, size=8)
    return operator, features, labels, np.arange(6)


def _loss(operator, features, labels, mask, params, hyper, dropout_seed=None):
    rng = None if dropout_seed is None else np.random.default_rng(dropout_seed)
    mode = "eval" if dropout_seed is None else "train"
    logits, trace = model.forward(operator, features, params, hyper, mode, rng)
    loss, grad = model.cross_entropy(model.softmax_rows(logits), labels, mask)
    loss += 0.5 * hyper.weight_decay * sum(np.sum(w * w) for w in params)
    return loss, grad, trace


def _numeric_gradients(instance, params, hyper, dropout_seed=None, step=1e-5):
    gradients = []
    for index, weight in enumerate(params):
        numeric = np.zeros_like(weight)
        for position in np.ndindex(weight.shape):
            losses = []
            for sign in (1, -1):
                perturbed = [np.array(w) for w in params]
                perturbed[index][position] += sign * step
                loss, _, _ = _loss(
                    *instance, model.ModelParams(perturbed), hyper, dropout_seed
                )
                losses.append(loss)
            numeric[position] = (losses[0] - losses[1]) / (2 * step)
        gradients.append(numeric)
    return gradients


def _analytic_gradients(instance, params, hyper, dropout_seed=None):
    operator = instance[0]
    _, grad, trace = _loss(*instance, params, hyper, dropout_seed)
    return model.backward(trace, grad, operator, params, hyper.weight_decay)


def test_relu():
    assert model.relu(np.array([[-1.0, 2.0]])).tolist() == [[0.0, 2.0]]
    assert model.relu(np.zeros((2, 3))).tolist() == np.zeros((2, 3)).tolist()

    matrix = np.random.default_rng(0).standard_normal((5, 4))
    assert np.array_equal(model.relu(matrix), matrix * (matrix > 0))


def test_layer_forward_identity():
    inputs = np.random.default_rng(1).standard_normal((3, 3))

    operator = scipy.sparse.identity(3, format="csr")
    output = model.layer_forward(operator, inputs, np.eye(3), "none")

    assert np.array_equal(output, inputs)


def test_layer_forward_pair():
    operator = scipy.sparse.csr_matrix(np.array([[0.5, 0.5], [0.5, 0.5]]))

    output = model.layer_forward(operator, np.array([[2.0], [0.0]]), np.array([[1.0]]))

    assert output.tolist() == [[1.0], [1.0]]


def test_layer_forward_dense_oracle():
    rng = np.random.default_rng(2)
    dense = rng.random((5, 5)) * (rng.random((5, 5)) < 0.5)
    inputs, weight = rng.standard_normal((5, 3)), rng.standard_normal((3, 2))

    output = model.layer_forward(scipy.sparse.csr_matrix(dense), inputs, weight, "none")

    assert np.allclose(output, dense @ inputs @ weight, rtol=0, atol=1e-12)


def test_layer_forward_mismatch():
    with pytest.raises(wgcn.StructuralError):
        model.layer_forward(scipy.sparse.identity(3), np.ones((3, 2)), np.ones((3, 2)))


def test_softmax_rows():
    probs = model.softmax_rows(np.array([[0.0, 0.0], [1000.0, 0.0]]))

    assert probs[0].tolist() == [0.5, 0.5]
    assert probs[1, 0] == 1.0
    assert probs[1, 1] == pytest.approx(0.0, abs=1e-300)


def test_softmax_rows_proportional():
    probs = model.softmax_rows(np.array([[1.0, 2.0, 3.0]]))[0]

    expected = np.exp([1.0, 2.0, 3.0]) / np.exp([1.0, 2.0, 3.0]).sum()
    assert np.allclose(probs, expected, rtol=1e-14, atol=0)


def test_softmax_rows_properties():
    logits = np.random.default_rng(3).standard_normal((10, 4)) * 20

    probs = model.softmax_rows(logits)
    shifted = model.softmax_rows(logits + np.arange(10)[:, None] * 7.5)

    assert np.all(probs >= 0)
    assert np.allclose(probs.sum(axis=1), 1.0, rtol=0, atol=1e-12)
    assert np.allclose(probs, shifted, rtol=0, atol=1e-9)


def test_softmax_rows_nan():
    with pytest.raises(wgcn.DomainError):
        model.softmax_rows(np.array([[np.nan, 0.0]]))


def test_cross_entropy_onehot():
    loss, _ = model.cross_entropy(np.array([[0.0, 1.0], [1.0, 0.0]]), [1, 0], [0, 1])

    assert loss == 0.0


def test_cross_entropy_uniform():
    loss, grad = model.cross_entropy(np.array([[0.5, 0.5], [0.5, 0.5]]), [0, 1], [0])

    assert loss == pytest.approx(np.log(2))
    assert grad.tolist() == [[-0.5, 0.5], [0.0, 0.0]]


def test_cross_entropy_gradient():
    rng = np.random.default_rng(4)
    logits = rng.standard_normal((6, 3))
    labels, mask = rng.integers(0, 3, size=6), np.array([0, 2, 3, 5])
    step = 1e-6

    _, grad = model.cross_entropy(model.softmax_rows(logits), labels, mask)

    numeric = np.zeros_like(logits)
    for position in np.ndindex(logits.shape):
        losses = []
        for sign in (1, -1):
            perturbed = logits.copy()
            perturbed[position] += sign * step
            probs = model.softmax_rows(perturbed)
            losses.append(model.cross_entropy(probs, labels, mask)[0])
        numeric[position] = (losses[0] - losses[1]) / (2 * step)
    assert np.allclose(grad, numeric, rtol=1e-6, atol=1e-9)


def test_cross_entropy_empty_mask():
    with pytest.raises(wgcn.ParameterError):
        model.cross_entropy(np.array([[0.5, 0.5]]), [0], [])


def test_cross_entropy_unlabeled_node():
    with pytest.raises(wgcn.FormatError):
        model.cross_entropy(np.array([[0.5, 0.5]]), [wgcn.UNLABELED], [0])


def test_forward_dropout_zero(instance):
    operator, features, _, _ = instance
    params = model.init_params((4, 5, 3), 0)
    hyper = model.HyperParams(dropout=0.0)

    trained, _ = model.forward(operator, features, params, hyper, "train")
    evaluated, _ = model.forward(operator, features, params, hyper, "eval")

    assert np.array_equal(trained, evaluated)


def test_forward_two_layer_gcn(instance):
    operator, features, _, _ = instance
    params = model.init_params((4, 5, 3), 1)
    dense = operator.toarray()

    logits, trace = model.forward(operator, features, params, model.HyperParams())

    hidden = np.maximum(dense @ features @ params[0], 0)
    assert np.allclose(logits, dense @ hidden @ params[1], rtol=0, atol=1e-12)
    assert np.array_equal(trace.inputs[0], features)


def test_forward_dropout_deterministic(instance):
    operator, features, _, _ = instance
    params = model.init_params((4, 5, 3), 2)
    hyper = model.HyperParams(dropout=0.5)

    first, second = (
        model.forward(operator, features, params, hyper, "train", rng)
        for rng in (np.random.default_rng(9), np.random.default_rng(9))
    )

    assert np.array_equal(first[0], second[0])
    for mine, theirs in zip(first[1].masks, second[1].masks):
        assert np.array_equal(mine, theirs)


def test_forward_dropout_needs_generator(instance):
    operator, features, _, _ = instance
    params = model.init_params((4, 5, 3), 2)
    hyper = model.HyperParams(dropout=0.5)

    with pytest.raises(wgcn.ContractError):
        model.forward(operator, features, params, hyper, "train")


def test_forward_eval_is_pure(instance):
    operator, features, _, _ = instance
    params = model.init_params((4, 5, 3), 3)
    hyper = model.HyperParams()

    first, _ = model.forward(operator, features, params, hyper)
    second, _ = model.forward(operator, features, params, hyper)

    assert np.array_equal(first, second)


def test_forward_permutation_equivariance(instance):
    operator, features, _, _ = instance
    params = model.init_params((4, 6, 3), 4)
    permutation = np.random.default_rng(5).permutation(8)
    permuted = operator[permutation][:, permutation]

    logits, _ = model.forward(operator, features, params, model.HyperParams())
    permuted_logits, _ = model.forward(
        permuted, features[permutation], params, model.HyperParams()
    )

    assert np.allclose(permuted_logits, logits[permutation], rtol=0, atol=1e-12)


@pytest.mark.parametrize("dims", [(4, 5, 3), (4, 6, 5, 3)])
def test_backward_matches_finite_differences(instance, dims):
    params = model.init_params(dims, 6)
    hyper = model.HyperParams(weight_decay=0.0)

    analytic = _analytic_gradients(instance, params, hyper)
    numeric = _numeric_gradients(instance, params, hyper)

    for mine, theirs in zip(analytic, numeric):
        assert np.allclose(mine, theirs, rtol=1e-4, atol=1e-7)


def test_backward_with_dropout(instance):
    params = model.init_params((4, 5, 3), 7)
    hyper = model.HyperParams(dropout=0.3, weight_decay=0.0)

    analytic = _analytic_gradients(instance, params, hyper, dropout_seed=8)
    numeric = _numeric_gradients(instance, params, hyper, dropout_seed=8)

    for mine, theirs in zip(analytic, numeric):
        assert np.allclose(mine, theirs, rtol=1e-4, atol=1e-7)


def test_backward_weight_decay(instance):
    params = model.init_params((4, 5, 3), 9)
    hyper = model.HyperParams(weight_decay=0.05)

    analytic = _analytic_gradients(instance, params, hyper)
    numeric = _numeric_gradients(instance, params, hyper)

    for mine, theirs in zip(analytic, numeric):
        assert np.allclose(mine, theirs, rtol=1e-4, atol=1e-7)


def _random_instance(seed):
    rng = np.random.default_rng(100 + seed)
    num_nodes = int(rng.integers(3, 11))
    num_features = int(rng.integers(1, 5))
    num_classes = int(rng.integers(2, 5))
    layers = int(rng.integers(2, 4))
    g = random_graph(rng, num_nodes, float(rng.uniform(0.1, 0.6)))
    operator = wgcn.sym_normalize(g.adjacency)
    features = rng.standard_normal((num_nodes, num_features))
    labels = rng.integers(0, num_classes, size=num_nodes)
    mask = np.sort(rng.choice(num_nodes, int(rng.integers(1, num_nodes + 1)), False))
    hidden = tuple(int(width) for width in rng.integers(2, 6, size=layers - 1))
    hyper = model.HyperParams(
        hidden_dims=hidden,
        dropout=float(rng.choice([0.0, 0.3])),
        weight_decay=float(rng.choice([0.0, 0.05])),
    )
    dims = hyper.layer_dims(num_features, num_classes)
    params = model.init_params(dims, seed)
    dropout_seed = seed if hyper.dropout else None
    return (operator, features, labels, mask), params, hyper, dropout_seed


@pytest.mark.parametrize("seed", range(50))
def test_backward_matches_finite_differences_random(seed):
    instance, params, hyper, dropout_seed = _random_instance(seed)

    analytic = _analytic_gradients(instance, params, hyper, dropout_seed)
    numeric = _numeric_gradients(instance, params, hyper, dropout_seed)

    for mine, theirs in zip(analytic, numeric):
        assert np.allclose(mine, theirs, rtol=1e-4, atol=1e-7)


def test_backward_zero_gradient(instance):
    operator, features, _, _ = instance
    params = model.init_params((4, 5, 3), 10)
    logits, trace = model.forward(operator, features, params, model.HyperParams())

    gradients = model.backward(trace, np.zeros_like(logits), operator, params)

    assert all(not gradient.any() for gradient in gradients)


def test_backward_stale_trace(instance):
    operator, features, _, _ = instance
    params = model.init_params((4, 5, 3), 11)
    logits, trace = model.forward(operator, features, params, model.HyperParams())
    other = model.init_params((4, 5, 3), 11)

    with pytest.raises(wgcn.ContractError):
        model.backward(trace, np.zeros_like(logits), operator, other)


def test_optimizer_sgd():
    hyper = model.HyperParams(learning_rate=0.1, optimizer="sgd")
    params = model.ModelParams([[[1.0]]])

    updated, _ = model.optimizer_step(params, [np.array([[2.0]])], None, hyper)
    unchanged, _ = model.optimizer_step(params, [np.zeros((1, 1))], None, hyper)

    assert updated[0][0, 0] == pytest.approx(0.8)
    assert unchanged == params


def test_optimizer_adam_first_step():
    hyper = model.HyperParams(learning_rate=0.01)
    params = model.ModelParams([[[1.0, -2.0]]])

    gradients = [np.array([[3.0, -0.5]])]
    updated, state = model.optimizer_step(params, gradients, None, hyper)

    assert state.step == 1
    assert updated[0][0].tolist() == pytest.approx([0.99, -1.99], rel=1e-6)


def test_optimizer_adam_recurrence():
    hyper = model.HyperParams(learning_rate=0.1)
    params = model.ModelParams([[[0.5]]])
    gradients = [2.0, -1.0]

    state, weight, first, second = None, 0.5, 0.0, 0.0
    for step, gradient in enumerate(gradients, 1):
        step_gradients = [np.array([[gradient]])]
        params, state = model.optimizer_step(params, step_gradients, state, hyper)
        first = 0.9 * first + 0.1 * gradient
        second = 0.999 * second + 0.001 * gradient ** 2
        corrected = first / (1 - 0.9 ** step), second / (1 - 0.999 ** step)
        weight -= 0.1 * corrected[0] / (np.sqrt(corrected[1]) + 1e-8)

    assert params[0][0, 0] == pytest.approx(weight, rel=1e-12)


def test_optimizer_shape_mismatch():
    params = model.init_params((2, 2), 0)

    with pytest.raises(wgcn.StructuralError):
        model.optimizer_step(params, [np.zeros((2, 3))], None, model.HyperParams())


def test_loss_decreases(instance):
    operator, features, labels, mask = instance
    hyper = model.HyperParams(learning_rate=0.01, dropout=0.0, weight_decay=0.0)
    params, state = model.init_params((4, 16, 3), 12), None
    losses = []

    for _ in range(10):
        loss, grad, trace = _loss(operator, features, labels, mask, params, hyper)
        losses.append(loss)
        gradients = model.backward(trace, grad, operator, params)
        params, state = model.optimizer_step(params, gradients, state, hyper)

    assert losses[1] < losses[0]
    assert losses[-1] < losses[0]


def test_init_params():
    params = model.init_params((4, 3), 13)

    assert params == model.init_params((4, 3), 13)
    assert params.dims == (4, 3)
    assert np.all(np.abs(params[0]) <= np.sqrt(6 / 7))


def test_init_params_mean():
    params = model.init_params((300, 334), 14)

    limit = np.sqrt(6 / 634)
    sigma = limit / np.sqrt(3 * params[0].size)
    assert abs(params[0].mean()) <= 3 * sigma


def test_init_params_invalid():
    with pytest.raises(wgcn.ParameterError):
        model.init_params((4,), 0)


def test_model_params_chain():
    with pytest.raises(wgcn.StructuralError):
        model.ModelParams([np.ones((2, 3)), np.ones((2, 2))])


def test_model_params_immutable():
    params = model.init_params((2, 2), 0)

    with pytest.raises(ValueError):
        params[0][0, 0] = 1.0


def test_hyper_params_ranges():
    with pytest.raises(wgcn.ParameterError):
        model.HyperParams(learning_rate=0.0)
    with pytest.raises(wgcn.ParameterError):
        model.HyperParams(dropout=1.0)
    with pytest.raises(wgcn.ParameterError):
        model.HyperParams(optimizer="rmsprop")


def test_checkpoint_round_trip(tmp_path):
    params = model.init_params((4, 8, 3), 15)
    path = str(tmp_path / "params.npz")

    model.save_checkpoint(path, params, seed=15, epoch=42)
    loaded, metadata = model.load_checkpoint(path)

    assert loaded == params
    assert metadata == {"seed": 15, "epoch": 42}


def test_checkpoint_invalid(tmp_path):
    path = tmp_path / "params.npz"
    path.write_bytes(b"not a checkpoint")

    with pytest.raises(wgcn.FormatError):
        model.load_checkpoint(str(path))
