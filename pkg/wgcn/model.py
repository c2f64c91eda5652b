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

"""
This module contains the graph convolutional network: an H-layer stack of

    H^k = relu(op @ H^(k-1) @ W_k)     (no relu on the last layer)

over a fixed sparse propagation operator, with H^0 = X. Gradients are derived by hand
for this architecture; all arithmetic is float64. The softmax of the output layer is
folded into the cross-entropy loss, so forward() returns logits.
"""

import collections

import numpy as np

from . import util

CHECKPOINT_VERSION = 1

ACTIVATIONS = ("relu", "none")
OPTIMIZERS = ("adam", "sgd")
MODES = ("train", "eval")

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8


class ModelParams:
    """The weight matrices W_1 ... W_H of a network. Layer k maps width d_(k-1) to
    d_k. Instances are immutable: optimizer steps return new parameters.
    """

    def __init__(self, weights):
        """Creates new parameters from a list of 2-D arrays whose widths chain."""
        weights = [np.array(weight, dtype=np.float64, copy=True) for weight in weights]
        if not weights:
            raise util.StructuralError("A network needs at least one layer.")
        for index, weight in enumerate(weights):
            if weight.ndim != 2:
                raise util.StructuralError(f"Weight {index} is not a matrix.")
            if index and weights[index - 1].shape[1] != weight.shape[0]:
                raise util.StructuralError(
                    f"Weight {index} has {weight.shape[0]} rows, but the previous "
                    f"layer outputs {weights[index - 1].shape[1]} columns."
                )
            weight.setflags(write=False)
        self._weights = tuple(weights)

    @property
    def weights(self):
        return self._weights

    @property
    def dims(self):
        """Returns the layer widths (d_0, ..., d_H)."""
        return (self._weights[0].shape[0],) + tuple(w.shape[1] for w in self._weights)

    def __len__(self):
        return len(self._weights)

    def __iter__(self):
        return iter(self._weights)

    def __getitem__(self, index):
        return self._weights[index]

    def __eq__(self, other):
        if not isinstance(other, ModelParams):
            return NotImplemented
        return len(self) == len(other) and all(
            np.array_equal(mine, theirs) for mine, theirs in zip(self, other)
        )

    __hash__ = None


class HyperParams(
    collections.namedtuple(
        "HyperParams",
        [
            "hidden_dims",
            "learning_rate",
            "epochs",
            "weight_decay",
            "dropout",
            "optimizer",
            "init_seed",
        ],
    )
):
    """The training hyperparameters of a network."""

    __slots__ = ()

    def __new__(
        cls,
        hidden_dims=(16,),
        learning_rate=0.01,
        epochs=200,
        weight_decay=5e-4,
        dropout=0.5,
        optimizer="adam",
        init_seed=0,
    ):
        hidden_dims = tuple(int(width) for width in hidden_dims)
        if any(width < 1 for width in hidden_dims):
            raise util.ParameterError("Hidden layer widths must be positive.")
        if not learning_rate > 0:
            raise util.ParameterError(
                f"learning_rate must be positive, got {learning_rate}."
            )
        if epochs < 1:
            raise util.ParameterError(f"epochs must be at least 1, got {epochs}.")
        if weight_decay < 0:
            raise util.ParameterError(
                f"weight_decay must be non-negative, got {weight_decay}."
            )
        if not 0 <= dropout < 1:
            raise util.ParameterError(
                f"dropout must satisfy 0 <= dropout < 1, got {dropout}."
            )
        if optimizer not in OPTIMIZERS:
            raise util.ParameterError(
                f"optimizer must be one of {', '.join(OPTIMIZERS)}, got '{optimizer}'."
            )
        return super().__new__(
            cls,
            hidden_dims,
            float(learning_rate),
            int(epochs),
            float(weight_decay),
            float(dropout),
            optimizer,
            init_seed,
        )

    def layer_dims(self, num_features, num_classes):
        """Returns (F_in, *hidden_dims, C)."""
        return (num_features,) + self.hidden_dims + (num_classes,)


class ForwardTrace:
    """The intermediate values of a forward pass, kept for backward(). inputs[k] is
    the (dropped-out) input of layer k, pre_activations[k] its output before the
    activation and masks[k] its dropout mask, or None.
    """

    def __init__(self, params, operator, keep):
        self.params = params
        self.operator = operator
        self.keep = keep
        self.inputs = []
        self.pre_activations = []
        self.activations = []
        self.masks = []


def relu(matrix):
    """Returns the elementwise max(0, x)."""
    return np.maximum(matrix, 0.0)


def _check_chain(operator, inputs, weight):
    if operator.shape[1] != inputs.shape[0] or inputs.shape[1] != weight.shape[0]:
        raise util.StructuralError(
            f"Cannot propagate {inputs.shape} features through an operator of shape "
            f"{operator.shape} and a weight of shape {weight.shape}."
        )


def layer_forward(operator, inputs, weight, activation="relu"):
    """Returns activation(operator @ inputs @ weight)."""
    if activation not in ACTIVATIONS:
        raise util.ParameterError(f"Unknown activation '{activation}'.")
    _check_chain(operator, inputs, weight)
    output = np.asarray(operator @ (inputs @ weight))
    return relu(output) if activation == "relu" else output


def softmax_rows(logits):
    """Returns the row-wise softmax of a matrix, computed with max subtraction."""
    logits = np.asarray(logits, dtype=np.float64)
    if np.isnan(logits).any():
        raise util.DomainError("Cannot take the softmax of NaN logits.")
    shifted = logits - logits.max(axis=1, keepdims=True)
    exponentials = np.exp(shifted)
    return exponentials / exponentials.sum(axis=1, keepdims=True)


def cross_entropy(probs, labels, mask):
    """Returns (loss, grad) for the mean categorical cross-entropy over the masked
    nodes, where grad is the gradient with respect to the logits the probabilities
    were computed from (zero on unmasked rows).
    """
    mask = np.asarray(mask, dtype=np.int64)
    if mask.size == 0:
        raise util.ParameterError("Cannot compute a loss over an empty node set.")
    targets = np.asarray(labels)[mask]
    if np.any(targets < 0):
        raise util.FormatError("Every node the loss is computed over needs a label.")
    with np.errstate(divide="ignore"):
        loss = -np.mean(np.log(probs[mask, targets]))
    grad = np.zeros_like(probs)
    grad[mask] = probs[mask]
    grad[mask, targets] -= 1.0
    grad[mask] /= mask.size
    return float(loss), grad


def forward(operator, features, params, hyper, mode="eval", rng=None):
    """Returns (logits, trace). In train mode, inverted dropout with keep probability
    1 - hyper.dropout is applied to the input of every layer, drawing from rng; eval
    mode applies no dropout and is a pure function of its arguments.
    """
    if mode not in MODES:
        raise util.ParameterError(
            f"mode must be one of {', '.join(MODES)}, got '{mode}'."
        )
    dropout = hyper.dropout if mode == "train" else 0.0
    if dropout and rng is None:
        raise util.ContractError("A random generator is needed for dropout.")
    keep = 1.0 - dropout
    trace = ForwardTrace(params, operator, keep)
    hidden = np.asarray(features, dtype=np.float64)
    last = len(params) - 1
    for index, weight in enumerate(params):
        mask = None
        if dropout:
            mask = rng.random(hidden.shape) < keep
            hidden = hidden * mask / keep
        trace.inputs.append(hidden)
        trace.masks.append(mask)
        _check_chain(operator, hidden, weight)
        output = np.asarray(operator @ (hidden @ weight))
        trace.pre_activations.append(output)
        hidden = output if index == last else relu(output)
        trace.activations.append(hidden)
    return hidden, trace


def backward(trace, grad_logits, operator, params, weight_decay=0.0):
    """Returns the gradients of the loss with respect to every weight matrix, given
    the gradient with respect to the logits and the trace of the forward pass that
    produced them. The L2 term weight_decay * W_k is included.
    """
    if trace.params is not params or trace.operator is not operator:
        raise util.ContractError("The trace was produced by a different forward pass.")
    if grad_logits.shape != trace.pre_activations[-1].shape:
        raise util.StructuralError(
            f"Expected a logit gradient of shape {trace.pre_activations[-1].shape}."
        )
    gradients = [None] * len(params)
    upstream = grad_logits
    transposed = operator.T
    for index in reversed(range(len(params))):
        propagated = np.asarray(transposed @ upstream)
        decay = weight_decay * params[index]
        gradients[index] = trace.inputs[index].T @ propagated + decay
        if index:
            grad_hidden = propagated @ params[index].T
            if trace.masks[index] is not None:
                grad_hidden = grad_hidden * trace.masks[index] / trace.keep
            upstream = grad_hidden * (trace.pre_activations[index - 1] > 0)
    return gradients


class OptimizerState(
    collections.namedtuple("OptimizerState", ["step", "first", "second"])
):
    """The step count and Adam moment estimates of an optimizer."""

    __slots__ = ()

    @classmethod
    def initial(cls, params):
        return cls(
            0,
            tuple(np.zeros_like(weight) for weight in params),
            tuple(np.zeros_like(weight) for weight in params),
        )


def optimizer_step(params, gradients, state, hyper):
    """Returns (params, state) after one Adam or SGD step. A state of None starts a
    new optimizer.
    """
    if len(gradients) != len(params) or any(
        grad.shape != weight.shape for grad, weight in zip(gradients, params)
    ):
        raise util.StructuralError("Gradients do not match the parameter shapes.")
    if state is None:
        state = OptimizerState.initial(params)
    rate = hyper.learning_rate
    if hyper.optimizer == "sgd":
        updated = [weight - rate * grad for weight, grad in zip(params, gradients)]
        return ModelParams(updated), state._replace(step=state.step + 1)
    step = state.step + 1
    first = tuple(
        ADAM_BETA1 * moment + (1 - ADAM_BETA1) * grad
        for moment, grad in zip(state.first, gradients)
    )
    second = tuple(
        ADAM_BETA2 * moment + (1 - ADAM_BETA2) * grad * grad
        for moment, grad in zip(state.second, gradients)
    )
    updated = []
    for weight, mean, variance in zip(params, first, second):
        corrected_mean = mean / (1 - ADAM_BETA1 ** step)
        corrected_variance = variance / (1 - ADAM_BETA2 ** step)
        scale = np.sqrt(corrected_variance) + ADAM_EPSILON
        updated.append(weight - rate * corrected_mean / scale)
    return ModelParams(updated), OptimizerState(step, first, second)


def init_params(dims, seed):
    """Returns Glorot-uniform parameters for the layer widths dims = (d_0, ..., d_H):
    every entry of W_k is drawn from U(-r, r) with r = sqrt(6 / (d_(k-1) + d_k)).
    """
    dims = tuple(int(width) for width in dims)
    if len(dims) < 2 or any(width < 1 for width in dims):
        raise util.ParameterError(f"Invalid layer widths {dims}.")
    rng = util.rng_stream(seed, util.INIT_STREAM)
    weights = []
    for fan_in, fan_out in zip(dims, dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
    return ModelParams(weights)


def save_checkpoint(path, params, seed, epoch):
    """Writes the parameters to an uncompressed .npz container holding
    format_version, dims, seed, epoch and the row-major float64 weights w0 ... w{H-1}.
    """
    payload = {f"w{index}": np.ascontiguousarray(w) for index, w in enumerate(params)}
    with open(path, "wb") as handle:
        np.savez(
            handle,
            format_version=np.int64(CHECKPOINT_VERSION),
            dims=np.asarray(params.dims, dtype=np.int64),
            seed=np.int64(seed),
            epoch=np.int64(epoch),
            **payload,
        )


def load_checkpoint(path):
    """Returns (params, metadata) read from a checkpoint written by save_checkpoint();
    metadata holds the seed and epoch.
    """
    try:
        with np.load(path, allow_pickle=False) as archive:
            version = int(archive["format_version"])
            if version != CHECKPOINT_VERSION:
                raise util.FormatError(f"Unsupported checkpoint version {version}.")
            dims = archive["dims"].tolist()
            weights = [archive[f"w{index}"] for index in range(len(dims) - 1)]
            metadata = {"seed": int(archive["seed"]), "epoch": int(archive["epoch"])}
    except (OSError, KeyError, ValueError) as ex:
        raise util.FormatError(f"{path}: not a valid checkpoint ({ex}).")
    params = ModelParams(weights)
    if list(params.dims) != dims:
        raise util.FormatError(f"{path}: the weights do not match the stored dims.")
    return params, metadata
