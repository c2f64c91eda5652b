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
This module contains the Graph class, an immutable attributed graph: a sparse
adjacency matrix together with node features, labels and the train/val/test masks.
It also contains the stochastic block model generator used to build synthetic test
graphs.
"""

import collections

import numpy as np
import scipy.sparse

from . import util

UNLABELED = -1


class Masks(collections.namedtuple("Masks", ["train", "val", "test"])):
    """The three disjoint node index sets used for training, model selection and
    reporting. Each is a sorted int64 array.
    """

    __slots__ = ()

    @classmethod
    def create(cls, train=(), val=(), test=()):
        """Returns masks built from any iterables of node ids."""
        return cls(*(_index_array(nodes) for nodes in (train, val, test)))

    def as_dict(self):
        return {"train": self.train, "val": self.val, "test": self.test}


def _index_array(nodes):
    array = np.unique(np.asarray(list(nodes), dtype=np.int64))
    array.setflags(write=False)
    return array


def _frozen(array):
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


class Graph:
    """An immutable attributed graph. Instances are safe to share between workers."""

    def __init__(
        self, adjacency, directed=False, features=None, labels=None, masks=None
    ):
        """Creates a new graph. Features default to an N x 0 matrix, labels to
        UNLABELED and masks to empty sets. Raises a DataError subclass if any graph
        invariant is violated.
        """
        adjacency = util.canonical(adjacency)
        num_nodes = adjacency.shape[0]
        if features is None:
            features = np.zeros((num_nodes, 0))
        if labels is None:
            labels = np.full(num_nodes, UNLABELED)
        if masks is None:
            masks = Masks.create()
        self._adjacency = adjacency
        self._directed = bool(directed)
        self._features = _frozen(np.asarray(features, dtype=np.float64))
        self._labels = _frozen(np.asarray(labels, dtype=np.int64))
        self._masks = Masks.create(*masks)
        self._validate()

    def _validate(self):
        adjacency = self._adjacency
        num_nodes, columns = adjacency.shape
        if num_nodes != columns:
            raise util.StructuralError(
                f"Adjacency must be square, got {adjacency.shape}."
            )
        if adjacency.nnz and (
            not np.all(np.isfinite(adjacency.data)) or adjacency.data.min() < 0
        ):
            raise util.DomainError("Edge weights must be finite and non-negative.")
        if adjacency.diagonal().any():
            raise util.StructuralError("Self-loops may not be stored in the adjacency.")
        if not self._directed and (adjacency != adjacency.T).nnz:
            raise util.StructuralError(
                "An undirected graph needs a symmetric adjacency."
            )
        if self._features.ndim != 2 or self._features.shape[0] != num_nodes:
            raise util.StructuralError(
                f"Feature matrix has shape {self._features.shape}, "
                f"expected {num_nodes} rows."
            )
        if self._labels.shape != (num_nodes,):
            raise util.StructuralError(f"Expected {num_nodes} labels.")
        if np.any(self._labels < UNLABELED):
            raise util.FormatError("Class ids must be non-negative.")
        seen = {}
        for name, mask in self._masks.as_dict().items():
            if mask.size and (mask.min() < 0 or mask.max() >= num_nodes):
                raise util.RangeError(
                    f"The {name} mask names a node outside [0, {num_nodes})."
                )
            for node in mask:
                if node in seen:
                    raise util.FormatError(
                        f"Node {node} is in both the {seen[node]} and {name} sets."
                    )
                seen[node] = name
        unlabeled = self._masks.train[self._labels[self._masks.train] == UNLABELED]
        if unlabeled.size:
            raise util.FormatError(f"Training node {unlabeled[0]} has no label.")

    @property
    def num_nodes(self):
        return self._adjacency.shape[0]

    @property
    def num_features(self):
        return self._features.shape[1]

    @property
    def num_classes(self):
        """Returns C, one more than the largest class id (0 if no node is labeled)."""
        return int(self._labels.max()) + 1 if self._labels.size else 0

    @property
    def directed(self):
        return self._directed

    @property
    def adjacency(self):
        """Returns a copy of the adjacency as CSR; rows are sources."""
        return self._adjacency.copy()

    @property
    def nnz(self):
        return self._adjacency.nnz

    @property
    def features(self):
        return self._features

    @property
    def labels(self):
        return self._labels

    @property
    def masks(self):
        return self._masks

    @property
    def indptr(self):
        return self._adjacency.indptr

    @property
    def indices(self):
        return self._adjacency.indices

    def neighbors(self, node):
        """Returns the out-neighbors of a node in ascending order."""
        start, end = self._adjacency.indptr[node], self._adjacency.indptr[node + 1]
        return self._adjacency.indices[start:end]

    def has_edge(self, source, target):
        return target in self.neighbors(source)

    def edges(self):
        """Returns the (source, target) pairs of the stored adjacency, row-major."""
        coo = self._adjacency.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist()))

    def with_data(self, features=None, labels=None, masks=None):
        """Returns a new graph with the same adjacency and the given node data; any
        argument left as None is kept from this graph.
        """
        return Graph(
            self._adjacency,
            self._directed,
            self._features if features is None else features,
            self._labels if labels is None else labels,
            self._masks if masks is None else masks,
        )

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        mine, theirs = self._adjacency, other._adjacency
        return (
            self._directed == other._directed
            and mine.shape == theirs.shape
            and np.array_equal(mine.indptr, theirs.indptr)
            and np.array_equal(mine.indices, theirs.indices)
            and np.array_equal(mine.data, theirs.data)
            and np.array_equal(self._features, other._features)
            and np.array_equal(self._labels, other._labels)
            and all(np.array_equal(a, b) for a, b in zip(self._masks, other._masks))
        )

    __hash__ = None

    def __repr__(self):
        kind = "directed" if self._directed else "undirected"
        return (
            f"Graph({kind}, nodes={self.num_nodes}, nnz={self.nnz}, "
            f"features={self.num_features}, classes={self.num_classes})"
        )


def normalize_features(features):
    """Returns the features with each row scaled to unit L1 norm. All-zero rows are
    left unchanged.
    """
    features = np.asarray(features, dtype=np.float64)
    norms = np.abs(features).sum(axis=1)
    scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    scale[norms == 0] = 1.0
    return features * scale[:, None]


def generate_sbm(n_per_block, blocks, p_in, p_out, feature_noise=0.0, seed=0):
    """Returns an undirected stochastic block model graph. Nodes are numbered block by
    block; the label of a node is its block and its features are the one-hot block
    indicator plus Gaussian noise of scale feature_noise. In every block, 10% of the
    nodes (at least one) are used for training, 10% for validation and the rest for
    testing. The result depends only on the arguments.
    """
    if n_per_block < 1 or blocks < 1:
        raise util.ParameterError("An SBM needs at least one block of one node.")
    if not 0 <= p_out < p_in <= 1:
        raise util.ParameterError(
            f"SBM probabilities must satisfy 0 <= p_out < p_in <= 1, got "
            f"p_in={p_in}, p_out={p_out}."
        )
    if feature_noise < 0:
        raise util.ParameterError("feature_noise must be non-negative.")
    rng = util.rng_stream(seed, util.SBM_STREAM)
    num_nodes = n_per_block * blocks
    block_of = np.repeat(np.arange(blocks), n_per_block)

    rows, cols = [], []
    for first in range(blocks):
        for second in range(first, blocks):
            probability = p_in if first == second else p_out
            draws = rng.random((n_per_block, n_per_block)) < probability
            if first == second:
                draws = np.triu(draws, k=1)
            source, target = np.nonzero(draws)
            rows.append(source + first * n_per_block)
            cols.append(target + second * n_per_block)
    rows, cols = np.concatenate(rows), np.concatenate(cols)
    upper = scipy.sparse.coo_matrix(
        (np.ones(rows.size), (rows, cols)), shape=(num_nodes, num_nodes)
    )
    adjacency = (upper + upper.T).tocsr()

    features = np.eye(blocks)[block_of]
    if feature_noise:
        features = features + feature_noise * rng.standard_normal(features.shape)

    share = max(1, int(round(0.1 * n_per_block)))
    train, val, test = [], [], []
    for block in range(blocks):
        order = rng.permutation(n_per_block) + block * n_per_block
        train.extend(order[:share])
        val.extend(order[share : 2 * share])
        test.extend(order[2 * share :])

    return Graph(adjacency, False, features, block_of, Masks.create(train, val, test))
