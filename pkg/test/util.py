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

import os

import numpy as np
import scipy.sparse

import wgcn

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


def data_path(*parts):
    return os.path.join(DATA_DIR, *parts)


def adjacency(edges, num_nodes, directed=False):
    """Returns the unit-weight CSR adjacency of an edge list."""
    sources = [u for u, _ in edges]
    targets = [v for _, v in edges]
    if not directed:
        sources, targets = sources + targets, targets + sources
    matrix = scipy.sparse.coo_matrix(
        (
            np.ones(len(sources)),
            (np.asarray(sources, dtype=np.int64), np.asarray(targets, dtype=np.int64)),
        ),
        shape=(num_nodes, num_nodes),
    ).tocsr()
    matrix.data[:] = 1.0
    return matrix


def graph(edges, num_nodes, directed=False, **node_data):
    return wgcn.Graph(adjacency(edges, num_nodes, directed), directed, **node_data)


def star(leaves):
    """Node 0 is the center."""
    return graph([(0, leaf) for leaf in range(1, leaves + 1)], leaves + 1)


def random_graph(rng, num_nodes, probability, directed=False):
    draws = rng.random((num_nodes, num_nodes)) < probability
    np.fill_diagonal(draws, False)
    if not directed:
        draws = np.triu(draws, k=1)
    return graph(list(zip(*np.nonzero(draws))), num_nodes, directed)


def loader(**files):
    """Returns an in-memory stand-in for a FileLoader."""
    files = {name.replace("_", "."): text for name, text in files.items()}
    return {name: (text, name) for name, text in files.items()}
