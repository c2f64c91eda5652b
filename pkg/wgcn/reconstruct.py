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
This module builds the reconstructed propagation operator of a graph. Random walks
credit their root with a weight that decays geometrically with the position of each
visited node; the resulting walk matrix is mixed into the adjacency and the mixture
is normalized symmetrically:

    operator = D^-1/2 (I + A + lambda * W) D^-1/2,  D_ii = 1 + sum_j (A + lambda * W)_ij

With no walks (or lambda = 0) the operator is the usual renormalized GCN adjacency.
"""

import collections
import logging

import numpy as np
import scipy.sparse

from . import file_loader, transformer, util

logger = logging.getLogger(__name__)


class ReconConfig(
    collections.namedtuple("ReconConfig", ["alpha", "lam", "symmetrize"])
):
    """The reconstruction parameters: the decay rate alpha in (0, 1), the mixing
    coefficient lam >= 0 and whether the walk matrix is symmetrized before mixing.
    """

    __slots__ = ()

    def __new__(cls, alpha=0.8, lam=0.9, symmetrize=True):
        if not 0 < alpha < 1:
            raise util.ParameterError(f"alpha must satisfy 0 < alpha < 1, got {alpha}.")
        if lam < 0:
            raise util.ParameterError(f"lambda must be non-negative, got {lam}.")
        return super().__new__(cls, float(alpha), float(lam), bool(symmetrize))


def build_walk_matrix(walks, alpha, num_nodes=None):
    """Returns the walk matrix of a WalkSet: for every walk rooted at v, the node at
    position l (counting the root as position 1) adds alpha^(l-1) to entry (v, node).
    Contributions accumulate over walks and repeat visits.
    """
    if not 0 < alpha < 1:
        raise util.ParameterError(f"alpha must satisfy 0 < alpha < 1, got {alpha}.")
    if num_nodes is None:
        num_nodes = len(walks)
    rows, cols, values = [], [], []
    longest = max((len(walk) for walk in walks.all_walks()), default=1)
    decay = alpha ** np.arange(longest)
    for walk in walks.all_walks():
        rows.extend([walk[0]] * (len(walk) - 1))
        cols.extend(walk[1:])
        values.extend(decay[1 : len(walk)])
    matrix = scipy.sparse.coo_matrix(
        (
            np.asarray(values, dtype=np.float64),
            (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)),
        ),
        shape=(num_nodes, num_nodes),
    )
    return util.canonical(matrix)


def _check_square(name, matrix, size=None):
    rows, columns = matrix.shape
    if rows != columns or (size is not None and rows != size):
        raise util.StructuralError(f"The {name} has incompatible shape {matrix.shape}.")


def mix(adjacency, walk_matrix, lam, symmetrize=True):
    """Returns adjacency + lam * W, where W is the walk matrix, averaged with its
    transpose if symmetrize is set. With lam = 0 or an empty walk matrix the result
    equals the adjacency exactly.
    """
    _check_square("adjacency", adjacency)
    _check_square("walk matrix", walk_matrix, adjacency.shape[0])
    if lam < 0:
        raise util.ParameterError(f"lambda must be non-negative, got {lam}.")
    if lam == 0 or walk_matrix.nnz == 0:
        return util.canonical(adjacency)
    walk_matrix = util.canonical(walk_matrix)
    if symmetrize:
        walk_matrix = (walk_matrix + walk_matrix.T) * 0.5
    return util.canonical(adjacency + lam * walk_matrix)


def sym_normalize(matrix):
    """Returns D^-1/2 (I + M) D^-1/2 for a non-negative sparse matrix M, where D is the
    diagonal matrix of the row sums of I + M. Every node keeps a positive diagonal
    entry, so isolated nodes are well-defined.
    """
    matrix = util.canonical(matrix)
    _check_square("matrix", matrix)
    if matrix.nnz and (not np.all(np.isfinite(matrix.data)) or matrix.data.min() < 0):
        raise util.DomainError(
            "Symmetric normalization needs finite, non-negative entries."
        )
    identity = scipy.sparse.identity(matrix.shape[0], dtype=np.float64, format="csr")
    renormalized = identity + matrix
    degrees = np.asarray(renormalized.sum(axis=1)).ravel()
    scale = scipy.sparse.diags(1.0 / np.sqrt(degrees))
    return util.canonical(scale @ renormalized @ scale)


def sparsity_bound(graph, num_walks, walk_length, symmetrize=False):
    """Returns the largest number of nonzeros a reconstructed operator can have:
    nnz(A) + |V| * T * (L - 1) walk entries + |V| diagonal entries. Symmetrizing
    the walk matrix can add the transpose of every walk entry, doubling that term.
    """
    walk_entries = graph.num_nodes * num_walks * max(walk_length - 1, 0)
    if symmetrize:
        walk_entries *= 2
    return graph.nnz + walk_entries + graph.num_nodes


def reconstruct(graph, walks, config):
    """Returns the normalized reconstructed operator of the graph for the given walks
    and ReconConfig.
    """
    walk_matrix = build_walk_matrix(walks, config.alpha, graph.num_nodes)
    mixed = mix(graph.adjacency, walk_matrix, config.lam, config.symmetrize)
    operator = sym_normalize(mixed)
    logger.info(
        "Reconstructed operator: nnz(A)=%d, nnz(walks)=%d, nnz(operator)=%d.",
        graph.nnz,
        walk_matrix.nnz,
        operator.nnz,
    )
    return operator


def format_matrix(matrix):
    """Yields the lines of the coordinate-list dump of a sparse matrix: a "# nodes: N"
    header, then "row col value" with 12 significant digits, sorted by row and column.
    """
    matrix = util.canonical(matrix)
    yield f"# nodes: {matrix.shape[0]}"
    coo = matrix.tocoo()
    for row, col, value in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
        yield f"{row} {col} {value:.12g}"


def write_matrix(matrix, path):
    """Writes the coordinate-list dump of the matrix to the given path."""
    with open(path, "w", encoding="utf-8") as handle:
        for line in format_matrix(matrix):
            handle.write(line + "\n")


def read_matrix(text, path="<string>"):
    """Returns the sparse matrix described by the text of a coordinate-list dump."""
    records = file_loader.parse_records(text, transformer.MatrixTransformer, path)
    size = records.num_nodes
    if size is None:
        size = 1 + max((max(row, col) for row, col, _ in records.records), default=-1)
    rows, cols, values = zip(*records.records) if records.records else ((), (), ())
    if any(index >= size for index in rows + cols):
        raise util.RangeError(
            f"{path}: an entry lies outside the {size} x {size} matrix."
        )
    matrix = scipy.sparse.coo_matrix(
        (
            np.asarray(values, dtype=np.float64),
            (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)),
        ),
        shape=(size, size),
    )
    return util.canonical(matrix)
