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
This module generates the uniform random walks used to reconstruct a graph. A walk
is a tuple of node ids starting at its root, where each successor is drawn uniformly
from the out-neighbors of the current node. The walk length L counts nodes, root
included, and a walk stops early only at a node without out-neighbors.

Every walk draws from its own random stream, derived from (seed, root, walk index),
so a WalkSet does not depend on the order or the number of processes it was
generated with.
"""

import concurrent.futures
import logging

from . import util

logger = logging.getLogger(__name__)


class WalkSet:
    """The walks rooted at every node of a graph, num_walks per node."""

    def __init__(self, walks, num_walks, walk_length):
        """Creates a new walk set. walks[v] lists the walks (tuples) rooted at v."""
        self.walks = [list(node_walks) for node_walks in walks]
        self.num_walks = num_walks
        self.walk_length = walk_length

    def __getitem__(self, node):
        return self.walks[node]

    def __len__(self):
        return len(self.walks)

    def __eq__(self, other):
        if not isinstance(other, WalkSet):
            return NotImplemented
        return (self.num_walks, self.walk_length, self.walks) == (
            other.num_walks,
            other.walk_length,
            other.walks,
        )

    __hash__ = None

    def all_walks(self):
        """Yields every walk, grouped by root in ascending order."""
        for node_walks in self.walks:
            yield from node_walks

    def total_walks(self):
        return sum(len(node_walks) for node_walks in self.walks)

    def lines(self):
        """Yields the walks in the dump format: space-separated node ids."""
        for walk in self.all_walks():
            yield " ".join(str(node) for node in walk)

    def write(self, path):
        """Writes the walks to the given path, one walk per line."""
        with open(path, "w", encoding="utf-8") as handle:
            for line in self.lines():
                handle.write(line + "\n")


def _walk(indptr, indices, start, walk_length, rng, distinct_steps):
    if distinct_steps:
        return _distinct_walk(indptr, indices, start, walk_length, rng)
    walk = [start]
    while len(walk) < walk_length:
        begin, end = indptr[walk[-1]], indptr[walk[-1] + 1]
        if begin == end:
            break
        walk.append(int(indices[begin + rng.integers(end - begin)]))
    return tuple(walk)


def _distinct_walk(indptr, indices, start, walk_length, rng):
    # steps may pass through visited nodes; only first visits are recorded
    walk, seen, current = [start], {start}, start
    for _ in range(4 * walk_length):
        if len(walk) == walk_length:
            break
        begin, end = indptr[current], indptr[current + 1]
        if begin == end:
            break
        current = int(indices[begin + rng.integers(end - begin)])
        if current not in seen:
            seen.add(current)
            walk.append(current)
    return tuple(walk)


def random_walk(graph, start, walk_length, rng, distinct_steps=False):
    """Returns a uniform random walk of at most walk_length nodes rooted at start,
    drawing from the given numpy Generator. Revisits are allowed unless
    distinct_steps is set; then the walk keeps stepping, through visited nodes too,
    until walk_length distinct nodes are recorded or 4 * walk_length steps are
    taken. Only first visits are recorded, in the order they happen.
    """
    if not 0 <= start < graph.num_nodes:
        raise util.ParameterError(f"Start node {start} is not in the graph.")
    if walk_length < 1:
        raise util.ParameterError("The walk length must be at least 1.")
    return _walk(graph.indptr, graph.indices, start, walk_length, rng, distinct_steps)


def _walk_chunk(indptr, indices, nodes, num_walks, walk_length, seed, distinct_steps):
    return [
        [
            _walk(
                indptr,
                indices,
                node,
                walk_length,
                util.rng_stream(seed, util.WALK_STREAM, node, index),
                distinct_steps,
            )
            for index in range(num_walks)
        ]
        for node in nodes
    ]


def generate_walks(graph, num_walks, walk_length, seed, distinct_steps=False, jobs=1):
    """Returns a WalkSet with num_walks walks rooted at every node. Nodes without
    out-neighbors get num_walks single-node walks. With jobs > 1 the nodes are split
    into contiguous chunks walked in separate processes; the result is identical.
    """
    if num_walks < 0:
        raise util.ParameterError("The number of walks per node must be non-negative.")
    if walk_length < 1:
        raise util.ParameterError("The walk length must be at least 1.")
    if seed < 0:
        raise util.ParameterError("The seed must be non-negative.")
    indptr, indices = graph.indptr, graph.indices
    nodes = range(graph.num_nodes)
    args = (num_walks, walk_length, seed, distinct_steps)
    if jobs <= 1 or graph.num_nodes < 2 or num_walks == 0:
        walks = _walk_chunk(indptr, indices, nodes, *args)
    else:
        size = -(-graph.num_nodes // jobs)
        chunks = [nodes[start : start + size] for start in range(0, len(nodes), size)]
        walks = []
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_walk_chunk, indptr, indices, chunk, *args)
                for chunk in chunks
            ]
            for future in futures:
                walks.extend(future.result())
    logger.info(
        "Generated %d walks of at most %d nodes (%d per node).",
        num_walks * graph.num_nodes,
        walk_length,
        num_walks,
    )
    return WalkSet(walks, num_walks, walk_length)
