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

"""This module reads and writes datasets in the plain-text record formats:

    edges.tsv     "u v" per line, optionally preceded by a "# nodes: N" header
    features.tsv  "node f1 ... fK" per line
    labels.tsv    "node class" per line
    split.tsv     "node train|val|test" per line

Fields may be separated by tabs or spaces, '#' starts a comment and both LF and CRLF
line endings are accepted.
"""

import functools
import logging
import os

import lark
import numpy as np
import scipy.sparse

from . import graph as graph_module
from . import transformer, util

logger = logging.getLogger(__name__)

EDGES_FILE = "edges.tsv"
FEATURES_FILE = "features.tsv"
LABELS_FILE = "labels.tsv"
SPLIT_FILE = "split.tsv"


class FileLoader:
    """A dictionary-like object that will search the provided search_dirs for the
    provided filename, returning the (contents, absolute_path) if found.
    """

    def __init__(self, search_dirs=(".",)):
        """Creates a new file loader that will search in the provided directories."""
        self.search_dirs = list(search_dirs)

    def __getitem__(self, path):
        """
        Returns the contents of the file at the path, along with the absolute location
        of the file. Raises a DataError if the file can't be found after searching all
        directories. Absolute paths are used as they are.
        """
        for directory in self.search_dirs:
            full_path = os.path.abspath(os.path.join(directory, path))
            try:
                with open(full_path, encoding="utf-8") as handle:
                    return handle.read(), full_path
            except (FileNotFoundError, IsADirectoryError):
                pass
        raise util.DataError(f"Couldn't find {path} in {self.search_dirs}.")


@functools.lru_cache(maxsize=None)
def _parser():
    return util.get_parser()


def parse_records(text, transformer_class, path="<string>"):
    """Parses the text of a record file with the given transformer class and returns
    the resulting transformer.RecordFile. Errors name the file and line.
    """
    try:
        return transformer_class().transform(_parser().parse(text))
    except lark.exceptions.VisitError as ex:
        if isinstance(ex.orig_exc, util.ParseError):
            raise util.ParseError(ex.orig_exc.reason, path, ex.orig_exc.line) from None
        raise ex.orig_exc
    except lark.exceptions.UnexpectedInput as ex:
        raise util.ParseError(
            "Malformed line.", path, getattr(ex, "line", None)
        ) from None


def _read(path, transformer_class, loader):
    loader = loader if loader is not None else FileLoader()
    text, full_path = loader[path]
    return parse_records(text, transformer_class, full_path)


def _check_range(node, num_nodes, line, path):
    if node >= num_nodes:
        raise util.RangeError(
            f"{path}:{line}: node {node} is outside the declared range "
            f"[0, {num_nodes})."
        )


def _edge_matrix(edges, num_nodes, directed, path):
    sources, targets = [], []
    self_loops = 0
    for source, target, line in edges.records:
        if edges.num_nodes is not None:
            _check_range(source, num_nodes, line, path)
            _check_range(target, num_nodes, line, path)
        if source == target:
            self_loops += 1
            continue
        sources.append(source)
        targets.append(target)
    if self_loops:
        logger.warning("Dropped %d self-loop line(s) from %s.", self_loops, path)
    if not directed:
        sources, targets = sources + targets, targets + sources
    adjacency = scipy.sparse.coo_matrix(
        (
            np.ones(len(sources)),
            (np.asarray(sources, dtype=np.int64), np.asarray(targets, dtype=np.int64)),
        ),
        shape=(num_nodes, num_nodes),
    ).tocsr()
    # duplicate lines collapse to a single unit entry
    adjacency.data[:] = 1.0
    return adjacency


def _edge_node_count(edges):
    if edges.num_nodes is not None:
        return edges.num_nodes
    return 1 + max((max(u, v) for u, v, _ in edges.records), default=-1)


def load_graph(edge_path, directed=False, num_nodes=None, loader=None):
    """Returns a Graph (adjacency only) read from an edge list file. Every line
    contributes a unit-weight edge; undirected lines are inserted in both directions,
    duplicates collapse and self-loops are dropped with a warning. The node count is
    taken from the "# nodes: N" header if present, and otherwise from the largest id
    seen (or num_nodes, if larger).
    """
    edges = _read(edge_path, transformer.EdgeTransformer, loader)
    count = _edge_node_count(edges)
    if edges.num_nodes is None and num_nodes is not None:
        count = max(count, num_nodes)
    return graph_module.Graph(_edge_matrix(edges, count, directed, edge_path), directed)


def _attribute_node_count(*record_files):
    largest = -1
    for records in record_files:
        for node, _, _ in records.records:
            largest = max(largest, node)
    return largest + 1


def _features(records, num_nodes, path):
    width = len(records.records[0][1]) if records.records else 0
    features = np.zeros((num_nodes, width))
    seen = set()
    for node, values, line in records.records:
        if len(values) != width:
            raise util.FormatError(
                f"{path}:{line}: expected {width} feature values, got {len(values)}."
            )
        _check_range(node, num_nodes, line, path)
        if node in seen:
            raise util.FormatError(f"{path}:{line}: node {node} has two feature rows.")
        seen.add(node)
        features[node] = values
    return features


def _labels(records, num_nodes, path):
    labels = np.full(num_nodes, graph_module.UNLABELED, dtype=np.int64)
    for node, label, line in records.records:
        _check_range(node, num_nodes, line, path)
        if labels[node] not in (graph_module.UNLABELED, label):
            raise util.FormatError(f"{path}:{line}: node {node} has two labels.")
        labels[node] = label
    return labels


def _masks(records, num_nodes, path):
    assigned = {}
    sets = {name: [] for name in transformer.SPLIT_NAMES}
    for node, name, line in records.records:
        _check_range(node, num_nodes, line, path)
        if node in assigned and assigned[node] != name:
            raise util.FormatError(
                f"{path}:{line}: node {node} is assigned to both {assigned[node]} and "
                f"{name}; the splits must be disjoint."
            )
        assigned[node] = name
        sets[name].append(node)
    return graph_module.Masks.create(**sets)


def load_features_labels(
    feat_path, label_path, split_path, num_nodes=None, loader=None
):
    """Returns (features, labels, masks) read from the three attribute files. Nodes
    without a feature row get a zero row and nodes without a label are UNLABELED. The
    node count defaults to one more than the largest node id in any of the files.
    """
    features = _read(feat_path, transformer.FeatureTransformer, loader)
    labels = _read(label_path, transformer.LabelTransformer, loader)
    split = _read(split_path, transformer.SplitTransformer, loader)
    if num_nodes is None:
        num_nodes = _attribute_node_count(features, labels, split)
    return (
        _features(features, num_nodes, feat_path),
        _labels(labels, num_nodes, label_path),
        _masks(split, num_nodes, split_path),
    )


def load_dataset(
    edge_path, feat_path, label_path, split_path, directed=False, loader=None
):
    """Returns the complete Graph described by the four dataset files. The node count
    is the "# nodes: N" header of the edge file if present, and otherwise covers every
    node id mentioned in any of the files.
    """
    edges = _read(edge_path, transformer.EdgeTransformer, loader)
    features = _read(feat_path, transformer.FeatureTransformer, loader)
    labels = _read(label_path, transformer.LabelTransformer, loader)
    split = _read(split_path, transformer.SplitTransformer, loader)
    num_nodes = edges.num_nodes
    if num_nodes is None:
        num_nodes = max(
            _edge_node_count(edges), _attribute_node_count(features, labels, split)
        )
    logger.info("Loaded %d nodes from %s.", num_nodes, edge_path)
    return graph_module.Graph(
        _edge_matrix(edges, num_nodes, directed, edge_path),
        directed,
        _features(features, num_nodes, feat_path),
        _labels(labels, num_nodes, label_path),
        _masks(split, num_nodes, split_path),
    )


def save_dataset(graph, directory):
    """Writes the graph as the four dataset files in the given directory, such that
    load_dataset() on them returns an equal graph (for unit-weight adjacencies).
    Returns a dict mapping file roles to the written paths.
    """
    os.makedirs(directory, exist_ok=True)
    paths = {
        "edges": os.path.join(directory, EDGES_FILE),
        "features": os.path.join(directory, FEATURES_FILE),
        "labels": os.path.join(directory, LABELS_FILE),
        "split": os.path.join(directory, SPLIT_FILE),
    }
    with open(paths["edges"], "w", encoding="utf-8") as handle:
        handle.write(f"# nodes: {graph.num_nodes}\n")
        for source, target in graph.edges():
            if graph.directed or source < target:
                handle.write(f"{source}\t{target}\n")
    with open(paths["features"], "w", encoding="utf-8") as handle:
        if graph.num_features:
            for node, row in enumerate(graph.features):
                values = "\t".join(repr(float(value)) for value in row)
                handle.write(f"{node}\t{values}\n")
    with open(paths["labels"], "w", encoding="utf-8") as handle:
        for node, label in enumerate(graph.labels):
            if label != graph_module.UNLABELED:
                handle.write(f"{node}\t{label}\n")
    with open(paths["split"], "w", encoding="utf-8") as handle:
        for name, mask in graph.masks.as_dict().items():
            for node in mask:
                handle.write(f"{node}\t{name}\n")
    return paths
