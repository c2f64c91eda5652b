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

"""Convert a Planetoid citation dataset (the ind.<name>.* files) to the TSV dataset
files read by wgcn, using the standard split: the labeled training nodes, the next
500 nodes for validation and the listed test nodes.

    python tools/convert_planetoid.py cora ~/planetoid/data ~/datasets/cora
"""

import argparse
import logging
import os
import pickle
import sys

import numpy as np
import scipy.sparse

import wgcn

logger = logging.getLogger("convert_planetoid")

NUM_VALIDATION = 500
_PARTS = ("x", "y", "tx", "ty", "allx", "ally", "graph")


def _parse_args(argv=None):
    argparser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    argparser.add_argument("name", type=str, help="Dataset name, e.g. cora.")
    argparser.add_argument("source", type=str, help="Directory of the ind.* files.")
    argparser.add_argument("output", type=str, help="Directory for the TSV files.")
    return argparser.parse_args(argv)


def _load_part(source, name, part):
    with open(os.path.join(source, f"ind.{name}.{part}"), "rb") as handle:
        return pickle.load(handle, encoding="latin1")


def _test_index(source, name):
    path = os.path.join(source, f"ind.{name}.test.index")
    with open(path, encoding="utf-8") as handle:
        return [int(line) for line in handle if line.strip()]


def _pad_test_rows(tx, ty, test_index):
    # some test nodes have no features; their rows stay zero
    full_range = range(min(test_index), max(test_index) + 1)
    padded_x = scipy.sparse.lil_matrix((len(full_range), tx.shape[1]))
    padded_y = np.zeros((len(full_range), ty.shape[1]))
    offsets = sorted(test_index)
    padded_x[np.asarray(offsets) - full_range.start, :] = tx
    padded_y[np.asarray(offsets) - full_range.start, :] = ty
    return padded_x, padded_y


def convert(name, source):
    """Returns the wgcn.Graph of a Planetoid dataset."""
    _, y, tx, ty, allx, ally, adjacency_lists = (
        _load_part(source, name, part) for part in _PARTS
    )
    test_index = _test_index(source, name)
    if max(test_index) - min(test_index) + 1 != tx.shape[0]:
        tx, ty = _pad_test_rows(tx, ty, test_index)

    features = scipy.sparse.vstack([allx, tx]).tolil()
    onehot = np.vstack([ally, ty])
    ordered = sorted(test_index)
    features[test_index, :] = features[ordered, :]
    onehot[test_index, :] = onehot[ordered, :]

    num_nodes = features.shape[0]
    sources, targets = [], []
    for node, neighbors in adjacency_lists.items():
        for neighbor in neighbors:
            if neighbor != node and neighbor < num_nodes and node < num_nodes:
                sources.extend((node, neighbor))
                targets.extend((neighbor, node))
    adjacency = scipy.sparse.coo_matrix(
        (
            np.ones(len(sources)),
            (np.asarray(sources, dtype=np.int64), np.asarray(targets, dtype=np.int64)),
        ),
        shape=(num_nodes, num_nodes),
    ).tocsr()
    adjacency.data[:] = 1.0

    labels = np.where(onehot.any(axis=1), onehot.argmax(axis=1), wgcn.UNLABELED)
    masks = wgcn.Masks.create(
        range(len(y)), range(len(y), len(y) + NUM_VALIDATION), test_index
    )
    logger.info("%s: %d nodes, %d stored edges.", name, num_nodes, adjacency.nnz)
    return wgcn.Graph(adjacency, False, features.toarray(), labels, masks)


def main(argv=None):  # pragma: no cover
    """Reads arguments from the command line and writes the converted dataset."""
    logging.basicConfig(level=logging.INFO, stream=sys.stderr)
    args = _parse_args(argv)
    try:
        graph = convert(args.name, args.source)
    except (OSError, pickle.UnpicklingError, wgcn.WgcnError) as ex:
        print(f"convert_planetoid: error: {ex}", file=sys.stderr)
        sys.exit(2)
    for role, path in wgcn.save_dataset(graph, args.output).items():
        print(f"{role}: {path}")


if __name__ == "__main__":  # pragma: no cover
    main()
