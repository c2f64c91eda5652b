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

import logging

import numpy as np
import pytest

import wgcn

from .util import loader

ATTRIBUTE_FILES = ("features.tsv", "labels.tsv", "split.tsv")


def test_load_graph_undirected():
    graph = wgcn.load_graph("edges.tsv", loader=loader(edges_tsv="0 1\n1 2"))

    assert graph.num_nodes == 3
    assert graph.adjacency.toarray().tolist() == [[0, 1, 0], [1, 0, 1], [0, 1, 0]]


def test_load_graph_directed():
    graph = wgcn.load_graph("edges.tsv", True, loader=loader(edges_tsv="0 1\n1 2\n"))

    assert graph.directed
    assert graph.edges() == [(0, 1), (1, 2)]


def test_load_graph_duplicates():
    files = loader(edges_tsv="0 1\n0 1\n1 0\n")

    graph = wgcn.load_graph("edges.tsv", loader=files)

    assert graph == wgcn.load_graph("edges.tsv", loader=loader(edges_tsv="0 1\n"))
    assert graph.adjacency.data.tolist() == [1.0, 1.0]


def test_load_graph_self_loop(caplog):
    with caplog.at_level(logging.WARNING, logger="wgcn.file_loader"):
        graph = wgcn.load_graph("edges.tsv", loader=loader(edges_tsv="0\t0\n"))

    assert graph.nnz == 0
    assert "Dropped 1 self-loop" in caplog.text


def test_load_graph_crlf_and_comments():
    text = "# exported edges\r\n0\t1\r\n\r\n1 2  # second\r\n"

    graph = wgcn.load_graph("edges.tsv", loader=loader(edges_tsv=text))

    assert graph == wgcn.load_graph("edges.tsv", loader=loader(edges_tsv="0 1\n1 2"))


def test_load_graph_header():
    graph = wgcn.load_graph("edges.tsv", loader=loader(edges_tsv="# nodes: 5\n0 1\n"))

    assert graph.num_nodes == 5
    assert graph.neighbors(4).size == 0


def test_load_graph_out_of_range():
    with pytest.raises(wgcn.RangeError):
        wgcn.load_graph("edges.tsv", loader=loader(edges_tsv="# nodes: 2\n0 3\n"))


def test_load_graph_malformed_line():
    with pytest.raises(wgcn.ParseError) as info:
        wgcn.load_graph("edges.tsv", loader=loader(edges_tsv="0 1\n1 2 3\n"))

    assert info.value.line == 2
    assert str(info.value).startswith("edges.tsv:2:")


def test_load_features_labels():
    files = loader(
        features_tsv="0\t1.0\t2.0\n1\t3.0\t4.0\n",
        labels_tsv="0\t3\n",
        split_tsv="0\ttrain\n1\ttest\n",
    )

    features, labels, masks = wgcn.load_features_labels(*ATTRIBUTE_FILES, loader=files)

    assert features.tolist() == [[1.0, 2.0], [3.0, 4.0]]
    assert labels.tolist() == [3, wgcn.UNLABELED]
    assert masks.train.tolist() == [0]
    assert masks.val.tolist() == []
    assert masks.test.tolist() == [1]


def test_load_features_labels_missing_rows():
    files = loader(features_tsv="2 1.5\n", labels_tsv="", split_tsv="")

    features, _, _ = wgcn.load_features_labels(
        *ATTRIBUTE_FILES, num_nodes=4, loader=files
    )

    assert features.tolist() == [[0.0], [0.0], [1.5], [0.0]]


def test_load_features_labels_inconsistent_width():
    files = loader(features_tsv="0 1 2\n1 3\n", labels_tsv="", split_tsv="")

    with pytest.raises(wgcn.FormatError):
        wgcn.load_features_labels(*ATTRIBUTE_FILES, loader=files)


def test_load_features_labels_negative_class():
    files = loader(features_tsv="0 1\n", labels_tsv="0 -2\n", split_tsv="")

    with pytest.raises(wgcn.FormatError):
        wgcn.load_features_labels(*ATTRIBUTE_FILES, loader=files)


def test_load_features_labels_overlapping_split():
    files = loader(
        features_tsv="0 1\n", labels_tsv="0 0\n", split_tsv="0 train\n0 test\n"
    )

    with pytest.raises(wgcn.FormatError):
        wgcn.load_features_labels(*ATTRIBUTE_FILES, loader=files)


def test_load_dataset():
    files = loader(
        edges_tsv="0 1\n1 2\n",
        features_tsv="0 1 0\n1 0 1\n2 1 1\n",
        labels_tsv="0 0\n1 1\n2 1\n",
        split_tsv="0 train\n1 val\n2 test\n",
    )

    graph = wgcn.load_dataset(
        "edges.tsv", "features.tsv", "labels.tsv", "split.tsv", loader=files
    )

    assert graph.num_nodes == 3
    assert graph.num_features == 2
    assert graph.num_classes == 2
    assert graph.masks.test.tolist() == [2]


def test_load_dataset_isolated_node():
    files = loader(
        edges_tsv="0 1\n",
        features_tsv="0 1\n1 1\n2 1\n",
        labels_tsv="",
        split_tsv="",
    )

    graph = wgcn.load_dataset(
        "edges.tsv", "features.tsv", "labels.tsv", "split.tsv", loader=files
    )

    assert graph.num_nodes == 3
    assert graph.neighbors(2).size == 0


def test_save_dataset_round_trip(tmp_path):
    graph = wgcn.generate_sbm(6, 3, 0.6, 0.1, 0.3, seed=4)

    paths = wgcn.save_dataset(graph, str(tmp_path))
    loaded = wgcn.load_dataset(
        paths["edges"], paths["features"], paths["labels"], paths["split"]
    )

    assert loaded == graph


def test_save_dataset_directed_round_trip(tmp_path):
    graph = wgcn.load_graph("edges.tsv", True, loader=loader(edges_tsv="0 1\n2 1\n"))
    graph = graph.with_data(
        features=np.eye(3), labels=[0, 1, 0], masks=wgcn.Masks.create([0], [1], [2])
    )

    paths = wgcn.save_dataset(graph, str(tmp_path))
    loaded = wgcn.load_dataset(
        paths["edges"], paths["features"], paths["labels"], paths["split"], True
    )

    assert loaded == graph


def test_file_loader_search_dirs(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    first.mkdir()
    second.mkdir()
    (second / "edges.tsv").write_text("0 1\n")

    text, path = wgcn.FileLoader([str(first), str(second)])["edges.tsv"]

    assert text == "0 1\n"
    assert path == str(second / "edges.tsv")


def test_file_loader_missing(tmp_path):
    with pytest.raises(wgcn.DataError):
        wgcn.FileLoader([str(tmp_path)])["missing.tsv"]
