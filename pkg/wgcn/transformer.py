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

"""Transformers that interpret the records of a parsed record file. The grammar is
shared by every file kind (see util.get_parser); the transformer decides what the
fields of a record mean.
"""

import collections
import re

import lark

from . import util

RecordFile = collections.namedtuple("RecordFile", ["num_nodes", "records"])
Header = collections.namedtuple("Header", ["num_nodes", "line"])

SPLIT_NAMES = ("train", "val", "test")

_HEADER_COUNT = re.compile(r":[ \t]*([0-9]+)")


def _node_id(field):
    try:
        node = int(field)
    except ValueError:
        raise util.ParseError(
            f"Expected an integer node id, got '{field}'.", line=field.line
        )
    if node < 0:
        raise util.ParseError(
            f"Node ids must be non-negative, got {node}.", line=field.line
        )
    return node


def _expect_fields(fields, count, layout):
    if len(fields) != count:
        raise util.ParseError(
            f"Expected {count} fields ({layout}), got {len(fields)}.",
            line=fields[0].line,
        )


class RecordTransformer(lark.Transformer):
    """Collects the records of a file, with the optional "# nodes: N" header. Subclasses
    implement interpret(fields), which converts the fields of one line.
    """

    def start(self, items):
        num_nodes = None
        records = []
        for item in items:
            if isinstance(item, Header):
                if num_nodes is not None:
                    raise util.ParseError("Node count declared twice.", line=item.line)
                if records:
                    raise util.ParseError(
                        "The node count must be declared before any record.",
                        line=item.line,
                    )
                num_nodes = item.num_nodes
            else:
                records.append(item)
        return RecordFile(num_nodes, records)

    def header(self, items):
        token, = items
        return Header(int(_HEADER_COUNT.search(token).group(1)), token.line)

    def record(self, fields):
        return self.interpret(fields)

    def interpret(self, fields):
        raise NotImplementedError


class EdgeTransformer(RecordTransformer):
    """Lines of the form "u v"; yields (u, v, line)."""

    def interpret(self, fields):
        _expect_fields(fields, 2, "source and target node ids")
        return _node_id(fields[0]), _node_id(fields[1]), fields[0].line


class FeatureTransformer(RecordTransformer):
    """Lines of the form "node f1 ... fK"; yields (node, [f1 ... fK], line)."""

    def interpret(self, fields):
        if len(fields) < 2:
            raise util.ParseError(
                "A feature row needs at least one value.", line=fields[0].line
            )
        try:
            values = [float(field) for field in fields[1:]]
        except ValueError as ex:
            raise util.ParseError(f"Bad feature value: {ex}.", line=fields[0].line)
        return _node_id(fields[0]), values, fields[0].line


class LabelTransformer(RecordTransformer):
    """Lines of the form "node class"; yields (node, class, line)."""

    def interpret(self, fields):
        _expect_fields(fields, 2, "node id and class id")
        try:
            label = int(fields[1])
        except ValueError:
            raise util.ParseError(
                f"Expected an integer class id, got '{fields[1]}'.", line=fields[0].line
            )
        if label < 0:
            raise util.FormatError(
                f"Line {fields[0].line}: class ids must be non-negative, got {label}."
            )
        return _node_id(fields[0]), label, fields[0].line


class SplitTransformer(RecordTransformer):
    """Lines of the form "node {train|val|test}"; yields (node, split name, line)."""

    def interpret(self, fields):
        _expect_fields(fields, 2, "node id and split name")
        name = str(fields[1])
        if name not in SPLIT_NAMES:
            raise util.ParseError(
                f"Split must be one of {', '.join(SPLIT_NAMES)}, got '{name}'.",
                line=fields[0].line,
            )
        return _node_id(fields[0]), name, fields[0].line


class MatrixTransformer(RecordTransformer):
    """Coordinate-list lines of the form "row col value"; yields (row, col, value)."""

    def interpret(self, fields):
        _expect_fields(fields, 3, "row, column and value")
        try:
            value = float(fields[2])
        except ValueError:
            raise util.ParseError(
                f"Bad matrix value '{fields[2]}'.", line=fields[0].line
            )
        return _node_id(fields[0]), _node_id(fields[1]), value
