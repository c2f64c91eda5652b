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

"""This module contains the error hierarchy and small shared helpers."""

import contextlib
import os

import lark
import numpy as np
import scipy.sparse


class WgcnError(Exception):
    """An error encountered while running part of the wgcn pipeline. The stage
    attribute is filled in by the pipeline stage the error escaped from, if any.
    """

    stage = None

    def __str__(self):
        message = super().__str__()
        if self.stage:
            return f"[{self.stage}] {message}"
        return message


class UsageError(WgcnError):
    """The pipeline was invoked with an invalid configuration or parameters."""


class ConfigError(UsageError):
    """A configuration file or override is malformed or names an unknown key."""


class ParameterError(UsageError):
    """A parameter value lies outside its allowed range."""


class DataError(WgcnError):
    """Input data is malformed or inconsistent."""


class ParseError(DataError):
    """A line of a record file could not be parsed."""

    def __init__(self, message, path=None, line=None):
        location = ""
        if path is not None:
            location = f"{path}:"
        if line is not None:
            location += f"{line}:"
        super().__init__(f"{location} {message}" if location else message)
        self.reason = message
        self.path = path
        self.line = line


class FormatError(DataError):
    """A record file parsed, but its contents violate the file format."""


class RangeError(DataError):
    """A node id lies outside the declared node range."""


class StructuralError(DataError):
    """Two matrices or arrays have incompatible shapes."""


class DomainError(DataError):
    """A value lies outside the domain of an operation (negative or NaN entries)."""


class NumericError(WgcnError):
    """A computation produced a non-finite value."""


class ContractError(WgcnError):
    """An object was used in a way its producer does not allow."""


@contextlib.contextmanager
def stage(name):
    """Tags any WgcnError raised inside the block with the pipeline stage name."""
    try:
        yield
    except WgcnError as ex:
        if ex.stage is None:
            ex.stage = name
        raise


def get_parser():
    """Returns a parser for the line-oriented record files."""
    grammar_path = os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "records.lark"
    )
    with open(grammar_path) as grammar:
        return lark.Lark(grammar.read(), parser="lalr", start="start")


# Stream purposes. Each is a distinct non-zero word placed right after the seed, so
# streams of different purposes never share a seed sequence.
WALK_STREAM = 1
DROPOUT_STREAM = 2
SBM_STREAM = 3
INIT_STREAM = 4


def rng_stream(seed, purpose, *keys):
    """Returns a random generator whose stream depends only on the seed, the stream
    purpose and the keys.
    """
    return np.random.default_rng([seed, purpose, *keys])


def canonical(matrix):
    """Returns the matrix as float64 CSR with summed duplicates, sorted column indices
    and no explicit zeros.
    """
    matrix = scipy.sparse.csr_matrix(matrix, dtype=np.float64, copy=True)
    matrix.sum_duplicates()
    matrix.eliminate_zeros()
    matrix.sort_indices()
    return matrix
