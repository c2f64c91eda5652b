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
# flake8: noqa

"""Random-walk graph reconstruction and graph convolutional networks for
semi-supervised node classification.
"""

from . import config, file_loader, graph, model, reconstruct, training, walks
from .config import TrainConfig, load_config
from .file_loader import (
    FileLoader,
    load_dataset,
    load_features_labels,
    load_graph,
    save_dataset,
)
from .graph import UNLABELED, Graph, Masks, generate_sbm, normalize_features
from .model import HyperParams, ModelParams, init_params
from .reconstruct import (
    ReconConfig,
    build_walk_matrix,
    mix,
    reconstruct as reconstruct_operator,
    sym_normalize,
)
from .training import RunReport, embed, evaluate, predict, sweep, train
from .util import (
    ConfigError,
    ContractError,
    DataError,
    DomainError,
    FormatError,
    NumericError,
    ParameterError,
    ParseError,
    RangeError,
    StructuralError,
    UsageError,
    WgcnError,
)
from .walks import WalkSet, generate_walks, random_walk

name = "wgcn"
