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
This module runs the full pipeline: load the graph, generate walks, reconstruct the
propagation operator, train the network on the training nodes and evaluate it. Each
stage tags the errors escaping from it with its name.
"""

import collections
import csv
import json
import logging
import time

import numpy as np

from . import file_loader, graph as graph_module, model, reconstruct, util, walks

logger = logging.getLogger(__name__)

# Forward passes outside training never drop out.
_EVAL = model.HyperParams(dropout=0.0)

CURVE_FIELDS = ("epoch", "train_loss", "train_accuracy", "val_loss", "val_accuracy")


class RunReport:
    """The outcome of one training run. Everything except wall_clock is a pure
    function of the config.
    """

    def __init__(self, config):
        self.dataset = config.dataset
        self.seed = config.seed
        self.jobs = config.jobs
        self.config = config.to_dict()
        self.config_hash = config.digest()
        self.num_nodes = 0
        self.nnz_adjacency = 0
        self.nnz_operator = 0
        self.nnz_bound = 0
        self.epochs = []
        self.best_epoch = None
        self.stopped_early = False
        self.train_accuracy = None
        self.val_accuracy = None
        self.test_accuracy = None
        self.wall_clock = collections.OrderedDict()

    def add_epoch(self, epoch, train_loss, train_accuracy, val_loss, val_accuracy):
        values = (epoch, train_loss, train_accuracy, val_loss, val_accuracy)
        self.epochs.append(collections.OrderedDict(zip(CURVE_FIELDS, values)))

    def to_dict(self, include_timing=True):
        values = collections.OrderedDict(
            [
                ("dataset", self.dataset),
                ("seed", self.seed),
                ("config_hash", self.config_hash),
                ("jobs", self.jobs),
                ("num_nodes", self.num_nodes),
                ("nnz_adjacency", self.nnz_adjacency),
                ("nnz_operator", self.nnz_operator),
                ("nnz_bound", self.nnz_bound),
                ("best_epoch", self.best_epoch),
                ("stopped_early", self.stopped_early),
                ("train_accuracy", self.train_accuracy),
                ("val_accuracy", self.val_accuracy),
                ("test_accuracy", self.test_accuracy),
                ("epochs", self.epochs),
                ("config", self.config),
            ]
        )
        if include_timing:
            values["wall_clock"] = self.wall_clock
        return values

    def to_json(self, include_timing=True):
        return json.dumps(self.to_dict(include_timing), indent=2) + "\n"

    def write(self, path, include_timing=True):
        """Writes the report to the given path as a single JSON document."""
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.to_json(include_timing))

    def write_curve(self, path):
        """Writes the per-epoch curve to the given path as CSV."""
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(CURVE_FIELDS)
            for epoch in self.epochs:
                row = [epoch[field] for field in CURVE_FIELDS]
                writer.writerow(["" if value is None else value for value in row])

    def summary(self):
        """Returns the one-line summary printed by the command line."""
        accuracy = "n/a" if self.test_accuracy is None else f"{self.test_accuracy:.4f}"
        return (
            f"dataset={self.dataset} config={self.config_hash} seed={self.seed} "
            f"test_accuracy={accuracy}"
        )


class _Timer:
    def __init__(self, report, name):
        self.report = report
        self.name = name

    def __enter__(self):
        self.start = time.perf_counter()

    def __exit__(self, *exc_info):
        elapsed = time.perf_counter() - self.start
        wall_clock = self.report.wall_clock
        wall_clock[self.name] = wall_clock.get(self.name, 0) + elapsed


def prepare_graph(config):
    """Returns the graph named by the config: the dataset files if given, otherwise
    a stochastic block model. Features are row-normalized if the config asks for it.
    """
    if config.uses_sbm():
        graph = graph_module.generate_sbm(
            config.sbm_block_size,
            config.sbm_blocks,
            config.sbm_p_in,
            config.sbm_p_out,
            config.sbm_noise,
            config.seed,
        )
    else:
        graph = file_loader.load_dataset(
            config.edges,
            config.features,
            config.labels,
            config.split,
            config.directed,
            file_loader.FileLoader([config.data_dir, "."]),
        )
    if config.normalize_features:
        features = graph_module.normalize_features(graph.features)
        graph = graph.with_data(features=features)
    return graph


def build_operator(graph, config):
    """Returns (operator, walk_set) for the graph under the config's walk and
    reconstruction settings.
    """
    with util.stage("walks"):
        walk_set = walks.generate_walks(
            graph,
            config.num_walks,
            config.walk_length,
            config.seed,
            config.distinct_steps,
            config.jobs,
        )
    with util.stage("reconstruct"):
        operator = reconstruct.reconstruct(graph, walk_set, config.recon_config())
    return operator, walk_set


def _labeled(mask, labels):
    mask = np.asarray(mask, dtype=np.int64)
    return mask[np.asarray(labels)[mask] != graph_module.UNLABELED]


def evaluate(params, operator, features, labels, mask):
    """Returns the fraction of labeled masked nodes whose largest logit is at their
    label; ties go to the lowest class index. Unlabeled nodes are skipped.
    """
    if len(mask) == 0:
        raise util.ParameterError("Cannot evaluate on an empty node set.")
    mask = _labeled(mask, labels)
    if mask.size == 0:
        raise util.DataError("No node of the evaluated set is labeled.")
    predictions = np.argmax(embed(params, operator, features), axis=1)
    return float(np.mean(predictions[mask] == np.asarray(labels)[mask]))


def embed(params, operator, features):
    """Returns the final-layer (pre-softmax) representation of every node."""
    logits, _ = model.forward(operator, features, params, _EVAL, "eval")
    return logits


def predict(params, operator, features):
    """Returns the class probabilities of every node."""
    return model.softmax_rows(embed(params, operator, features))


def _regularized_loss(loss, params, weight_decay):
    return loss + 0.5 * weight_decay * sum(float(np.sum(w * w)) for w in params)


def _masked_metrics(logits, labels, mask):
    mask = _labeled(mask, labels)
    if mask.size == 0:
        return None, None
    loss, _ = model.cross_entropy(model.softmax_rows(logits), labels, mask)
    accuracy = float(np.mean(np.argmax(logits[mask], axis=1) == labels[mask]))
    return loss, accuracy


def _fit(graph, operator, config, report):
    hyper = config.hyper_params()
    features, labels, masks = graph.features, graph.labels, graph.masks
    params = model.init_params(
        hyper.layer_dims(graph.num_features, graph.num_classes), hyper.init_seed
    )
    rng = util.rng_stream(config.seed, util.DROPOUT_STREAM)
    state = None
    best_params, best_accuracy, best_loss = params, -1.0, np.inf
    since_improvement = 0
    for epoch in range(1, hyper.epochs + 1):
        logits, trace = model.forward(operator, features, params, hyper, "train", rng)
        if not np.all(np.isfinite(logits)):
            raise util.NumericError(f"Non-finite logits at epoch {epoch}.")
        probs = model.softmax_rows(logits)
        loss, grad = model.cross_entropy(probs, labels, masks.train)
        loss = _regularized_loss(loss, params, hyper.weight_decay)
        if not np.isfinite(loss):
            raise util.NumericError(
                f"The training loss became {loss} at epoch {epoch}."
            )
        gradients = model.backward(trace, grad, operator, params, hyper.weight_decay)
        params, state = model.optimizer_step(params, gradients, state, hyper)

        evaluated = embed(params, operator, features)
        _, train_accuracy = _masked_metrics(evaluated, labels, masks.train)
        val_loss, val_accuracy = _masked_metrics(evaluated, labels, masks.val)
        report.add_epoch(epoch, loss, train_accuracy, val_loss, val_accuracy)
        logger.debug(
            "epoch %d: loss %.4f, train %.4f, val %s",
            epoch,
            loss,
            train_accuracy,
            val_accuracy,
        )
        if val_accuracy is None or val_accuracy > best_accuracy:
            best_params, best_accuracy = params, val_accuracy or 0.0
            report.best_epoch = epoch
        if val_loss is not None and config.patience:
            if val_loss < best_loss:
                best_loss, since_improvement = val_loss, 0
            else:
                since_improvement += 1
                if since_improvement >= config.patience:
                    logger.info("Validation loss stalled; stopping at epoch %d.", epoch)
                    report.stopped_early = True
                    break
    if config.select == "final":
        report.best_epoch = len(report.epochs)
        return params
    logger.info("Selected the parameters of epoch %s.", report.best_epoch)
    return best_params


def train(config, graph=None):
    """Runs the pipeline for a TrainConfig and returns (params, report). A graph
    that was already prepared for the config may be passed to skip loading.
    """
    report = RunReport(config)
    with _Timer(report, "load"), util.stage("load"):
        if graph is None:
            graph = prepare_graph(config)
    with _Timer(report, "reconstruct"):
        operator, _ = build_operator(graph, config)
    report.num_nodes = graph.num_nodes
    report.nnz_adjacency = graph.nnz
    report.nnz_operator = operator.nnz
    report.nnz_bound = reconstruct.sparsity_bound(
        graph, config.num_walks, config.walk_length, config.recon_config().symmetrize
    )
    if report.nnz_operator > report.nnz_bound:
        raise util.ContractError(
            "The reconstructed operator exceeds its sparsity bound."
        )
    with util.stage("init"):
        if graph.masks.train.size == 0:
            raise util.DataError("The training set is empty.")
        if graph.num_classes < 1:
            raise util.DataError("No node is labeled.")
    with _Timer(report, "train"), util.stage("train"):
        params = _fit(graph, operator, config, report)
    with _Timer(report, "evaluate"), util.stage("evaluate"):
        for name in ("train", "val", "test"):
            mask = _labeled(getattr(graph.masks, name), graph.labels)
            if mask.size:
                accuracy = evaluate(
                    params, operator, graph.features, graph.labels, mask
                )
                setattr(report, f"{name}_accuracy", accuracy)
    logger.info(report.summary())
    return params, report


def sweep(config, repeats):
    """Trains with the seeds config.seed ... config.seed + repeats - 1 and returns
    (reports, summary), where the summary holds the mean and standard deviation of
    the test accuracies.
    """
    if repeats < 1:
        raise util.ParameterError("A sweep needs at least one run.")
    graph = None
    if not config.uses_sbm():
        with util.stage("load"):
            graph = prepare_graph(config)
    reports = []
    for offset in range(repeats):
        _, report = train(config.replace(seed=config.seed + offset), graph)
        reports.append(report)
    accuracies = [r.test_accuracy for r in reports if r.test_accuracy is not None]
    summary = collections.OrderedDict(
        [
            ("dataset", config.dataset),
            ("seeds", [r.seed for r in reports]),
            ("test_accuracies", accuracies),
            ("mean_test_accuracy", float(np.mean(accuracies)) if accuracies else None),
            ("std_test_accuracy", float(np.std(accuracies)) if accuracies else None),
        ]
    )
    return reports, summary
