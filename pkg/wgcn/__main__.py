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

"""Run the wgcn pipeline from the command line.

Exit codes: 0 on success, 1 on usage errors, 2 on data or format errors and 3 on
numeric failures. A one-line summary goes to standard output; diagnostics and logs
go to standard error.
"""

import argparse
import json
import logging
import sys

import wgcn

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_LOG_LEVELS = {0: logging.WARNING, 1: logging.INFO}


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise wgcn.UsageError(message)


def _add_common_arguments(parser, out_required=False):
    parser.add_argument("-c", "--config", type=str, help="Location of the JSON config.")
    parser.add_argument(
        "-s",
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a config value (repeatable).",
    )
    parser.add_argument(
        "-o", "--out", type=str, required=out_required, help="Location for the output."
    )
    parser.add_argument(
        "-j", "--jobs", type=int, help="Number of processes generating walks."
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="Log more (repeatable)."
    )


def _parse_args(argv=None):
    argparser = _ArgumentParser(
        prog="wgcn",
        description="Random-walk graph reconstruction and GCN node classification.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    subparsers = argparser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    walk = subparsers.add_parser("walk", help="Dump the random walks, one per line.")
    _add_common_arguments(walk, out_required=True)

    recon = subparsers.add_parser(
        "reconstruct", help="Dump the reconstructed operator as a coordinate list."
    )
    _add_common_arguments(recon, out_required=True)

    train = subparsers.add_parser("train", help="Train and write the JSON run report.")
    _add_common_arguments(train)
    train.add_argument("--curve", type=str, help="Location for the per-epoch CSV.")
    train.add_argument("--checkpoint", type=str, help="Location for the parameters.")
    train.add_argument(
        "--repeat", type=int, default=1, help="Number of consecutive seeds to run."
    )
    train.add_argument(
        "--omit-timing",
        action="store_true",
        help="Leave wall-clock times out of the report, making it reproducible.",
    )

    evaluate = subparsers.add_parser("eval", help="Evaluate a checkpoint.")
    _add_common_arguments(evaluate)
    evaluate.add_argument("--checkpoint", type=str, required=True)
    evaluate.add_argument(
        "--split", choices=("train", "val", "test"), default="test", help="Node set."
    )

    embed = subparsers.add_parser("embed", help="Write the final-layer embeddings.")
    _add_common_arguments(embed, out_required=True)
    embed.add_argument("--checkpoint", type=str, required=True)

    sbm = subparsers.add_parser("sbm", help="Write a stochastic block model dataset.")
    _add_common_arguments(sbm, out_required=True)

    return argparser.parse_args(argv)


def _load_config(args):
    overrides = list(args.overrides)
    if args.jobs is not None:
        overrides.append(f"jobs={args.jobs}")
    return wgcn.load_config(args.config, overrides)


def _checkpoint_params(args, graph):
    params, _ = wgcn.model.load_checkpoint(args.checkpoint)
    expected = (graph.num_features, graph.num_classes)
    if (params.dims[0], params.dims[-1]) != expected:
        raise wgcn.StructuralError(
            f"The checkpoint maps {params.dims[0]} features to {params.dims[-1]} "
            f"classes, but the dataset has {expected[0]} features and {expected[1]}."
        )
    return params


def _walk(args, config):
    with wgcn.util.stage("load"):
        graph = wgcn.training.prepare_graph(config)
    with wgcn.util.stage("walks"):
        walk_set = wgcn.generate_walks(
            graph,
            config.num_walks,
            config.walk_length,
            config.seed,
            config.distinct_steps,
            config.jobs,
        )
    walk_set.write(args.out)
    print(
        f"dataset={config.dataset} config={config.digest()} "
        f"walks={walk_set.total_walks()}"
    )


def _reconstruct(args, config):
    with wgcn.util.stage("load"):
        graph = wgcn.training.prepare_graph(config)
    operator, _ = wgcn.training.build_operator(graph, config)
    wgcn.reconstruct.write_matrix(operator, args.out)
    print(
        f"dataset={config.dataset} config={config.digest()} nnz_adjacency={graph.nnz} "
        f"nnz_operator={operator.nnz}"
    )


def _train(args, config):
    if args.repeat > 1:
        reports, summary = wgcn.sweep(config, args.repeat)
        if args.out:
            document = {
                "summary": summary,
                "runs": [report.to_dict(not args.omit_timing) for report in reports],
            }
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(json.dumps(document, indent=2) + "\n")
        mean = summary["mean_test_accuracy"]
        print(
            f"dataset={config.dataset} config={config.digest()} runs={args.repeat} "
            f"mean_test_accuracy={'n/a' if mean is None else f'{mean:.4f}'}"
        )
        return
    params, report = wgcn.train(config)
    if args.out:
        report.write(args.out, include_timing=not args.omit_timing)
    if args.curve:
        report.write_curve(args.curve)
    if args.checkpoint:
        wgcn.model.save_checkpoint(
            args.checkpoint, params, config.seed, report.best_epoch
        )
    print(report.summary())


def _evaluate(args, config):
    with wgcn.util.stage("load"):
        graph = wgcn.training.prepare_graph(config)
    operator, _ = wgcn.training.build_operator(graph, config)
    with wgcn.util.stage("evaluate"):
        params = _checkpoint_params(args, graph)
        mask = getattr(graph.masks, args.split)
        accuracy = wgcn.evaluate(params, operator, graph.features, graph.labels, mask)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            document = {
                "split": args.split,
                "accuracy": accuracy,
                "config": config.to_dict(),
            }
            handle.write(json.dumps(document, indent=2) + "\n")
    print(
        f"dataset={config.dataset} config={config.digest()} {args.split}_accuracy="
        f"{accuracy:.4f}"
    )


def _embed(args, config):
    with wgcn.util.stage("load"):
        graph = wgcn.training.prepare_graph(config)
    operator, _ = wgcn.training.build_operator(graph, config)
    with wgcn.util.stage("evaluate"):
        params = _checkpoint_params(args, graph)
        embeddings = wgcn.embed(params, operator, graph.features)
    with open(args.out, "w", encoding="utf-8") as handle:
        for node, row in enumerate(embeddings):
            values = "\t".join(repr(float(value)) for value in row)
            handle.write(f"{node}\t{values}\n")
    print(f"dataset={config.dataset} config={config.digest()} shape={embeddings.shape}")


def _sbm(args, config):
    graph = wgcn.generate_sbm(
        config.sbm_block_size,
        config.sbm_blocks,
        config.sbm_p_in,
        config.sbm_p_out,
        config.sbm_noise,
        config.seed,
    )
    wgcn.save_dataset(graph, args.out)
    print(
        f"dataset=sbm config={config.digest()} nodes={graph.num_nodes} "
        f"nnz={graph.nnz}"
    )


_COMMANDS = {
    "walk": _walk,
    "reconstruct": _reconstruct,
    "train": _train,
    "eval": _evaluate,
    "embed": _embed,
    "sbm": _sbm,
}


def _report_error(ex):
    print(f"wgcn: error: {ex}", file=sys.stderr)


def run_cli(argv=None):
    """Runs the command described by the arguments (taken from the command line by
    default) and returns the exit code.
    """
    try:
        # Parse arguments.
        args = _parse_args(argv)
        logging.basicConfig(
            level=_LOG_LEVELS.get(args.verbose, logging.DEBUG),
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )

        # Resolve the configuration, then run the command.
        config = _load_config(args)
        _COMMANDS[args.command](args, config)
    except SystemExit as ex:  # --help
        return ex.code or EXIT_OK
    except wgcn.UsageError as ex:
        _report_error(ex)
        return EXIT_USAGE
    except wgcn.NumericError as ex:
        _report_error(ex)
        return EXIT_NUMERIC
    except (wgcn.WgcnError, OSError) as ex:
        _report_error(ex)
        return EXIT_DATA
    return EXIT_OK


def main():  # pragma: no cover
    """Reads arguments from the command line and runs the requested command."""
    sys.exit(run_cli())


if __name__ == "__main__":  # pragma: no cover
    main()
