"""Command-line entry point: ``qaoa-maxcut <command> [options]``.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .compiler import cnot_count, compile_all_to_all, compile_swap_network, format_circuit, lower, two_qubit_depth, write_circuit
from .config import ExperimentConfig, dump_config, load_config
from .errors import ParseError, ValidationError
from .graphs import read_graphs
from .trainer import NumericalError, init_protocol, load_checkpoint

log = logging.getLogger("qaoa_maxcut")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="experiment config file (INI)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", type=Path, help="experiment output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qaoa-maxcut", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="sample train/test Erdos-Renyi graph sets")
    p.add_argument("--nodes", type=_int_list, help="comma-separated node sizes")

    p = sub.add_parser("brute", parents=[common], help="exact MaxCut optima by enumeration")
    p.add_argument("--nodes", type=_int_list)
    p.add_argument("--graphs", type=Path, help="score this graph file and print CSV instead")

    p = sub.add_parser("gw", parents=[common], help="Goemans-Williamson baseline on the test sets")
    p.add_argument("--nodes", type=_int_list)
    p.add_argument("--rounds", type=int, help="hyperplane roundings per graph")
    p.add_argument("--graphs", type=Path, help="score this graph file and print CSV instead")

    p = sub.add_parser("train", parents=[common], help="train one protocol per (N, P) cell")
    p.add_argument("--nodes", type=_int_list)
    p.add_argument("--steps", type=_int_list, help="comma-separated QAOA depths")
    p.add_argument("--epochs", type=int)

    p = sub.add_parser("eval", parents=[common], help="write results.csv comparing QAOA with GW")
    p.add_argument("--nodes", type=_int_list)
    p.add_argument("--steps", type=_int_list)
    p.add_argument("--rounds", type=int)

    p = sub.add_parser("compile", parents=[common], help="emit a compiled QAOA circuit")
    p.add_argument("--graphs", type=Path, required=True)
    p.add_argument("--index", type=int, default=0, help="which graph in the file")
    p.add_argument("--checkpoint", type=Path, help="protocol source (default: fresh init)")
    p.add_argument("--steps", type=int, default=1, help="P when no checkpoint is given")
    p.add_argument("--topology", choices=["linear", "all"], default="linear")
    p.add_argument("--lower", action="store_true", help="expand PSWAP gates into CNOTs")
    p.add_argument("--output", type=Path, help="circuit file (default: stdout)")

    p = sub.add_parser("resources", parents=[common], help="CNOT counts per (N, P)")
    p.add_argument("--nodes", type=_int_list, default=[4, 6, 8, 10, 12])
    p.add_argument("--steps", type=_int_list, default=[1, 2, 4, 8])

    p = sub.add_parser("protocol-dump", parents=[common], help="CSV of a checkpoint's angles")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--output", type=Path, help="CSV file (default: stdout)")
    return parser


def resolve_config(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.output_dir = args.out
    if getattr(args, "nodes", None):
        config.node_sizes = args.nodes
    steps = getattr(args, "steps", None)
    if isinstance(steps, list) and steps:
        config.qaoa_steps = steps
    if getattr(args, "rounds", None):
        config.gw_rounds = args.rounds
    if getattr(args, "epochs", None) is not None:
        config.trainer.epochs = args.epochs
    config.__post_init__()
    config.trainer.__post_init__()
    return config


def _print_csv(header, rows) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def run(args) -> int:
    config = resolve_config(args)
    cmd = args.command
    if cmd == "generate":
        config.output_dir.mkdir(parents=True, exist_ok=True)
        ex.atomic_write(config.output_dir / "experiment.ini", dump_config(config))
        for path in ex.cmd_generate(config):
            print(path)
    elif cmd == "brute":
        if args.graphs:
            _print_csv(["index", "optimum", "assignment"], ex.brute_force_rows(read_graphs(args.graphs)))
        else:
            for path in ex.cmd_brute(config):
                print(path)
    elif cmd == "gw":
        if args.graphs:
            _print_csv(ex.GW_HEADER, ex.gw_rows(read_graphs(args.graphs), config.gw_rounds, config.seed))
        else:
            for path in ex.cmd_gw(config):
                print(path)
    elif cmd == "train":
        for path in ex.cmd_train(config):
            print(path)
    elif cmd == "eval":
        print(ex.cmd_eval(config))
    elif cmd == "compile":
        graphs = read_graphs(args.graphs)
        if not 0 <= args.index < len(graphs):
            raise ex.InputError(f"{args.graphs} has {len(graphs)} graphs, no index {args.index}")
        graph = graphs[args.index]
        if args.checkpoint:
            protocol = load_checkpoint(args.checkpoint)[0].protocol
        else:
            protocol = init_protocol(args.steps, ex.cell_config(config, graph.num_nodes, args.steps))
        build = compile_swap_network if args.topology == "linear" else compile_all_to_all
        circuit = build(graph, protocol)
        if args.lower:
            circuit = lower(circuit)
        if args.output:
            write_circuit(circuit, args.output)
        else:
            sys.stdout.write(format_circuit(circuit))
        print(
            f"# {args.topology}: {cnot_count(circuit)} CNOTs, "
            f"{two_qubit_depth(circuit)} two-qubit layers, {len(circuit.gates)} gates",
            file=sys.stderr,
        )
    elif cmd == "resources":
        path = ex.cmd_resources(args.nodes, args.steps, config.output_dir / "resources.csv")
        sys.stdout.write(path.read_text(encoding="utf-8"))
    elif cmd == "protocol-dump":
        text, trend = ex.cmd_protocol_dump(args.checkpoint, args.output)
        if args.output is None:
            sys.stdout.write(text)
        print(f"# spearman(gamma_p, p) = {trend:.4f}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return run(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ex.InputError, ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
