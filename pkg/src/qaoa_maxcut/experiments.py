"""Experiment pipeline behind the command-line interface.

Layout of an experiment directory::

    graphs/{train,test}_N{n}.txt   graph files
    optima/{train,test}_N{n}.csv   brute-force MaxCut values
    gw/test_N{n}.csv               Goemans-Williamson results per test graph
    checkpoints/N{n}_P{p}.json     trained protocols
    history/N{n}_P{p}.csv          per-epoch training history
    results.csv                    QAOA vs GW approximation ratios
    results_meta.json              metric definitions for results.csv
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import spearmanr

from .compiler import (
    all_to_all_cnots_complete,
    cnot_count,
    compile_all_to_all,
    compile_swap_network,
    swap_network_cnots,
    two_qubit_depth,
)
from .config import ExperimentConfig
from .graphs import Graph, brute_force_maxcut, complete_graph, read_graphs, sample_erdos_renyi, write_graphs
from .gw import gw_maxcut
from .qaoa import Protocol
from .trainer import TrainConfig, approximation_ratios, evaluate, load_checkpoint, save_checkpoint, train

log = logging.getLogger(__name__)

_KIND_CODES = {"train": 0, "test": 1}


class InputError(Exception):
    """A required input file is missing or unreadable (exit code 2)."""


def derive_seed(*keys: int) -> int:
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def write_csv(path, header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    atomic_write(path, buf.getvalue())


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def read_csv(path) -> list[dict[str, str]]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def graph_path(out: Path, kind: str, n: int) -> Path:
    return out / "graphs" / f"{kind}_N{n}.txt"


def optima_path(out: Path, kind: str, n: int) -> Path:
    return out / "optima" / f"{kind}_N{n}.csv"


def gw_path(out: Path, n: int) -> Path:
    return out / "gw" / f"test_N{n}.csv"


def checkpoint_path(out: Path, n: int, p: int) -> Path:
    return out / "checkpoints" / f"N{n}_P{p}.json"


def history_path(out: Path, n: int, p: int) -> Path:
    return out / "history" / f"N{n}_P{p}.csv"


def load_graph_set(out: Path, kind: str, n: int) -> list[Graph]:
    path = graph_path(out, kind, n)
    if not path.exists():
        raise InputError(f"missing graph file {path} (run 'generate' first)")
    return read_graphs(path)


def load_optima(out: Path, kind: str, n: int, required: bool = True) -> list[float] | None:
    path = optima_path(out, kind, n)
    if not path.exists():
        if required:
            raise InputError(f"missing optima file {path} (run 'brute' first)")
        return None
    return [float(row["optimum"]) for row in read_csv(path)]


def ensemble(config: ExperimentConfig, kind: str, n: int) -> list[Graph]:
    size = config.train_size if kind == "train" else config.test_size
    return [
        sample_erdos_renyi(n, config.edge_prob, derive_seed(config.seed, n, _KIND_CODES[kind], i))
        for i in range(size)
    ]


def cmd_generate(config: ExperimentConfig) -> list[Path]:
    written = []
    for n in config.node_sizes:
        for kind in ("train", "test"):
            path = graph_path(config.output_dir, kind, n)
            path.parent.mkdir(parents=True, exist_ok=True)
            write_graphs(ensemble(config, kind, n), path)
            written.append(path)
    return written


def brute_force_rows(graphs: Sequence[Graph]) -> list[tuple[int, float, str]]:
    rows = []
    for i, g in enumerate(graphs):
        res = brute_force_maxcut(g)
        rows.append((i, res.value, res.assignment))
    return rows


def cmd_brute(config: ExperimentConfig) -> list[Path]:
    written = []
    for n in config.node_sizes:
        for kind in ("train", "test"):
            rows = brute_force_rows(load_graph_set(config.output_dir, kind, n))
            path = optima_path(config.output_dir, kind, n)
            write_csv(path, ["index", "optimum", "assignment"], rows)
            written.append(path)
    return written


def gw_rows(graphs: Sequence[Graph], rounds: int, seed: int) -> list[tuple]:
    rows = []
    for i, g in enumerate(graphs):
        res = gw_maxcut(g, rounds=rounds, seed=derive_seed(seed, g.num_nodes, i))
        rows.append(
            (i, res.best_cut.value, repr(res.mean_cut), repr(res.relaxation_value),
             res.rounds, int(res.converged), res.best_cut.assignment)
        )
    return rows


GW_HEADER = ["index", "best_cut", "mean_cut", "relaxation", "rounds", "converged", "assignment"]


def cmd_gw(config: ExperimentConfig) -> list[Path]:
    written = []
    for n in config.node_sizes:
        graphs = load_graph_set(config.output_dir, "test", n)
        path = gw_path(config.output_dir, n)
        write_csv(path, GW_HEADER, gw_rows(graphs, config.gw_rounds, config.seed))
        written.append(path)
    return written


def cell_config(config: ExperimentConfig, n: int, p: int) -> TrainConfig:
    return replace(config.trainer, steps_P=p, seed=derive_seed(config.seed, n, p))


def cmd_train(config: ExperimentConfig) -> list[Path]:
    """Train one protocol per (N, P) cell; raises ``NumericalError`` on non-finite values."""
    out = config.output_dir
    written = []
    for n in config.node_sizes:
        train_set = load_graph_set(out, "train", n)
        test_set = load_graph_set(out, "test", n)
        test_optima = load_optima(out, "test", n, required=False)
        for p in config.qaoa_steps:
            cfg = cell_config(config, n, p)
            record = train(train_set, cfg, test_set, test_optima)
            ckpt = checkpoint_path(out, n, p)
            ckpt.parent.mkdir(parents=True, exist_ok=True)
            save_checkpoint(ckpt, record, cfg, {"num_nodes": n, "edge_prob": config.edge_prob})
            write_csv(
                history_path(out, n, p),
                ["epoch", "train_objective", "test_ratio"],
                [(e, repr(o), repr(r)) for e, o, r in record.history],
            )
            log.info("trained N=%d P=%d: objective %.4f", n, p, record.history[-1][1])
            written.append(ckpt)
    return written


RESULTS_HEADER = [
    "N", "P", "mean_ratio_qaoa", "mean_ratio_gw", "n_graphs", "seed",
    "mean_ratio_gw_expected", "gw_rounds",
]


def load_gw(config: ExperimentConfig, n: int, graphs: Sequence[Graph]) -> list[dict[str, str]]:
    path = gw_path(config.output_dir, n)
    rows = read_csv(path) if path.exists() else []
    if len(rows) != len(graphs) or any(int(r["rounds"]) != config.gw_rounds for r in rows):
        write_csv(path, GW_HEADER, gw_rows(graphs, config.gw_rounds, config.seed))
        rows = read_csv(path)
    return rows


def cmd_eval(config: ExperimentConfig) -> Path:
    """Score each trained protocol and GW on the same test graphs.

    ``mean_ratio_gw`` averages the best of ``gw_rounds`` roundings per graph;
    ``mean_ratio_gw_expected`` averages the mean over roundings, i.e. the
    expected ratio of a single GW rounding.
    """
    out = config.output_dir
    rows = []
    for n in config.node_sizes:
        test_set = load_graph_set(out, "test", n)
        optima = load_optima(out, "test", n)
        if len(optima) != len(test_set):
            raise InputError(f"optima for N={n} do not match the test set")
        gw = load_gw(config, n, test_set)
        gw_best = float(np.mean(approximation_ratios([float(r["best_cut"]) for r in gw], optima)))
        gw_expected = float(np.mean(approximation_ratios([float(r["mean_cut"]) for r in gw], optima)))
        for p in config.qaoa_steps:
            ckpt = checkpoint_path(out, n, p)
            if not ckpt.exists():
                raise InputError(f"missing checkpoint {ckpt} (run 'train' first)")
            record, _ = load_checkpoint(ckpt)
            metrics = evaluate(test_set, record.protocol, optima)
            rows.append((n, p, repr(metrics.mean_ratio), repr(gw_best), len(test_set),
                         config.seed, repr(gw_expected), config.gw_rounds))
    path = out / "results.csv"
    write_csv(path, RESULTS_HEADER, rows)
    meta = {
        "qaoa_metric": "exact expected cut / brute-force optimum, averaged over test graphs",
        "gw_metric": f"best cut of {config.gw_rounds} hyperplane roundings per graph / optimum, averaged",
        "gw_expected_metric": "mean cut over roundings per graph / optimum, averaged",
        "zero_edge_convention": "ratio 1.0 when the optimum is 0",
        "node_sizes_note": "desk-scale grid chosen for this artifact",
        "node_sizes": config.node_sizes,
    }
    atomic_write(out / "results_meta.json", json.dumps(meta, indent=1) + "\n")
    return path


def resource_rows(node_sizes: Sequence[int], steps: Sequence[int], seed: int = 0) -> list[tuple]:
    """Closed-form CNOT counts, each checked against an actually compiled circuit."""
    rng = np.random.default_rng(seed)
    rows = []
    for n in node_sizes:
        for p in steps:
            protocol = Protocol(rng.normal(0.5, 0.1, p), rng.normal(0.5, 0.1, p))
            full = compile_all_to_all(complete_graph(n), protocol)
            expected_full = all_to_all_cnots_complete(n, p)
            if cnot_count(full) != expected_full:
                raise AssertionError(f"all-to-all count mismatch at N={n} P={p}")
            if n >= 2:
                net = compile_swap_network(complete_graph(n), protocol)
                expected_net = swap_network_cnots(n, p)
                if cnot_count(net) != expected_net:
                    raise AssertionError(f"swap-network count mismatch at N={n} P={p}")
                depth = two_qubit_depth(net)
            else:
                expected_net, depth = 0, 0
            rows.append((n, p, expected_full, expected_net, depth))
    return rows


RESOURCE_HEADER = ["N", "P", "cnots_all_to_all_complete", "cnots_swap_network", "swap_network_two_qubit_layers"]


def cmd_resources(node_sizes: Sequence[int], steps: Sequence[int], path) -> Path:
    write_csv(path, RESOURCE_HEADER, resource_rows(node_sizes, steps))
    return Path(path)


def protocol_rows(protocol: Protocol) -> list[tuple[int, str, str]]:
    return [(k + 1, repr(float(b)), repr(float(g))) for k, (b, g) in enumerate(zip(protocol.betas, protocol.gammas))]


def gamma_trend(protocol: Protocol) -> float:
    """Spearman rank correlation of gamma_p with p (NaN for P < 2)."""
    if protocol.steps < 2:
        return float("nan")
    return float(spearmanr(np.arange(protocol.steps), protocol.gammas).statistic)


def cmd_protocol_dump(checkpoint, path=None) -> tuple[str, float]:
    try:
        record, _ = load_checkpoint(checkpoint)
    except OSError as exc:
        raise InputError(f"cannot read checkpoint {checkpoint}: {exc.strerror}") from None
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["p", "beta_p", "gamma_p"])
    writer.writerows(protocol_rows(record.protocol))
    if path is not None:
        atomic_write(path, buf.getvalue())
    return buf.getvalue(), gamma_trend(record.protocol)
