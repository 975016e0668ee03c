"""Compile QAOA MaxCut circuits for all-to-all and linear qubit connectivity.

The linear layout uses an odd-even transposition (brickwork) swap network: N
layers of nearest-neighbour PSWAP gates bring every pair of logical qubits
together exactly once and leave the logical order reversed. Each PSWAP carries
the ZZ phase of the pair it exchanges (angle 0 for non-edges), so one QAOA
step costs N(N-1)/2 PSWAPs.

Circuit text format, one item per line::

    circuit <num_qubits>
    H q | RX theta q | RZ theta q | CNOT c t | SWAP a b
    ZZPHASE theta a b | PSWAP theta a b
    perm p0 p1 ... p{N-1}

``perm`` maps logical qubit ``a`` to its physical position at the end of the
circuit. Angles are written with 17 significant digits.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import sim
from .errors import CapacityError, ParseError, ValidationError
from .graphs import Graph
from .qaoa import Protocol, evolve
from .sim import Gate

CNOT_COST = {"CNOT": 1, "SWAP": 3, "PSWAP": 3, "ZZPHASE": 2}
MAX_VERIFY_QUBITS = 8


@dataclass
class GateList:
    num_qubits: int
    gates: list[Gate] = field(default_factory=list)
    final_permutation: list[int] | None = None

    def __post_init__(self):
        if self.final_permutation is None:
            self.final_permutation = list(range(self.num_qubits))
        if sorted(self.final_permutation) != list(range(self.num_qubits)):
            raise ValidationError(f"final_permutation is not a bijection: {self.final_permutation}")
        for g in self.gates:
            if any(q >= self.num_qubits for q in g.qubits):
                raise ValidationError(f"{g.kind} on {g.qubits} exceeds {self.num_qubits} qubits")


def compile_all_to_all(graph: Graph, protocol: Protocol) -> GateList:
    """Textbook circuit: each ZZ term as CNOT, RZ(-gamma * w), CNOT."""
    n = graph.num_nodes
    gates = [Gate("H", (q,)) for q in range(n)]
    edges = graph.edges()
    for beta, gamma in zip(protocol.betas, protocol.gammas):
        for i, j, w in edges:
            gates += [Gate("CNOT", (i, j)), Gate("RZ", (j,), -gamma * w), Gate("CNOT", (i, j))]
        gates += [Gate("RX", (q,), beta) for q in range(n)]
    return GateList(n, gates)


def swap_network_layers(num_qubits: int) -> list[list[tuple[int, int]]]:
    """Position pairs of each brickwork layer; layer ``l`` starts at position ``l % 2``."""
    return [
        [(i, i + 1) for i in range(layer % 2, num_qubits - 1, 2)]
        for layer in range(num_qubits)
    ]


def trace_swap_network(num_qubits: int) -> tuple[list[tuple[int, int]], list[int]]:
    """Logical pairs met, in order, during one pass, and the final logical order."""
    order = list(range(num_qubits))
    met = []
    for layer in swap_network_layers(num_qubits):
        for i, j in layer:
            met.append((order[i], order[j]))
            order[i], order[j] = order[j], order[i]
    return met, order


def compile_swap_network(graph: Graph, protocol: Protocol) -> GateList:
    """Nearest-neighbour circuit on a line built from PSWAP gates.

    ``order[pos]`` tracks which logical qubit occupies each position. The
    mixer acts on every position, so it is indifferent to the current order.
    """
    n = graph.num_nodes
    if n < 2:
        raise ValidationError(f"swap network needs at least 2 qubits, got {n}")
    w = graph.weights
    order = list(range(n))
    gates = [Gate("H", (q,)) for q in range(n)]
    layers = swap_network_layers(n)
    for beta, gamma in zip(protocol.betas, protocol.gammas):
        for layer in layers:
            for i, j in layer:
                a, b = order[i], order[j]
                gates.append(Gate("PSWAP", (i, j), gamma * w[a, b]))
                order[i], order[j] = b, a
        gates += [Gate("RX", (q,), beta) for q in range(n)]
    positions = [0] * n
    for pos, logical in enumerate(order):
        positions[logical] = pos
    return GateList(n, gates, positions)


def lower_pswap(gate: Gate) -> list[Gate]:
    """Three-CNOT template for ``PSWAP(theta)`` on ``(a, b)``, exact up to global phase.

    CNOT(a,b) RZ_b(-theta) CNOT(b,a) CNOT(a,b): the first CNOT pair around the
    RZ realises the ZZ phase and the remaining CNOTs complete the swap.
    """
    if gate.kind != "PSWAP":
        raise ValidationError(f"expected PSWAP, got {gate.kind}")
    a, b = gate.qubits
    return [
        Gate("CNOT", (a, b)),
        Gate("RZ", (b,), -gate.angle),
        Gate("CNOT", (b, a)),
        Gate("CNOT", (a, b)),
    ]


def lower(circuit: GateList) -> GateList:
    """Replace every PSWAP by its CNOT template."""
    gates: list[Gate] = []
    for g in circuit.gates:
        gates.extend(lower_pswap(g) if g.kind == "PSWAP" else [g])
    return GateList(circuit.num_qubits, gates, list(circuit.final_permutation))


def cnot_count(circuit: GateList) -> int:
    """CNOTs after lowering: PSWAP and SWAP cost 3, ZZPHASE costs 2."""
    return sum(CNOT_COST.get(g.kind, 0) for g in circuit.gates)


def two_qubit_depth(circuit: GateList) -> int:
    """Number of layers when two-qubit gates are greedily packed; one-qubit gates ignored."""
    ready = [0] * circuit.num_qubits
    depth = 0
    for g in circuit.gates:
        if len(g.qubits) == 2:
            level = max(ready[q] for q in g.qubits) + 1
            for q in g.qubits:
                ready[q] = level
            depth = max(depth, level)
    return depth


def is_linear(circuit: GateList) -> bool:
    return all(len(g.qubits) == 1 or abs(g.qubits[0] - g.qubits[1]) == 1 for g in circuit.gates)


def simulate(circuit: GateList) -> sim.StateVector:
    state = sim.zero_state(circuit.num_qubits)
    return sim.apply_gates(state, circuit.gates)


def verify_equivalence(graph: Graph, protocol: Protocol, swap_protocol: Protocol | None = None) -> float:
    """Fidelity between the un-permuted swap-network state and the reference state.

    The reference is the all-to-all circuit; the lowest of its fidelity with
    the swap network and with :func:`qaoa.evolve` is returned. ``swap_protocol``
    overrides the angles used for the swap-network compilation.
    """
    if graph.num_nodes > MAX_VERIFY_QUBITS:
        raise CapacityError(f"verification limited to {MAX_VERIFY_QUBITS} qubits")
    if graph.num_nodes < 2:
        raise ValidationError("verification needs at least 2 qubits")
    reference = simulate(compile_all_to_all(graph, protocol))
    network = compile_swap_network(graph, swap_protocol if swap_protocol is not None else protocol)
    routed = sim.permute_qubits(simulate(lower(network)), network.final_permutation)
    abstract = evolve(graph, protocol)
    return min(
        sim.fidelity(reference, routed),
        sim.fidelity(abstract, routed),
        sim.fidelity(abstract, reference),
    )


def format_circuit(circuit: GateList) -> str:
    lines = [f"circuit {circuit.num_qubits}"]
    for g in circuit.gates:
        qs = " ".join(str(q) for q in g.qubits)
        if g.angle is None:
            lines.append(f"{g.kind} {qs}")
        else:
            lines.append(f"{g.kind} {g.angle:.17g} {qs}")
    lines.append("perm " + " ".join(str(p) for p in circuit.final_permutation))
    return "\n".join(lines) + "\n"


def write_circuit(circuit: GateList, path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(format_circuit(circuit), encoding="utf-8")
    os.replace(tmp, path)


def parse_circuit(text: str) -> GateList:
    num_qubits = None
    gates: list[Gate] = []
    perm = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        head = parts[0]
        try:
            if head == "circuit":
                num_qubits = int(parts[1])
            elif head == "perm":
                perm = [int(p) for p in parts[1:]]
            elif head in sim.PARAMETRIC_KINDS:
                gates.append(Gate(head, tuple(int(q) for q in parts[2:]), float(parts[1])))
            elif head in sim.UNARY_KINDS | sim.BINARY_KINDS:
                gates.append(Gate(head, tuple(int(q) for q in parts[1:])))
            else:
                raise ParseError(f"unknown record {head!r}", lineno)
        except (ValueError, IndexError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad record {line!r}: {exc}", lineno) from None
    if num_qubits is None:
        raise ParseError("missing 'circuit <num_qubits>' header")
    try:
        return GateList(num_qubits, gates, perm)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def read_circuit(path) -> GateList:
    return parse_circuit(Path(path).read_text(encoding="utf-8"))


def all_to_all_cnots_complete(n: int, p: int) -> int:
    return n * (n - 1) * p


def swap_network_cnots(n: int, p: int) -> int:
    return 3 * n * (n - 1) * p // 2
