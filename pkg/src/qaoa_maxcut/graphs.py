"""Graph model, Erdos-Renyi sampling, exact MaxCut oracle and the graph file format.

Graph files are UTF-8 text. Each graph starts with a ``graph <num_nodes>``
header followed by ``edge <i> <j> <weight>`` lines with ``i < j``. Lines whose
first non-blank character is ``#`` are comments, and blank lines are ignored.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, ParseError, ValidationError

MAX_BRUTE_FORCE_NODES = 24


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected weighted graph stored as a dense symmetric weight matrix."""

    num_nodes: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if self.num_nodes < 1:
            raise ValidationError(f"num_nodes must be >= 1, got {self.num_nodes}")
        if w.shape != (self.num_nodes, self.num_nodes):
            raise ValidationError(f"weights must be {self.num_nodes}x{self.num_nodes}, got {w.shape}")
        if not np.array_equal(w, w.T):
            raise ValidationError("weight matrix is not symmetric")
        if np.any(np.diag(w) != 0):
            raise ValidationError("weight matrix has a nonzero diagonal")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_edges(cls, num_nodes: int, edges: Iterable[Sequence[float]]) -> "Graph":
        """Build from ``(i, j)`` or ``(i, j, weight)`` tuples."""
        w = np.zeros((num_nodes, num_nodes))
        for edge in edges:
            i, j = int(edge[0]), int(edge[1])
            weight = float(edge[2]) if len(edge) > 2 else 1.0
            if i == j or not (0 <= i < num_nodes and 0 <= j < num_nodes):
                raise ValidationError(f"invalid edge ({i}, {j}) for {num_nodes} nodes")
            w[i, j] = w[j, i] = weight
        return cls(num_nodes, w)

    def edges(self) -> list[tuple[int, int, float]]:
        """Edges as ``(i, j, weight)`` with ``i < j`` in lexicographic order."""
        iu, ju = np.triu_indices(self.num_nodes, k=1)
        w = self.weights[iu, ju]
        mask = w != 0
        return [(int(i), int(j), float(x)) for i, j, x in zip(iu[mask], ju[mask], w[mask])]

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.weights, k=1)))

    @property
    def total_weight(self) -> float:
        return float(np.triu(self.weights, k=1).sum())

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.num_nodes == other.num_nodes and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.num_nodes, self.weights.tobytes()))


@dataclass(frozen=True)
class CutResult:
    value: float
    assignment: str


def complete_graph(n: int) -> Graph:
    return Graph(n, np.ones((n, n)) - np.eye(n))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def sample_erdos_renyi(num_nodes: int, edge_prob: float, seed: int) -> Graph:
    """Sample G(n, p) with unit weights; each pair ``i < j`` gets one uniform draw."""
    if not 0.0 <= edge_prob <= 1.0:
        raise ValidationError(f"edge_prob must be in [0, 1], got {edge_prob}")
    if num_nodes < 1:
        raise ValidationError(f"num_nodes must be >= 1, got {num_nodes}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(num_nodes, k=1)
    keep = rng.random(iu.size) < edge_prob
    w = np.zeros((num_nodes, num_nodes))
    w[iu[keep], ju[keep]] = 1.0
    return Graph(num_nodes, w + w.T)


def _assignment_bits(graph: Graph, assignment) -> np.ndarray:
    if isinstance(assignment, str):
        if set(assignment) - {"0", "1"}:
            raise ValidationError(f"assignment must be a 0/1 string, got {assignment!r}")
        bits = np.array([ch == "1" for ch in assignment], dtype=bool)
    else:
        bits = np.asarray(assignment).astype(bool)
    if bits.shape != (graph.num_nodes,):
        raise ValidationError(f"assignment length {bits.size} != num_nodes {graph.num_nodes}")
    return bits


def cut_value(graph: Graph, assignment) -> float:
    """Total weight of edges whose endpoints get different bits.

    ``assignment`` is a ``"0"/"1"`` string (character ``i`` is node ``i``) or a
    0/1 sequence.
    """
    bits = _assignment_bits(graph, assignment)
    crossing = bits[:, None] != bits[None, :]
    return float(np.triu(graph.weights * crossing, k=1).sum())


def cut_values(graph: Graph, indices: np.ndarray) -> np.ndarray:
    """Cut value of every basis index in ``indices`` (bit ``i`` is node ``i``)."""
    indices = np.asarray(indices, dtype=np.int64)
    out = np.zeros(indices.shape, dtype=np.float64)
    for i, j, w in graph.edges():
        out += w * (((indices >> i) ^ (indices >> j)) & 1)
    return out


def cut_diagonal(graph: Graph) -> np.ndarray:
    """Diagonal of the cost Hamiltonian: the cut value of every basis state."""
    if graph.num_nodes > MAX_BRUTE_FORCE_NODES:
        raise CapacityError(f"{graph.num_nodes} nodes exceeds {MAX_BRUTE_FORCE_NODES}")
    return cut_values(graph, np.arange(1 << graph.num_nodes))


def brute_force_maxcut(graph: Graph, chunk: int = 1 << 20) -> CutResult:
    """Exact MaxCut by enumeration with node 0 fixed to side 0.

    Ties go to the smallest assignment integer among those enumerated.
    """
    n = graph.num_nodes
    if n > MAX_BRUTE_FORCE_NODES:
        raise CapacityError(f"brute force limited to {MAX_BRUTE_FORCE_NODES} nodes, got {n}")
    total = 1 << (n - 1)
    best_value, best_index = -np.inf, 0
    for start in range(0, total, chunk):
        # enumerate the free bits 1..n-1; bit 0 stays 0
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64) << 1
        vals = cut_values(graph, idx)
        k = int(np.argmax(vals))
        if vals[k] > best_value:
            best_value, best_index = float(vals[k]), int(idx[k])
    bits = "".join("1" if (best_index >> i) & 1 else "0" for i in range(n))
    return CutResult(best_value, bits)


def write_graphs(graphs: Sequence[Graph], path) -> None:
    """Write graphs to ``path`` atomically (temp file then rename)."""
    path = Path(path)
    lines = []
    for g in graphs:
        lines.append(f"graph {g.num_nodes}")
        for i, j, w in g.edges():
            lines.append(f"edge {i} {j} {w!r}")
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    os.replace(tmp, path)


def read_graphs(path) -> list[Graph]:
    graphs: list[Graph] = []
    n = None
    weights = None

    def finish():
        if weights is not None:
            graphs.append(Graph(n, weights + weights.T))

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "graph":
                if len(parts) != 2:
                    raise ParseError("expected 'graph <num_nodes>'", lineno)
                finish()
                try:
                    n = int(parts[1])
                except ValueError:
                    raise ParseError(f"bad node count {parts[1]!r}", lineno) from None
                if n < 1:
                    raise ParseError(f"node count must be >= 1, got {n}", lineno)
                weights = np.zeros((n, n))
            elif parts[0] == "edge":
                if weights is None:
                    raise ParseError("edge record before any graph header", lineno)
                if len(parts) != 4:
                    raise ParseError("expected 'edge <i> <j> <weight>'", lineno)
                try:
                    i, j, w = int(parts[1]), int(parts[2]), float(parts[3])
                except ValueError:
                    raise ParseError(f"bad edge record {line!r}", lineno) from None
                if not i < j:
                    raise ParseError(f"edge requires i < j, got {i} {j}", lineno)
                if j >= n:
                    raise ParseError(f"node {j} out of range for {n} nodes", lineno)
                if weights[i, j] != 0:
                    raise ParseError(f"duplicate edge {i} {j}", lineno)
                if w == 0 or not np.isfinite(w):
                    raise ParseError(f"edge weight must be finite and nonzero, got {w}", lineno)
                weights[i, j] = w
            else:
                raise ParseError(f"unknown record type {parts[0]!r}", lineno)
    finish()
    return graphs
