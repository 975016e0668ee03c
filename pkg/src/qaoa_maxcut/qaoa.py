"""QAOA ansatz for MaxCut: state evolution, expected cut and adjoint gradients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import sim
from .errors import ValidationError
from .graphs import Graph, cut_diagonal


@dataclass
class Protocol:
    """QAOA angles. Values are never wrapped into a period."""

    betas: np.ndarray
    gammas: np.ndarray

    def __post_init__(self):
        self.betas = np.atleast_1d(np.asarray(self.betas, dtype=np.float64)).copy()
        self.gammas = np.atleast_1d(np.asarray(self.gammas, dtype=np.float64)).copy()
        if self.betas.ndim != 1 or self.betas.shape != self.gammas.shape:
            raise ValidationError(
                f"betas and gammas must be 1-d of equal length, got {self.betas.shape} and {self.gammas.shape}"
            )

    @property
    def steps(self) -> int:
        return self.betas.size

    def flatten(self) -> np.ndarray:
        """Parameters as ``[betas..., gammas...]``."""
        return np.concatenate([self.betas, self.gammas])

    @classmethod
    def from_flat(cls, params) -> "Protocol":
        params = np.asarray(params, dtype=np.float64)
        if params.ndim != 1 or params.size % 2:
            raise ValidationError(f"flat protocol needs an even-length vector, got {params.shape}")
        p = params.size // 2
        return cls(params[:p], params[p:])

    @classmethod
    def empty(cls) -> "Protocol":
        return cls(np.zeros(0), np.zeros(0))


def _uniform(num_qubits: int, batch: tuple = ()) -> np.ndarray:
    return np.full(batch + (1 << num_qubits,), 2.0 ** (-num_qubits / 2), dtype=np.complex128)


def _evolve_amplitudes(costs: np.ndarray, num_qubits: int, protocol: Protocol) -> np.ndarray:
    # H^n|0> is the uniform state; each U_p is diagonal in the cut values
    amps = _uniform(num_qubits, costs.shape[:-1])
    for beta, gamma in zip(protocol.betas, protocol.gammas):
        amps = sim.phase_layer(amps, costs, gamma)
        amps = sim.rx_layer(amps, num_qubits, beta)
    return amps


def evolve(graph: Graph, protocol: Protocol) -> sim.StateVector:
    """QAOA state ``V_P U_P ... V_1 U_1 H^n |0>``.

    The cost layer ``U_p`` is the product of ``ZZPHASE(gamma_p * w_ij)`` over
    all edges, which is the diagonal ``exp(-i gamma_p cut(z))``; the mixer
    ``V_p`` is ``RX(beta_p)`` on every qubit.
    """
    sim._check_capacity(graph.num_nodes)
    amps = _evolve_amplitudes(cut_diagonal(graph), graph.num_nodes, protocol)
    return sim.StateVector(graph.num_nodes, amps)


def evolve_gatewise(graph: Graph, protocol: Protocol, edge_order: Sequence[tuple[int, int, float]] | None = None) -> sim.StateVector:
    """Reference evolution applying one ZZPHASE gate per edge through ``sim.apply_gate``."""
    edges = graph.edges() if edge_order is None else list(edge_order)
    state = sim.hadamard_all(sim.zero_state(graph.num_nodes))
    for beta, gamma in zip(protocol.betas, protocol.gammas):
        for i, j, w in edges:
            state = sim.apply_gate(state, sim.Gate("ZZPHASE", (i, j), gamma * w))
        for q in range(graph.num_nodes):
            state = sim.apply_gate(state, sim.Gate("RX", (q,), beta))
    return state


def expected_cut(graph: Graph, protocol: Protocol) -> float:
    state = evolve(graph, protocol)
    return sim.expectation_cut(state, graph)


def _check_batch(graphs: Sequence[Graph]) -> int:
    if not graphs:
        raise ValidationError("graph batch is empty")
    sizes = {g.num_nodes for g in graphs}
    if len(sizes) != 1:
        raise ValidationError(f"graphs in a batch must share a node count, got {sorted(sizes)}")
    n = sizes.pop()
    sim._check_capacity(n)
    return n


def expected_cuts(graphs: Sequence[Graph], protocol: Protocol) -> np.ndarray:
    """Expected cut of each graph, evolved together as one batch."""
    n = _check_batch(graphs)
    costs = np.stack([cut_diagonal(g) for g in graphs])
    amps = _evolve_amplitudes(costs, n, protocol)
    return sim.expectation_diagonal(amps, costs)


def batch_expected_cut(graphs: Sequence[Graph], protocol: Protocol) -> float:
    """Mean expected cut over ``graphs``, summed in index order."""
    values = expected_cuts(graphs, protocol)
    total = 0.0
    for v in values:
        total += float(v)
    return total / len(values)


def _value_and_grad(costs: np.ndarray, num_qubits: int, protocol: Protocol) -> tuple[float, np.ndarray]:
    ket = _evolve_amplitudes(costs, num_qubits, protocol)
    bra = costs * ket
    value = float(np.vdot(ket, bra).real)
    p = protocol.steps
    d_beta = np.zeros(p)
    d_gamma = np.zeros(p)
    # for U = exp(-i t G) acting last: df/dt = 2 Im <bra|G|ket>
    for k in range(p - 1, -1, -1):
        beta, gamma = protocol.betas[k], protocol.gammas[k]
        d_beta[k] = 2.0 * np.vdot(bra, sim.driver_action(ket, num_qubits)).imag
        ket = sim.rx_layer(ket, num_qubits, -beta)
        bra = sim.rx_layer(bra, num_qubits, -beta)
        d_gamma[k] = 2.0 * np.vdot(bra, costs * ket).imag
        ket = sim.phase_layer(ket, costs, -gamma)
        bra = sim.phase_layer(bra, costs, -gamma)
    return value, np.concatenate([d_beta, d_gamma])


def value_and_gradient(graph: Graph, protocol: Protocol) -> tuple[float, np.ndarray]:
    """Expected cut and its exact gradient ``[d/d betas..., d/d gammas...]``.

    Uses a reverse (adjoint) sweep holding two state vectors, so the cost is
    linear in the number of QAOA layers.
    """
    sim._check_capacity(graph.num_nodes)
    return _value_and_grad(cut_diagonal(graph), graph.num_nodes, protocol)


def gradient(graph: Graph, protocol: Protocol) -> np.ndarray:
    return value_and_gradient(graph, protocol)[1]


def batch_gradient(graphs: Sequence[Graph], protocol: Protocol) -> tuple[float, np.ndarray]:
    """Mean expected cut and mean gradient over ``graphs``, reduced in index order."""
    n = _check_batch(graphs)
    total, grad = 0.0, np.zeros(2 * protocol.steps)
    for g in graphs:
        v, dg = _value_and_grad(cut_diagonal(g), n, protocol)
        total += v
        grad += dg
    return total / len(graphs), grad / len(graphs)
