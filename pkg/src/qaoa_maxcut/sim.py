"""Dense state-vector simulator.

Conventions used throughout the package:

* qubit ``q`` is bit ``q`` of the basis-state index (qubit 0 is the least
  significant bit);
* bitstrings are written with character ``i`` holding qubit ``i``, so the
  basis index 1 on two qubits is the string ``"10"``;
* ``RX(t) = exp(-i t X / 2)``, ``RZ(t) = exp(-i t Z / 2)``,
  ``ZZPHASE(g) = exp(-i (g/2) (1 - Z_a Z_b))`` and
  ``PSWAP(g) = SWAP . ZZPHASE(g)``;
* amplitudes are complex128 and random sampling uses numpy's PCG64 generator
  (``numpy.random.default_rng``) seeded with the caller's integer.

The ``*_layer`` helpers below work on raw amplitude arrays and accept any
number of leading batch axes, which the QAOA engine uses to evolve many graphs
at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, ValidationError

MAX_QUBITS = 24

UNARY_KINDS = frozenset({"H", "RX", "RZ"})
BINARY_KINDS = frozenset({"CNOT", "SWAP", "ZZPHASE", "PSWAP"})
PARAMETRIC_KINDS = frozenset({"RX", "RZ", "ZZPHASE", "PSWAP"})


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValidationError(
                f"expected {1 << self.num_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


@dataclass(frozen=True)
class Gate:
    """A concrete gate: ``kind`` applied to ``qubits`` with an optional ``angle``.

    For CNOT the first qubit is the control.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind in UNARY_KINDS:
            arity = 1
        elif self.kind in BINARY_KINDS:
            arity = 2
        else:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != arity:
            raise ValidationError(f"{self.kind} takes {arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != arity:
            raise ValidationError(f"{self.kind} qubits must be distinct, got {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValidationError(f"negative qubit index in {self.qubits}")
        if self.kind in PARAMETRIC_KINDS:
            if self.angle is None:
                raise ValidationError(f"{self.kind} requires an angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise ValidationError(f"{self.kind} takes no angle")

    def matrix(self) -> np.ndarray:
        """Unitary of the gate; for two-qubit gates the first qubit is the high bit."""
        return gate_matrix(self.kind, self.angle)


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    if kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
    if kind == "RX":
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "RZ":
        return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
    if kind == "CNOT":
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
        )
    if kind == "SWAP":
        return np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
        )
    if kind == "ZZPHASE":
        phase = np.exp(-1j * angle)
        return np.diag([1, phase, phase, 1]).astype(np.complex128)
    if kind == "PSWAP":
        return gate_matrix("SWAP") @ gate_matrix("ZZPHASE", angle)
    raise ValidationError(f"unknown gate kind {kind!r}")


def _check_capacity(num_qubits: int) -> None:
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise CapacityError(f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}")


def zero_state(num_qubits: int) -> StateVector:
    _check_capacity(num_qubits)
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def basis_state(num_qubits: int, index: int) -> StateVector:
    _check_capacity(num_qubits)
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def _apply_matrix(amps: np.ndarray, num_qubits: int, matrix: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    k = len(qubits)
    psi = amps.reshape((2,) * num_qubits)
    axes = [num_qubits - 1 - q for q in qubits]
    u = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes).reshape(-1)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return a new state with ``gate`` applied."""
    if any(q >= state.num_qubits for q in gate.qubits):
        raise ValidationError(
            f"{gate.kind} on qubits {gate.qubits} out of range for {state.num_qubits} qubits"
        )
    amps = _apply_matrix(state.amplitudes, state.num_qubits, gate.matrix(), gate.qubits)
    return StateVector(state.num_qubits, amps)


def apply_gates(state: StateVector, gates: Sequence[Gate]) -> StateVector:
    for gate in gates:
        state = apply_gate(state, gate)
    return state


def hadamard_all(state: StateVector) -> StateVector:
    amps = hadamard_layer(state.amplitudes, state.num_qubits)
    return StateVector(state.num_qubits, amps)


def _split(amps: np.ndarray, num_qubits: int, q: int) -> np.ndarray:
    # view with bit q isolated on axis -2
    return amps.reshape(amps.shape[:-1] + (1 << (num_qubits - q - 1), 2, 1 << q))


def hadamard_layer(amps: np.ndarray, num_qubits: int) -> np.ndarray:
    out = np.array(amps, dtype=np.complex128, copy=True)
    r = 1 / np.sqrt(2)
    for q in range(num_qubits):
        v = _split(out, num_qubits, q)
        a, b = v[..., 0, :].copy(), v[..., 1, :]
        v[..., 0, :] = r * (a + b)
        v[..., 1, :] = r * (a - b)
    return out


def rx_layer(amps: np.ndarray, num_qubits: int, angle) -> np.ndarray:
    """RX(angle) on every qubit; ``angle`` may be an array broadcast over batch axes."""
    angle = np.asarray(angle, dtype=np.float64)
    # batch angles broadcast against the (hi, lo) axes of each split view
    c = np.asarray(np.cos(angle / 2))[..., None, None]
    s = np.asarray(-1j * np.sin(angle / 2))[..., None, None]
    out = np.array(amps, dtype=np.complex128, copy=True)
    for q in range(num_qubits):
        v = _split(out, num_qubits, q)
        a, b = v[..., 0, :].copy(), v[..., 1, :].copy()
        v[..., 0, :] = c * a + s * b
        v[..., 1, :] = s * a + c * b
    return out


def driver_action(amps: np.ndarray, num_qubits: int) -> np.ndarray:
    """Return ``H_D |amps>`` with ``H_D = 1/2 sum_q X_q``."""
    out = np.zeros_like(amps)
    for q in range(num_qubits):
        src = _split(amps, num_qubits, q)
        dst = _split(out, num_qubits, q)
        dst[..., 0, :] += src[..., 1, :]
        dst[..., 1, :] += src[..., 0, :]
    return 0.5 * out


def phase_layer(amps: np.ndarray, diagonal: np.ndarray, angle) -> np.ndarray:
    """Apply ``exp(-i angle D)`` for a diagonal operator ``D`` given by its diagonal."""
    angle = np.asarray(angle, dtype=np.float64)[..., None]
    return amps * np.exp(-1j * angle * diagonal)


def expectation_diagonal(amps: np.ndarray, diagonal: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", np.abs(amps) ** 2, diagonal)


def expectation_cut(state: StateVector, graph) -> float:
    """Exact ``<psi|H_C|psi>`` for the MaxCut cost of ``graph``."""
    from .graphs import cut_diagonal

    if graph.num_nodes != state.num_qubits:
        raise ValidationError(
            f"graph has {graph.num_nodes} nodes but state has {state.num_qubits} qubits"
        )
    return float(expectation_diagonal(state.amplitudes, cut_diagonal(graph)))


def index_to_bitstring(index: int, num_qubits: int) -> str:
    return "".join("1" if (index >> q) & 1 else "0" for q in range(num_qubits))


def bitstring_to_index(bits: str) -> int:
    return sum(1 << i for i, ch in enumerate(bits) if ch == "1")


def sample_bitstrings(state: StateVector, count: int, seed: int) -> list[str]:
    """Draw ``count`` measurement outcomes from the Born distribution."""
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    probs = state.probabilities()
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.choice(probs.size, size=count, p=probs)
    return [index_to_bitstring(int(z), state.num_qubits) for z in draws]


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.num_qubits != b.num_qubits:
        raise ValidationError(f"qubit count mismatch: {a.num_qubits} vs {b.num_qubits}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def permute_qubits(state: StateVector, positions: Sequence[int]) -> StateVector:
    """Relabel qubits so that logical qubit ``a`` is read from position ``positions[a]``."""
    n = state.num_qubits
    if sorted(positions) != list(range(n)):
        raise ValidationError(f"not a permutation of 0..{n - 1}: {list(positions)}")
    psi = state.amplitudes.reshape((2,) * n)
    # logical qubit a lives on axis n-1-positions[a]; move it to axis n-1-a
    order = [n - 1 - positions[n - 1 - ax] for ax in range(n)]
    return StateVector(n, np.transpose(psi, order).reshape(-1).copy())
