import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qaoa_maxcut import sim
from qaoa_maxcut.errors import CapacityError, ValidationError
from qaoa_maxcut.graphs import Graph, cut_value, sample_erdos_renyi
from qaoa_maxcut.sim import Gate, StateVector


def random_state(n, rng):
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, amps / np.linalg.norm(amps))


def test_zero_state():
    np.testing.assert_array_equal(sim.zero_state(1).amplitudes, [1, 0])
    np.testing.assert_array_equal(sim.zero_state(2).amplitudes, [1, 0, 0, 0])
    with pytest.raises(CapacityError):
        sim.zero_state(25)
    with pytest.raises(CapacityError):
        sim.zero_state(0)


def test_hadamard_on_zero():
    out = sim.apply_gate(sim.zero_state(1), Gate("H", (0,)))
    np.testing.assert_allclose(out.amplitudes, [2**-0.5, 2**-0.5], atol=1e-15)


def test_zzphase_on_antialigned_basis_state():
    gamma = 0.37
    state = sim.basis_state(2, 0b01)  # bit0 = 1, bit1 = 0
    out = sim.apply_gate(state, Gate("ZZPHASE", (0, 1), gamma))
    np.testing.assert_allclose(out.amplitudes, np.exp(-1j * gamma) * state.amplitudes, atol=1e-15)
    aligned = sim.basis_state(2, 0b11)
    out = sim.apply_gate(aligned, Gate("ZZPHASE", (0, 1), gamma))
    np.testing.assert_allclose(out.amplitudes, aligned.amplitudes, atol=1e-15)


def test_cnot_truth_table():
    out = sim.apply_gate(sim.basis_state(2, 0b01), Gate("CNOT", (0, 1)))
    np.testing.assert_array_equal(out.amplitudes, sim.basis_state(2, 0b11).amplitudes)
    out = sim.apply_gate(sim.basis_state(2, 0b10), Gate("CNOT", (0, 1)))
    np.testing.assert_array_equal(out.amplitudes, sim.basis_state(2, 0b10).amplitudes)


def test_rx_pi_flips_with_phase():
    out = sim.apply_gate(sim.zero_state(1), Gate("RX", (0,), np.pi))
    np.testing.assert_allclose(out.amplitudes, [0, -1j], atol=1e-15)


def test_rz_convention():
    t = 0.8
    plus = sim.hadamard_all(sim.zero_state(1))
    out = sim.apply_gate(plus, Gate("RZ", (0,), t))
    np.testing.assert_allclose(out.amplitudes, 2**-0.5 * np.array([np.exp(-0.5j * t), np.exp(0.5j * t)]))


def test_qubit_index_is_bit_position():
    out = sim.apply_gate(sim.zero_state(3), Gate("RX", (2,), np.pi))
    assert np.argmax(np.abs(out.amplitudes)) == 0b100


@pytest.mark.parametrize(
    "kind,qubits,angle",
    [
        ("H", (0, 1), None),
        ("CNOT", (0,), None),
        ("CNOT", (1, 1), None),
        ("RX", (0,), None),
        ("H", (0,), 0.3),
        ("TOFFOLI", (0, 1), None),
    ],
)
def test_gate_validation(kind, qubits, angle):
    with pytest.raises(ValidationError):
        Gate(kind, qubits, angle)


def test_gate_index_out_of_range():
    with pytest.raises(ValidationError):
        sim.apply_gate(sim.zero_state(2), Gate("H", (2,)))


def test_hadamard_all():
    np.testing.assert_allclose(sim.hadamard_all(sim.zero_state(2)).amplitudes, [0.5] * 4)
    np.testing.assert_allclose(sim.hadamard_all(sim.zero_state(1)).amplitudes, [2**-0.5] * 2)
    twice = sim.hadamard_all(sim.hadamard_all(sim.zero_state(3)))
    np.testing.assert_allclose(twice.amplitudes, sim.zero_state(3).amplitudes, atol=1e-15)


def test_hadamard_all_matches_gatewise(rng):
    state = random_state(4, rng)
    ref = sim.apply_gates(state, [Gate("H", (q,)) for q in range(4)])
    np.testing.assert_allclose(sim.hadamard_all(state).amplitudes, ref.amplitudes, atol=1e-14)


def test_expectation_cut_examples(triangle):
    uniform = sim.hadamard_all(sim.zero_state(3))
    assert sim.expectation_cut(uniform, triangle) == pytest.approx(1.5, abs=1e-14)
    edge = Graph.from_edges(2, [(0, 1)])
    assert sim.expectation_cut(sim.basis_state(2, 0b01), edge) == 1.0
    assert sim.expectation_cut(sim.basis_state(2, 0b00), edge) == 0.0
    with pytest.raises(ValidationError):
        sim.expectation_cut(uniform, edge)


def test_expectation_cut_against_bitstring_sum(rng):
    g = sample_erdos_renyi(5, 0.6, 3)
    state = random_state(5, rng)
    probs = state.probabilities()
    ref = sum(p * cut_value(g, sim.index_to_bitstring(z, 5)) for z, p in enumerate(probs))
    assert sim.expectation_cut(state, g) == pytest.approx(ref, abs=1e-12)


def test_sampling_deterministic_state():
    assert sim.sample_bitstrings(sim.basis_state(2, 0b11), 5, seed=1) == ["11"] * 5


def test_sampling_bit_order():
    # index 1 has qubit 0 set, written as the first character
    assert sim.sample_bitstrings(sim.basis_state(3, 1), 2, seed=0) == ["100", "100"]


def test_sampling_uniform_fraction():
    plus = sim.hadamard_all(sim.zero_state(1))
    samples = sim.sample_bitstrings(plus, 100_000, seed=2024)
    frac = samples.count("1") / len(samples)
    # binomial sd is 0.0016, so 0.01 is a ~6 sigma band
    assert abs(frac - 0.5) < 0.01


def test_sampling_seed_reproducible(rng):
    state = random_state(3, rng)
    assert sim.sample_bitstrings(state, 50, seed=9) == sim.sample_bitstrings(state, 50, seed=9)
    with pytest.raises(ValidationError):
        sim.sample_bitstrings(state, 0, seed=9)


def test_sample_mean_converges_to_expectation(rng):
    g = sample_erdos_renyi(5, 0.5, 11)
    state = random_state(5, rng)
    samples = sim.sample_bitstrings(state, 1_000_000, seed=5)
    table = {sim.index_to_bitstring(z, 5): cut_value(g, sim.index_to_bitstring(z, 5)) for z in range(32)}
    values = np.array([table[s] for s in samples])
    exact = sim.expectation_cut(state, g)
    stderr = values.std(ddof=1) / np.sqrt(values.size)
    assert abs(values.mean() - exact) < 3 * stderr


def test_fidelity(rng):
    s = random_state(3, rng)
    assert sim.fidelity(s, s) == pytest.approx(1.0, abs=1e-14)
    assert sim.fidelity(sim.basis_state(1, 0), sim.basis_state(1, 1)) == 0.0
    rotated = StateVector(3, np.exp(0.9j) * s.amplitudes)
    assert sim.fidelity(s, rotated) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValidationError):
        sim.fidelity(s, sim.zero_state(2))


def test_zzphase_equals_cnot_decomposition(rng):
    gamma = 1.234
    for _ in range(100):
        s = random_state(3, rng)
        direct = sim.apply_gate(s, Gate("ZZPHASE", (0, 2), gamma))
        decomposed = sim.apply_gates(
            s, [Gate("CNOT", (0, 2)), Gate("RZ", (2,), -gamma), Gate("CNOT", (0, 2))]
        )
        assert sim.fidelity(direct, decomposed) > 1 - 1e-12
        # the decomposition differs by exactly the global phase exp(-i gamma / 2)
        np.testing.assert_allclose(direct.amplitudes, np.exp(-0.5j * gamma) * decomposed.amplitudes, atol=1e-13)


def test_rx_layer_is_driver_exponential(rng):
    from scipy.linalg import expm

    n, beta = 3, 0.77
    x = np.array([[0, 1], [1, 0]])
    hd = sum(np.kron(np.kron(np.eye(1 << (n - 1 - q)), x), np.eye(1 << q)) for q in range(n)) / 2
    s = random_state(n, rng)
    ref = expm(-1j * beta * hd) @ s.amplitudes
    out = sim.apply_gates(s, [Gate("RX", (q,), beta) for q in range(n)])
    np.testing.assert_allclose(out.amplitudes, ref, atol=1e-13)
    np.testing.assert_allclose(sim.rx_layer(s.amplitudes, n, beta), ref, atol=1e-13)
    np.testing.assert_allclose(sim.driver_action(s.amplitudes, n), hd @ s.amplitudes, atol=1e-14)


def test_pswap_is_swap_times_zzphase(rng):
    s = random_state(2, rng)
    a = sim.apply_gate(s, Gate("PSWAP", (0, 1), 0.6))
    b = sim.apply_gates(s, [Gate("ZZPHASE", (0, 1), 0.6), Gate("SWAP", (0, 1))])
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-15)


def test_permute_qubits_moves_bits():
    # logical qubit 0 sits at physical position 2
    physical = sim.basis_state(3, 0b100)
    logical = sim.permute_qubits(physical, [2, 1, 0])
    assert np.argmax(np.abs(logical.amplitudes)) == 0b001


gate_strategy = st.one_of(
    st.builds(lambda q, t: Gate("RX", (q,), t), st.integers(0, 4), st.floats(-7, 7)),
    st.builds(lambda q, t: Gate("RZ", (q,), t), st.integers(0, 4), st.floats(-7, 7)),
    st.builds(lambda q: Gate("H", (q,)), st.integers(0, 4)),
    st.builds(
        lambda k, qs, t: Gate(k, qs, t if k in ("ZZPHASE", "PSWAP") else None),
        st.sampled_from(["CNOT", "SWAP", "ZZPHASE", "PSWAP"]),
        st.lists(st.integers(0, 4), min_size=2, max_size=2, unique=True).map(tuple),
        st.floats(-7, 7),
    ),
)


@settings(max_examples=50, deadline=None)
@given(st.lists(gate_strategy, max_size=60))
def test_norm_preserved(gates):
    state = sim.apply_gates(sim.hadamard_all(sim.zero_state(5)), gates)
    assert abs(1 - state.norm_squared()) < 1e-10


def test_norm_preserved_twenty_qubits(rng):
    n = 20
    amps = sim.hadamard_layer(sim.zero_state(n).amplitudes, n)
    for _ in range(5):
        amps = sim.rx_layer(amps, n, rng.normal())
        amps = amps * np.exp(-1j * rng.normal() * rng.integers(0, 5, size=amps.size))
    assert abs(1 - np.vdot(amps, amps).real) < 1e-10


def test_norm_preserved_ten_thousand_gates(rng):
    n = 10
    kinds = ["H", "RX", "RZ", "CNOT", "SWAP", "ZZPHASE", "PSWAP"]
    state = sim.zero_state(n)
    for _ in range(10_000):
        kind = kinds[rng.integers(len(kinds))]
        arity = 1 if kind in sim.UNARY_KINDS else 2
        qubits = tuple(rng.choice(n, size=arity, replace=False))
        angle = rng.normal() * 3 if kind in sim.PARAMETRIC_KINDS else None
        state = sim.apply_gate(state, Gate(kind, qubits, angle))
    assert abs(1 - state.norm_squared()) < 1e-10


@settings(max_examples=30, deadline=None)
@given(gate_strategy, gate_strategy, st.integers(0, 2**32 - 1))
def test_disjoint_gates_commute(g1, g2, seed):
    if set(g1.qubits) & set(g2.qubits):
        return
    s = random_state(5, np.random.default_rng(seed))
    a = sim.apply_gates(s, [g1, g2])
    b = sim.apply_gates(s, [g2, g1])
    assert sim.fidelity(a, b) == pytest.approx(1.0, abs=1e-12)
