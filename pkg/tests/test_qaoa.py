import numpy as np
import pytest

from qaoa_maxcut import sim
from qaoa_maxcut.errors import ValidationError
from qaoa_maxcut.graphs import Graph, brute_force_maxcut, complete_graph, sample_erdos_renyi
from qaoa_maxcut.qaoa import (
    Protocol,
    batch_expected_cut,
    batch_gradient,
    evolve,
    evolve_gatewise,
    expected_cut,
    expected_cuts,
    gradient,
    value_and_gradient,
)


def gatewise_expected_cut(graph, protocol):
    return sim.expectation_cut(evolve_gatewise(graph, protocol), graph)


def finite_difference(f, x, eps=1e-4):
    out = np.zeros_like(x)
    for k in range(x.size):
        step = np.zeros_like(x)
        step[k] = eps
        out[k] = (f(x + step) - f(x - step)) / (2 * eps)
    return out


def assert_matches_fd(analytic, numeric, rel=1e-5, abs_=1e-7):
    for a, n in zip(analytic, numeric):
        assert abs(a - n) <= max(rel * abs(n), abs_), (a, n)


def random_protocol(p, rng):
    return Protocol(rng.uniform(-np.pi, np.pi, p), rng.uniform(-np.pi, np.pi, p))


def test_protocol_shape():
    p = Protocol([0.1, 0.2], [0.3, 0.4])
    np.testing.assert_array_equal(p.flatten(), [0.1, 0.2, 0.3, 0.4])
    assert Protocol.from_flat(p.flatten()).steps == 2
    with pytest.raises(ValidationError):
        Protocol([0.1], [0.2, 0.3])
    assert Protocol.empty().steps == 0


def test_p0_is_uniform(er6):
    state = evolve(er6, Protocol.empty())
    np.testing.assert_allclose(state.amplitudes, 2 ** -3, atol=1e-15)


def test_zero_betas_keep_uniform_distribution(er6, rng):
    proto = Protocol(np.zeros(3), rng.normal(size=3))
    probs = evolve(er6, proto).probabilities()
    np.testing.assert_allclose(probs, 1 / 64, atol=1e-15)
    assert expected_cut(er6, proto) == pytest.approx(er6.num_edges / 2, abs=1e-12)


def test_single_edge_grid_search_oracle(edge):
    # brute-force grid over one period of each angle, using the gate-by-gate path
    betas = np.linspace(0, np.pi, 41)
    gammas = np.linspace(0, 2 * np.pi, 41)
    grid = np.array([[gatewise_expected_cut(edge, Protocol([b], [g])) for g in gammas] for b in betas])
    assert grid.max() == pytest.approx(1.0, abs=1e-12)
    # (pi/4, pi/2) is one of the grid maximizers (the other is (3pi/4, 3pi/2))
    assert grid[10, 10] == pytest.approx(grid.max(), abs=1e-12)
    assert (betas[10], gammas[10]) == pytest.approx((np.pi / 4, np.pi / 2))
    closed = (1 + np.outer(np.sin(2 * betas), np.sin(gammas))) / 2
    np.testing.assert_allclose(grid, closed, atol=1e-12)
    assert expected_cut(edge, Protocol([np.pi / 4], [np.pi / 2])) == pytest.approx(1.0, abs=1e-12)


def test_expected_cut_examples(triangle):
    assert expected_cut(triangle, Protocol.empty()) == pytest.approx(1.5, abs=1e-14)
    empty = Graph(4, np.zeros((4, 4)))
    assert expected_cut(empty, Protocol([0.3, 1.1], [0.7, -2.0])) == pytest.approx(0.0, abs=1e-14)


def test_fast_and_gatewise_evolution_agree(rng):
    for seed in range(5):
        g = sample_erdos_renyi(5, 0.6, seed)
        proto = random_protocol(3, rng)
        assert sim.fidelity(evolve(g, proto), evolve_gatewise(g, proto)) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(evolve(g, proto).amplitudes, evolve_gatewise(g, proto).amplitudes, atol=1e-12)


def test_weighted_edges_scale_phase(rng):
    g = Graph.from_edges(3, [(0, 1, 2.0), (1, 2, 0.5)])
    proto = random_protocol(2, rng)
    assert expected_cut(g, proto) == pytest.approx(gatewise_expected_cut(g, proto), abs=1e-12)


def test_expected_cut_bounded_by_optimum(rng):
    for seed in range(20):
        g = sample_erdos_renyi(int(rng.integers(2, 11)), 0.5, seed)
        opt = brute_force_maxcut(g).value
        for _ in range(100):
            v = expected_cut(g, random_protocol(int(rng.integers(1, 4)), rng))
            assert -1e-12 <= v <= opt + 1e-12


def test_edge_order_independence(rng):
    g = sample_erdos_renyi(6, 0.6, 4)
    proto = random_protocol(2, rng)
    edges = g.edges()
    base = gatewise_expected_cut(g, proto)
    for _ in range(3):
        shuffled = [edges[k] for k in rng.permutation(len(edges))]
        state = evolve_gatewise(g, proto, shuffled)
        assert abs(sim.expectation_cut(state, g) - base) < 1e-12


def test_periodicity(rng):
    g = sample_erdos_renyi(6, 0.5, 9)
    proto = random_protocol(3, rng)
    base = expected_cut(g, proto)
    shifted = Protocol(proto.betas + 2 * np.pi, proto.gammas - 2 * np.pi)
    assert abs(expected_cut(g, shifted) - base) < 1e-12


def test_gradient_zero_betas_gives_zero_gamma_gradient(er6, rng):
    grad = gradient(er6, Protocol(np.zeros(3), rng.normal(size=3)))
    np.testing.assert_allclose(grad[3:], 0.0, atol=1e-13)


def test_gradient_single_edge_fd(edge):
    proto = Protocol([0.3], [0.7])
    f = lambda x: gatewise_expected_cut(edge, Protocol.from_flat(x))
    assert_matches_fd(gradient(edge, proto), finite_difference(f, proto.flatten()))
    # closed form (1 + sin 2b sin g) / 2
    b, g = 0.3, 0.7
    np.testing.assert_allclose(
        gradient(edge, proto), [np.cos(2 * b) * np.sin(g), 0.5 * np.sin(2 * b) * np.cos(g)], atol=1e-13
    )


def test_gradient_six_nodes_fd(rng):
    g = sample_erdos_renyi(6, 0.5, 21)
    proto = random_protocol(3, rng)
    f = lambda x: expected_cut(g, Protocol.from_flat(x))
    assert_matches_fd(gradient(g, proto), finite_difference(f, proto.flatten()))


def test_gradient_twenty_instances_fd(rng):
    for seed in range(20):
        g = sample_erdos_renyi(int(rng.integers(2, 8)), 0.5, 100 + seed)
        proto = random_protocol(int(rng.integers(1, 4)), rng)
        f = lambda x: expected_cut(g, Protocol.from_flat(x))
        value, grad = value_and_gradient(g, proto)
        assert value == pytest.approx(expected_cut(g, proto), abs=1e-12)
        assert_matches_fd(grad, finite_difference(f, proto.flatten()))


def test_batch_expected_cut(er6, rng):
    proto = random_protocol(2, rng)
    assert batch_expected_cut([er6], proto) == pytest.approx(expected_cut(er6, proto), abs=1e-13)
    assert batch_expected_cut([er6, er6], proto) == pytest.approx(expected_cut(er6, proto), abs=1e-13)
    with pytest.raises(ValidationError):
        batch_expected_cut([], proto)
    with pytest.raises(ValidationError):
        batch_expected_cut([er6, complete_graph(3)], proto)


def test_batch_expected_cut_zero_betas():
    graphs = [sample_erdos_renyi(10, 0.5, s) for s in range(100)]
    proto = Protocol(np.zeros(2), np.array([0.4, 1.3]))
    expected = np.mean([g.num_edges / 2 for g in graphs])
    assert batch_expected_cut(graphs, proto) == pytest.approx(expected, abs=1e-10)


def test_batched_evolution_matches_single(rng):
    graphs = [sample_erdos_renyi(5, 0.5, s) for s in range(6)]
    proto = random_protocol(3, rng)
    np.testing.assert_allclose(expected_cuts(graphs, proto), [expected_cut(g, proto) for g in graphs], atol=1e-12)


def test_batch_gradient_is_mean(rng):
    graphs = [sample_erdos_renyi(5, 0.5, s) for s in range(4)]
    proto = random_protocol(2, rng)
    value, grad = batch_gradient(graphs, proto)
    np.testing.assert_allclose(grad, np.mean([gradient(g, proto) for g in graphs], axis=0), atol=1e-13)
    assert value == pytest.approx(batch_expected_cut(graphs, proto), abs=1e-12)
