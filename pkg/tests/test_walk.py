import math

import numpy as np
import pytest
from networkx.generators.atlas import graph_atlas_g

from qwgi import generators as gen
from qwgi.graph import Graph, Permutation, apply_permutation
from qwgi.walk import (
    CoinSpec,
    PhaseMask,
    WalkError,
    apply_coin,
    apply_phase,
    apply_shift,
    build_index,
    evolve,
    initial_state,
    node_amplitude,
    node_amplitudes,
    step,
)

from oracles import dense_walk_operator

RNG = np.random.default_rng(2024)


def random_state(size, rng=RNG, batch=()):
    z = rng.normal(size=batch + (size,)) + 1j * rng.normal(size=batch + (size,))
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def random_mask(idx, rng=RNG):
    return PhaseMask(rng.uniform(-np.pi, np.pi, idx.n), rng.uniform(-np.pi, np.pi, idx.size))


class TestIndex:
    def test_k2(self):
        idx = build_index(gen.complete(2))
        assert idx.size == 2 and idx.reverse.tolist() == [1, 0]

    def test_c3(self):
        idx = build_index(gen.cycle(3))
        assert idx.size == 6
        pairs = {frozenset((s, int(idx.reverse[s]))) for s in range(6)}
        assert len(pairs) == 3

    def test_star(self):
        idx = build_index(gen.star(3))
        assert idx.size == 6 and idx.degrees.tolist() == [3, 1, 1, 1]

    def test_reverse_is_fixed_point_free_involution(self):
        for g in (gen.petersen(), gen.random_graph(15, 0.3, RNG), gen.star(5)):
            idx = build_index(g)
            s = np.arange(idx.size)
            assert np.array_equal(idx.reverse[idx.reverse], s)
            assert not np.any(idx.reverse == s)
            assert np.array_equal(idx.owner[idx.reverse], idx.target)
            for v in range(g.n):
                blk = idx.block(v)
                assert idx.target[blk].tolist() == list(g.adjacency[v])


class TestInitialState:
    def test_k2(self):
        psi = initial_state(build_index(gen.complete(2)))
        assert np.allclose(psi, 1 / math.sqrt(2))

    def test_c4(self):
        psi = initial_state(build_index(gen.cycle(4)))
        assert psi.shape == (8,) and np.allclose(psi, 1 / math.sqrt(8))
        assert abs(np.linalg.norm(psi) - 1) < 1e-15

    def test_edgeless(self):
        with pytest.raises(WalkError):
            initial_state(build_index(gen.empty(3)))


class TestCoin:
    def test_degree_two_swaps(self):
        idx = build_index(gen.path(3))
        psi = np.array([0.3, 0.5, 0.7, 0.11], dtype=complex)  # centre block is slots 1, 2
        out = apply_coin(psi, idx)
        assert np.allclose(out, [0.3, 0.7, 0.5, 0.11])

    def test_degree_three(self):
        idx = build_index(gen.star(3))
        psi = np.zeros(6, dtype=complex)
        psi[0] = 1
        out = apply_coin(psi, idx)
        assert np.allclose(out[:3], [-1 / 3, 2 / 3, 2 / 3])
        assert np.allclose(out[3:], 0)

    def test_grover_involution(self):
        idx = build_index(gen.random_graph(12, 0.4, RNG, min_edges=1))
        psi = random_state(idx.size, batch=(5,))
        assert np.allclose(apply_coin(apply_coin(psi, idx), idx), psi, atol=1e-13)

    def test_grover_block_structure(self):
        for d in range(1, 8):
            c = CoinSpec().block(d)
            assert np.allclose(c, c.T) and np.allclose(c @ c, np.eye(d))
            assert np.allclose(c.sum(axis=1), 1)
            assert np.allclose(np.diag(c), 2 / d - 1)

    def test_general_symmetric_coin(self):
        g = gen.cycle(5)
        idx = build_index(g)
        theta = 0.7
        coin = CoinSpec.symmetric(math.cos(theta), 1j * math.sin(theta))
        psi = random_state(idx.size)
        out = apply_coin(psi, idx, coin)
        dense = np.kron(np.eye(5), coin.block(2))
        assert np.allclose(out, dense @ psi)

    def test_non_unitary_coin_rejected(self):
        idx = build_index(gen.cycle(5))
        with pytest.raises(WalkError):
            apply_coin(random_state(idx.size), idx, CoinSpec.symmetric(0.5, 0.5))


class TestShiftAndPhase:
    def test_k2_shift(self):
        idx = build_index(gen.complete(2))
        assert np.allclose(apply_shift(np.array([0.6, 0.8j]), idx), [0.8j, 0.6])

    def test_shift_twice_is_identity(self):
        idx = build_index(gen.cycle(5))
        psi = random_state(idx.size, batch=(10,))
        assert np.array_equal(apply_shift(apply_shift(psi, idx), idx), psi)
        assert np.allclose(np.linalg.norm(apply_shift(psi, idx), axis=-1), 1, atol=1e-15)

    def test_zero_mask(self):
        idx = build_index(gen.petersen())
        psi = random_state(idx.size)
        assert np.array_equal(apply_phase(psi, PhaseMask.zeros(idx), idx), psi)

    def test_pi_on_vertex(self):
        idx = build_index(gen.complete(2))
        mask = PhaseMask(np.array([np.pi, 0.0]), np.zeros(2))
        assert np.allclose(apply_phase(np.array([0.6, 0.8]), mask, idx), [-0.6, 0.8])

    def test_pi_on_both_slots(self):
        idx = build_index(gen.complete(2))
        psi = np.array([0.6, 0.8j])
        out = apply_phase(psi, PhaseMask(np.zeros(2), np.array([np.pi, np.pi])), idx)
        assert np.allclose(out, -psi) and np.allclose(abs(out), abs(psi))

    def test_mask_size_mismatch(self):
        idx = build_index(gen.cycle(4))
        with pytest.raises(WalkError):
            apply_phase(np.ones(8), PhaseMask(np.zeros(3), np.zeros(8)), idx)


class TestStep:
    def test_c4_returns_to_equal_superposition(self):
        g = gen.cycle(4)
        idx = build_index(g)
        u = dense_walk_operator(g.adjacency)
        psi0 = initial_state(idx)
        dense = np.linalg.matrix_power(u, 8) @ psi0
        assert np.allclose(dense, psi0)
        psi = psi0
        for _ in range(8):
            psi = step(psi, idx)
        assert np.allclose(psi, psi0, atol=1e-14)

    def test_norm_after_100_steps(self):
        g = gen.random_graph(30, 0.2, RNG, min_edges=1)
        idx = build_index(g)
        mask = random_mask(idx)
        psi = random_state(idx.size)
        for _ in range(100):
            psi = step(psi, idx, mask=mask)
        assert abs(np.linalg.norm(psi) - 1) < 1e-12

    def test_matches_dense_operator_on_small_graphs(self):
        for h in graph_atlas_g()[1:]:
            if h.number_of_nodes() > 6 or h.number_of_edges() == 0:
                continue
            g = Graph.from_edges(h.number_of_nodes(), h.edges())
            idx = build_index(g)
            mask = random_mask(idx)
            u = dense_walk_operator(g.adjacency, mask.angles(idx))
            psi = random_state(idx.size, batch=(4,))
            assert np.allclose(step(psi, idx, mask=mask), psi @ u.T, atol=1e-12)

    def test_evolve_records_node_amplitudes(self):
        g = gen.petersen()
        idx = build_index(g)
        mask = random_mask(idx)
        psi = random_state(idx.size, batch=(3,))
        final, rec = evolve(psi, idx, 5, mask=mask, observe=np.array([0, 4, 9]))
        ref = psi
        for t in range(5):
            ref = step(ref, idx, mask=mask)
            for b, v in enumerate([0, 4, 9]):
                assert np.isclose(rec[b, t], node_amplitude(ref[b], idx, v))
        assert np.allclose(final, ref)

    def test_isolated_vertex_amplitude_is_zero(self):
        g = Graph.from_edges(3, [(0, 1)])
        idx = build_index(g)
        _, rec = evolve(initial_state(idx), idx, 3, observe=2)
        assert np.all(rec == 0)
        assert node_amplitudes(initial_state(idx), idx)[2] == 0


class TestNodeAmplitude:
    def test_k2(self):
        idx = build_index(gen.complete(2))
        assert np.isclose(node_amplitude(initial_state(idx), idx, 0), 1 / math.sqrt(2))

    def test_c4(self):
        idx = build_index(gen.cycle(4))
        psi = initial_state(idx)
        for v in range(4):
            assert np.isclose(node_amplitude(psi, idx, v), 2 / math.sqrt(8))

    def test_negated_by_pi_phase(self):
        g = gen.petersen()
        idx = build_index(g)
        psi = random_state(idx.size)
        node = np.zeros(g.n)
        node[3] = np.pi
        out = apply_phase(psi, PhaseMask(node, np.zeros(idx.size)), idx)
        assert np.isclose(node_amplitude(out, idx, 3), -node_amplitude(psi, idx, 3))


class TestEquivariance:
    def test_permuted_walk_is_permuted_state(self):
        for _ in range(5):
            g = gen.random_graph(10, 0.35, RNG, min_edges=1)
            p = Permutation.random(g.n, RNG)
            h = apply_permutation(g, p)
            ig, ih = build_index(g), build_index(h)
            # slot (v -> u) of g corresponds to slot (p(v) -> p(u)) of h
            slot_h = {(int(o), int(t)): s for s, (o, t) in enumerate(zip(ih.owner, ih.target))}
            smap = np.array([slot_h[(p(int(o)), p(int(t)))] for o, t in zip(ig.owner, ig.target)])
            mask_g = random_mask(ig)
            node_h = np.zeros(h.n)
            node_h[list(p.map)] = mask_g.node_phase
            edge_h = np.zeros(ih.size)
            edge_h[smap] = mask_g.diedge_phase
            mask_h = PhaseMask(node_h, edge_h)
            psi_g = random_state(ig.size)
            psi_h = np.zeros(ih.size, dtype=complex)
            psi_h[smap] = psi_g
            for _ in range(2 * g.n):
                psi_g = step(psi_g, ig, mask=mask_g)
                psi_h = step(psi_h, ih, mask=mask_h)
                assert np.allclose(psi_h[smap], psi_g, atol=1e-12)
