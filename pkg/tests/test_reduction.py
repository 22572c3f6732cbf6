import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlkuramoto import (ParameterError, RegularityError, assemble_full, broadcast,
                        complete_inter, is_broadcast_state, kuramoto_rhs, make_complete,
                        make_random_connected, make_ring_circulant, multilayer, reduce,
                        reduce_adjacency, ring_inter, twisted_state, wrap)


def test_reduce_two_layers():
    net = multilayer([make_complete(4)] * 2, complete_inter(2, 0.5))
    assert np.array_equal(reduce(net).rbar, [[0, 2], [2, 0]])


def test_reduce_three_rings():
    eps = 0.05
    net = multilayer([make_ring_circulant(100, 10)] * 3, complete_inter(3, eps))
    red = reduce(net)
    off = red.rbar[~np.eye(3, dtype=bool)]
    assert np.array_equal(off, np.full(6, 100 * eps))
    assert red.symmetric


def test_reduce_unequal_sizes():
    net = multilayer([make_complete(2), make_complete(3)], complete_inter(2, 1.0))
    red = reduce(net)
    assert np.array_equal(red.rbar, [[0, 3], [2, 0]])
    assert not red.symmetric


@pytest.mark.parametrize("eps", [0.5, 0.25, 0.125, 2.0])
def test_reduce_matches_block_row_sums_exactly(eps):
    layers = [make_random_connected(n, 0.6, 1.0, seed=n) for n in (4, 6, 8)]
    net = multilayer(layers, complete_inter(3, eps))
    assert np.array_equal(reduce_adjacency(assemble_full(net), net.layer_sizes).rbar,
                          reduce(net).rbar)


def test_reduce_matches_block_row_sums_general(rng):
    layers = [make_random_connected(n, 0.6, 1.0, seed=n) for n in (5, 7, 3)]
    eps = np.triu(rng.uniform(0, 1, (3, 3)), 1)
    net = multilayer(layers, eps + eps.T)
    got = reduce_adjacency(assemble_full(net), net.layer_sizes).rbar
    assert np.allclose(got, reduce(net).rbar, rtol=1e-12, atol=0)


def test_reduce_adjacency_rejects_irregular():
    A = assemble_full(multilayer([make_complete(2)] * 2, complete_inter(2, 1.0)))
    A[0, 2] = 0.0
    A[2, 0] = 0.0
    with pytest.raises(RegularityError):
        reduce_adjacency(A, [2, 2])


class TestBroadcast:
    def test_definition(self):
        out = broadcast([np.pi / 2, 0.0], [2, 3])
        assert np.array_equal(out, [np.pi / 2, np.pi / 2, 0, 0, 0])

    def test_three_layer_twisted(self):
        bar = np.array([0, -2 * np.pi / 3, -4 * np.pi / 3])
        out = broadcast(bar, [100] * 3)
        assert out.shape == (300,)
        for l in range(3):
            assert np.all(out[100 * l:100 * (l + 1)] == bar[l])

    def test_zeros(self):
        assert np.array_equal(broadcast(np.zeros(4), [3, 1, 2, 5]), np.zeros(11))

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            broadcast([0.0, 1.0], [1, 2, 3])

    def test_stack_of_states(self):
        out = broadcast(np.array([[0.0, 1.0], [2.0, 3.0]]), [1, 2])
        assert np.array_equal(out, [[0, 1, 1], [2, 3, 3]])


class TestIsBroadcast:
    def test_broadcast_output(self):
        ok, spread = is_broadcast_state(broadcast([0.3, -2.0, 5.0], [3, 4, 2]), [3, 4, 2])
        assert ok and np.all(spread == 0)

    def test_spread(self):
        ok, spread = is_broadcast_state([0.0, 0.5], [2], tol=0.1)
        assert not ok and spread[0] == pytest.approx(0.5)

    def test_wraparound(self):
        ok, spread = is_broadcast_state([2 * np.pi - 1e-12, 1e-12], [2], tol=1e-9)
        assert ok and spread[0] < 1e-11

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=6), st.data())
    def test_roundtrip(self, bar, data):
        sizes = data.draw(st.lists(st.integers(1, 5), min_size=len(bar), max_size=len(bar)))
        ok, _ = is_broadcast_state(broadcast(bar, sizes), sizes, 0.0)
        assert ok


def test_wrap_range():
    x = np.array([-np.pi, np.pi, 3 * np.pi, -3 * np.pi + 1e-9, 0.0, 7.0])
    w = wrap(x)
    assert np.all(w > -np.pi) and np.all(w <= np.pi)
    assert w[0] == np.pi and w[1] == np.pi
    assert np.allclose(np.exp(1j * w), np.exp(1j * x))


@pytest.mark.parametrize("M,p,kind", [(3, 1, "complete"), (5, 2, "complete"),
                                      (8, 1, "ring"), (12, 3, "ring"), (4, 0, "complete")])
def test_equilibrium_broadcasts_to_equilibrium(M, p, kind):
    omega = 0.7
    inter = complete_inter(M, 0.3) if kind == "complete" else ring_inter(M, 0.3)
    layers = [make_random_connected(6, 0.5, 1.0, seed=l) for l in range(M)]
    net = multilayer(layers, inter, omega)
    red = reduce(net)
    bar = twisted_state(M, p)
    assert np.max(np.abs(kuramoto_rhs(red.rbar, 0.0, bar))) < 1e-10
    full = kuramoto_rhs(assemble_full(net), omega, broadcast(bar, net.layer_sizes))
    assert np.max(np.abs(full - omega)) < 1e-9
