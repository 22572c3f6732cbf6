import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlkuramoto import (GenerationError, LayerGraph, ParameterError, RegularityError,
                        assemble_full, complete_inter, laplacian, make_complete,
                        make_random_connected, make_ring_circulant, multilayer, ring_inter,
                        validate_row_regular)
from mlkuramoto.network import MultilayerNetwork


def _structural(g):
    a = g.adjacency
    assert np.array_equal(a, a.T)
    assert np.all(np.diag(a) == 0)
    assert np.all(a >= 0)


class TestRing:
    def test_degree_two(self):
        g = make_ring_circulant(5, 1, 1.0)
        assert np.array_equal(g.adjacency.sum(axis=1), np.full(5, 2.0))
        assert np.array_equal((g.adjacency > 0).sum(axis=1), np.full(5, 2))
        _structural(g)

    def test_hundred_node_ring(self):
        g = make_ring_circulant(100, 10, 1.0)
        assert np.array_equal(g.adjacency.sum(axis=1), np.full(100, 20.0))
        assert g.adjacency[0, 10] == 1 and g.adjacency[0, 90] == 1 and g.adjacency[0, 11] == 0
        assert g.is_connected()

    def test_k_zero_is_empty(self):
        assert np.array_equal(make_ring_circulant(3, 0, 1.0).adjacency, np.zeros((3, 3)))

    @pytest.mark.parametrize("N,k", [(5, 3), (4, 2), (1, 1), (6, -1)])
    def test_k_out_of_range(self, N, k):
        with pytest.raises(ParameterError):
            make_ring_circulant(N, k, 1.0)

    def test_bad_weight(self):
        with pytest.raises(ParameterError):
            make_ring_circulant(5, 1, 0.0)


class TestComplete:
    def test_k2(self):
        assert np.array_equal(make_complete(2, 1.0).adjacency, [[0, 1], [1, 0]])

    def test_row_sums(self):
        assert np.allclose(make_complete(3, 0.5).adjacency.sum(axis=1), 1.0, atol=0)

    def test_single_node(self):
        assert np.array_equal(make_complete(1, 1.0).adjacency, [[0.0]])


class TestRandom:
    def test_p_one_is_complete(self):
        for seed in range(5):
            assert np.array_equal(make_random_connected(4, 1.0, 1.0, seed).adjacency,
                                  make_complete(4, 1.0).adjacency)

    def test_seeded_determinism(self):
        a = make_random_connected(30, 0.2, 1.5, seed=9).adjacency
        b = make_random_connected(30, 0.2, 1.5, seed=9).adjacency
        assert np.array_equal(a, b)
        assert not np.array_equal(a, make_random_connected(30, 0.2, 1.5, seed=10).adjacency)

    def test_mean_degree_seed7(self):
        g = make_random_connected(100, 0.1, 1.0, seed=7)
        assert g.is_connected()
        assert 5 <= g.adjacency.sum() / 100 <= 15
        _structural(g)

    def test_mean_degree_over_seeds(self):
        # binomial mean degree 99 * 0.1 = 9.9
        means = [make_random_connected(100, 0.1, 1.0, seed=s).adjacency.sum() / 100
                 for s in range(100)]
        assert all(5 <= m <= 15 for m in means)
        assert abs(np.mean(means) - 9.9) < 0.3

    def test_retry_budget(self):
        with pytest.raises(GenerationError, match="N=60"):
            make_random_connected(60, 0.001, 1.0, seed=0)

    def test_bad_p(self):
        with pytest.raises(ParameterError):
            make_random_connected(5, 0.0, 1.0, 0)


class TestLayerGraph:
    @pytest.mark.parametrize("a", [
        [[0, 1], [2, 0]],
        [[1, 0], [0, 0]],
        [[0, -1], [-1, 0]],
        [[0, 1, 0]],
    ])
    def test_rejects_invalid(self, a):
        with pytest.raises(ParameterError):
            LayerGraph(np.array(a, dtype=float))

    def test_read_only(self):
        g = make_complete(3)
        with pytest.raises(ValueError):
            g.adjacency[0, 1] = 5.0

    def test_connectivity(self):
        a = np.zeros((4, 4))
        a[0, 1] = a[1, 0] = 1
        a[2, 3] = a[3, 2] = 1
        assert not LayerGraph(a).is_connected()
        a[1, 2] = a[2, 1] = 0.5
        assert LayerGraph(a).is_connected()

    def test_csv_roundtrip(self, tmp_path):
        g = make_random_connected(8, 0.5, 0.3, seed=1)
        g.to_csv(tmp_path / "a.csv")
        assert "," in (tmp_path / "a.csv").read_text().splitlines()[0]
        assert np.array_equal(LayerGraph.from_csv(tmp_path / "a.csv").adjacency, g.adjacency)


class TestLaplacian:
    def test_path(self):
        assert np.array_equal(laplacian(make_complete(2, 1.0)), [[1, -1], [-1, 1]])

    def test_k3_spectrum(self):
        # characteristic polynomial of L(K3) is λ(λ - 3)^2
        ev = np.linalg.eigvalsh(laplacian(make_complete(3, 1.0)))
        assert np.allclose(ev, [0, 3, 3], atol=1e-12)

    def test_empty(self):
        assert np.array_equal(laplacian(make_ring_circulant(4, 0)), np.zeros((4, 4)))

    def test_integer_rows_exact(self):
        L = laplacian(make_ring_circulant(100, 10))
        assert np.all(L.sum(axis=1) == 0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 12), st.integers(0, 2 ** 31))
    def test_float_rows_and_symmetry(self, n, seed):
        r = np.random.default_rng(seed)
        a = np.triu(r.uniform(0, 3, (n, n)) * (r.random((n, n)) < 0.6), 1)
        L = laplacian(LayerGraph(a + a.T))
        assert np.max(np.abs(L.sum(axis=1)), initial=0) < 1e-12
        assert np.array_equal(L, L.T)


class TestRowRegular:
    def test_ones(self):
        assert validate_row_regular(np.ones((3, 3))) == 3

    def test_unequal(self):
        with pytest.raises(RegularityError) as exc:
            validate_row_regular([[1, 0], [0, 2]])
        assert exc.value.rows == (1,)

    def test_scaled_ones(self):
        assert validate_row_regular(0.25 * np.ones((8, 8))) == 8 * 0.25


class TestAssemble:
    def test_single_layer(self):
        g = make_random_connected(6, 0.5, 1.0, 3)
        net = multilayer([g], np.zeros((1, 1)))
        assert np.array_equal(assemble_full(net), g.adjacency)

    def test_empty_layers(self):
        net = multilayer([make_ring_circulant(2, 0)] * 2, complete_inter(2, 0.5))
        expected = [[0, 0, .5, .5], [0, 0, .5, .5], [.5, .5, 0, 0], [.5, .5, 0, 0]]
        assert np.array_equal(assemble_full(net), expected)

    def test_k2_layers_make_k4(self):
        net = multilayer([make_complete(2)] * 2, complete_inter(2, 1.0))
        assert np.array_equal(assemble_full(net), make_complete(4).adjacency)

    def test_unequal_sizes_blocks_regular(self):
        layers = [make_complete(2), make_ring_circulant(5, 2), make_complete(3)]
        eps = np.array([[0, 0.5, 0.25], [0.5, 0, 1.0], [0.25, 1.0, 0]])
        net = multilayer(layers, eps)
        A = assemble_full(net)
        assert np.array_equal(A, A.T) and np.all(np.diag(A) == 0)
        for l in range(3):
            for k in range(3):
                if l != k:
                    block = A[net.layer_slice(l), net.layer_slice(k)]
                    assert validate_row_regular(block) == layers[k].size * eps[l, k]

    def test_rejects_asymmetric_inter(self):
        with pytest.raises(ParameterError, match=r"\(0, 1\)"):
            MultilayerNetwork((make_complete(2),) * 2, np.array([[0, 1.0], [0.5, 0]]))

    def test_inter_builders(self):
        assert np.array_equal(ring_inter(4, 1.0), [[0, 1, 0, 1], [1, 0, 1, 0],
                                                   [0, 1, 0, 1], [1, 0, 1, 0]])
        assert np.array_equal(ring_inter(2, 1.0), [[0, 1], [1, 0]])
        assert np.array_equal(complete_inter(3, 2.0), 2.0 * (1 - np.eye(3)))
