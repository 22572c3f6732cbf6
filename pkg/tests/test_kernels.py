"""Compiled and numpy kernels against each other and against numpy/brute-force oracles."""

import os

import numpy as np
import pytest

from helpers import brute_rhs
from mlkuramoto import _backend
from mlkuramoto.dynamics import layered_operands
from mlkuramoto import (ConvergenceError, assemble_full, make_random_connected, multilayer)


def test_backend_selection():
    assert "python" in _backend.available()
    assert _backend.kernels.NAME in _backend.available()
    with pytest.raises(ValueError):
        _backend.get("fortran")


def test_compiled_is_default_when_built():
    if "compiled" not in _backend.available():
        pytest.skip("extension not built")
    if os.environ.get("MLKURAMOTO_PURE_PYTHON"):
        pytest.skip("fallback forced by environment")
    import mlkuramoto
    assert mlkuramoto.BACKEND == "compiled"


def test_rhs_dense(kernels, rng):
    A = rng.uniform(0, 1, (11, 11))
    th = rng.uniform(-5, 5, 11)
    assert np.allclose(kernels.rhs_dense(A, 0.4, th), brute_rhs(A, 0.4, th), atol=1e-13)


def _net(rng):
    layers = [make_random_connected(n, 0.5, 1.3, seed=n) for n in (5, 3, 6, 4)]
    eps = np.triu(rng.uniform(0, 1, (4, 4)), 1)
    return multilayer(layers, eps + eps.T)


def test_rhs_layered(kernels, rng):
    net = _net(rng)
    th = rng.uniform(-np.pi, np.pi, net.total_size)
    got = kernels.rhs_layered(*layered_operands(net), -0.2, th)
    assert np.allclose(got, brute_rhs(assemble_full(net), -0.2, th), atol=1e-13)


def test_rk4_backends_agree(rng):
    if "compiled" not in _backend.available():
        pytest.skip("extension not built")
    c, p = _backend.get("compiled"), _backend.get("python")
    A = rng.uniform(0, 1, (8, 8))
    th = rng.uniform(-np.pi, np.pi, 8)
    a = c.rk4_dense(A, 0.1, th, 0.01, 500, 7)
    b = p.rk4_dense(A, 0.1, th, 0.01, 500, 7)
    assert a.shape == b.shape == (500 // 7 + 1, 8)
    assert np.max(np.abs(a - b)) < 1e-10
    net = _net(rng)
    ops = layered_operands(net)
    th = rng.uniform(-np.pi, np.pi, net.total_size)
    a = c.rk4_layered(*ops, 0.3, th, 0.01, 300, 10)
    b = p.rk4_layered(*ops, 0.3, th, 0.01, 300, 10)
    assert np.max(np.abs(a - b)) < 1e-10


def test_rk4_zero_steps(kernels):
    out = kernels.rk4_dense(np.zeros((2, 2)), 1.0, np.array([0.1, 0.2]), 0.01, 0, 1)
    assert np.array_equal(out, [[0.1, 0.2]])


@pytest.mark.parametrize("n", [1, 2, 3, 7, 20, 41])
def test_jacobi_vs_eigvalsh(kernels, rng, n):
    X = rng.normal(size=(n, n))
    S = X + X.T
    got = np.sort(kernels.jacobi_eigvals(S))
    assert np.allclose(got, np.linalg.eigvalsh(S), atol=1e-10 * max(1, np.abs(S).max()))


def test_jacobi_degenerate(kernels):
    S = np.ones((6, 6))  # eigenvalues 6, 0×5
    got = np.sort(kernels.jacobi_eigvals(S))
    assert np.allclose(got, [0, 0, 0, 0, 0, 6], atol=1e-12)


def test_jacobi_diagonal_untouched(kernels):
    d = np.array([3.0, -1.0, 2.0])
    assert np.array_equal(np.sort(kernels.jacobi_eigvals(np.diag(d))), np.sort(d))


def test_jacobi_does_not_mutate(kernels, rng):
    X = rng.normal(size=(5, 5))
    S = X + X.T
    keep = S.copy()
    kernels.jacobi_eigvals(S)
    assert np.array_equal(S, keep)


def test_jacobi_sweep_budget(kernels, rng):
    X = rng.normal(size=(12, 12))
    with pytest.raises(ConvergenceError):
        kernels.jacobi_eigvals(X + X.T, 1e-12, 1)


def test_dense_dispatch(monkeypatch):
    small = _backend.dense_rk4(_backend.DENSE_CROSSOVER - 1)
    large = _backend.dense_rk4(_backend.DENSE_CROSSOVER)
    assert small is _backend.kernels.rk4_dense
    assert large is _backend.get("python").rk4_dense
    monkeypatch.setattr(_backend, "kernels", _backend.get("python"))
    assert _backend.dense_rk4(10) is _backend.get("python").rk4_dense
