"""Shared builders and brute-force oracles for the test suite."""

import numpy as np

from mlkuramoto import (kuramoto_rhs, make_random_connected, multilayer)


def random_instance(rng, M=None, N=None):
    """Equal-size random connected layers with random symmetric ε in (0, 1]."""
    M = M or int(rng.integers(2, 5))
    N = N or int(rng.integers(2, 7))
    layers = [make_random_connected(N, float(rng.uniform(0.4, 1.0)),
                                    float(rng.uniform(0.5, 2.0)), int(rng.integers(1 << 30)))
              for _ in range(M)]
    eps = rng.uniform(0.0, 1.0, size=(M, M))
    eps = 1.0 - eps  # (0, 1]
    eps = np.triu(eps, 1)
    eps = eps + eps.T
    return multilayer(layers, eps)


def newton_equilibrium(A, guess, tol=1e-13, iters=100):
    """Zero of the Kuramoto vector field (ω = 0) by least-squares Newton steps."""
    x = np.array(guess, dtype=float)
    for _ in range(iters):
        f = kuramoto_rhs(A, 0.0, x)
        if np.max(np.abs(f)) < tol:
            return x
        C = A * np.cos(x[None, :] - x[:, None])
        J = C - np.diag(C.sum(axis=1))
        x = x - np.linalg.lstsq(J, f, rcond=None)[0]
    return None


def brute_rhs(A, omega, theta):
    """Double loop straight from the definition."""
    n = len(theta)
    out = np.full(n, float(omega))
    for i in range(n):
        for j in range(n):
            out[i] += A[i][j] * np.sin(theta[j] - theta[i])
    return out
