"""Numpy implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable or when
``MLKURAMOTO_PURE_PYTHON`` is set. Signatures match the extension.
"""

import numpy as np

from .errors import ConvergenceError, DivergenceError

NAME = "python"


def rhs_dense(A, omega, theta):
    s = np.sin(theta)
    c = np.cos(theta)
    # sum_j A_ij sin(t_j - t_i) = cos t_i (A sin t)_i - sin t_i (A cos t)_i
    return omega + c * (A @ s) - s * (A @ c)


def rhs_layered(indptr, indices, weights, layer_of, inter, omega, theta):
    """RHS for a multilayer network with all-to-all inter-layer blocks.

    ``indptr/indices/weights`` hold the block-diagonal intra-layer adjacency
    in CSR form; ``inter`` is the M×M coupling matrix with zero diagonal.
    """
    rows = np.repeat(np.arange(theta.shape[0]), np.diff(indptr))
    return _rhs_layered(rows, indices, weights, layer_of, inter, omega, theta)


def _rhs_layered(rows, indices, weights, layer_of, inter, omega, theta):
    n = theta.shape[0]
    M = inter.shape[0]
    s = np.sin(theta)
    c = np.cos(theta)
    ws = np.bincount(rows, weights=weights * s[indices], minlength=n)
    wc = np.bincount(rows, weights=weights * c[indices], minlength=n)
    S = np.bincount(layer_of, weights=s, minlength=M)
    C = np.bincount(layer_of, weights=c, minlength=M)
    P = inter @ S
    Q = inter @ C
    return omega + (c * ws - s * wc) + (c * P[layer_of] - s * Q[layer_of])


def _rk4(f, theta0, dt, nsteps, record_every):
    y = np.array(theta0, dtype=np.float64)
    nrec = nsteps // record_every + 1
    out = np.empty((nrec, y.shape[0]))
    out[0] = y
    h2 = 0.5 * dt
    h6 = dt / 6.0
    for step in range(1, nsteps + 1):
        # non-finite values are reported below as DivergenceError
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = f(y)
            k2 = f(y + h2 * k1)
            k3 = f(y + h2 * k2)
            k4 = f(y + dt * k3)
            y = y + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(y).all():
            raise DivergenceError(f"non-finite phase at step {step}", step)
        if step % record_every == 0:
            out[step // record_every] = y
    return out


def rk4_dense(A, omega, theta0, dt, nsteps, record_every):
    A = np.ascontiguousarray(A, dtype=np.float64)
    return _rk4(lambda y: rhs_dense(A, omega, y), theta0, dt, nsteps, record_every)


def rk4_layered(indptr, indices, weights, layer_of, inter, omega, theta0, dt, nsteps,
                record_every):
    rows = np.repeat(np.arange(len(theta0)), np.diff(indptr))
    return _rk4(
        lambda y: _rhs_layered(rows, indices, weights, layer_of, inter, omega, y),
        theta0, dt, nsteps, record_every,
    )


def _round_robin(m):
    """Rounds of disjoint index pairs covering all pairs of range(m), m even."""
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        rounds.append(pairs)
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_eigvals(S, rtol=1e-12, max_sweeps=100):
    """Eigenvalues of a symmetric matrix by parallel-ordered cyclic Jacobi.

    Each round applies n/2 rotations on disjoint index pairs at once, which
    vectorises well; a sweep is n-1 rounds covering every pair.
    """
    a = np.array(S, dtype=np.float64)
    n = a.shape[0]
    if n < 2:
        return np.diag(a).copy()
    m = n + (n % 2)
    rounds = []
    for pairs in _round_robin(m):
        pq = np.array([(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n])
        rounds.append((pq[:, 0], pq[:, 1]))
    scale = np.linalg.norm(a)
    target = rtol * scale
    for _ in range(max_sweeps):
        # direct sum; ||A||^2 - ||diag||^2 cancels catastrophically
        off = np.linalg.norm(a[~np.eye(n, dtype=bool)])
        if off <= target:
            return np.diag(a).copy()
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not active.any():
                continue
            app = a[p, p]
            aqq = a[q, q]
            safe = np.where(active, apq, 1.0)
            with np.errstate(over="ignore"):
                theta = (aqq - app) / (2.0 * safe)
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(theta == 0.0, 1.0, t)
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rp = a[p, :].copy()
            rq = a[q, :]
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp = a[:, p].copy()
            cq = a[:, q]
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
    raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
