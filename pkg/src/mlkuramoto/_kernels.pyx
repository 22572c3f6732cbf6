# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: Kuramoto right-hand sides, fixed-step RK4 and cyclic Jacobi.

Summation order is fixed per row, so results are reproducible bit for bit.
"""

import numpy as np

from libc.math cimport sin, cos, sqrt, fabs, isfinite

from .errors import ConvergenceError, DivergenceError

NAME = "compiled"


cdef void _rhs_dense(const double[:, ::1] AT, double omega, const double[::1] theta,
                     double[::1] s, double[::1] c, double[::1] acs, double[::1] acc,
                     double[::1] out) noexcept nogil:
    # AT is the transpose of A; column j of A is contiguous, so each update
    # below is an axpy with no loop-carried reduction and vectorises cleanly
    cdef Py_ssize_t n = theta.shape[0]
    cdef Py_ssize_t i, j
    cdef double sj, cj
    cdef const double* col
    cdef double* ps = &acs[0]
    cdef double* pc = &acc[0]
    for i in range(n):
        s[i] = sin(theta[i])
        c[i] = cos(theta[i])
        ps[i] = 0.0
        pc[i] = 0.0
    for j in range(n):
        col = &AT[j, 0]
        sj = s[j]
        cj = c[j]
        for i in range(n):
            ps[i] += col[i] * sj
            pc[i] += col[i] * cj
    for i in range(n):
        out[i] = omega + (c[i] * ps[i] - s[i] * pc[i])


cdef void _rhs_layered(const long long[::1] indptr, const long long[::1] indices,
                       const double[::1] weights, const long long[::1] layer_of,
                       const double[:, ::1] inter, double omega,
                       const double[::1] theta, double[::1] s, double[::1] c,
                       double[::1] S, double[::1] C, double[::1] P, double[::1] Q,
                       double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = theta.shape[0]
    cdef Py_ssize_t M = inter.shape[0]
    cdef Py_ssize_t i, e, l, k
    cdef double ws, wc, w
    for l in range(M):
        S[l] = 0.0
        C[l] = 0.0
    for i in range(n):
        s[i] = sin(theta[i])
        c[i] = cos(theta[i])
        S[layer_of[i]] += s[i]
        C[layer_of[i]] += c[i]
    for l in range(M):
        P[l] = 0.0
        Q[l] = 0.0
        for k in range(M):
            P[l] += inter[l, k] * S[k]
            Q[l] += inter[l, k] * C[k]
    for i in range(n):
        ws = 0.0
        wc = 0.0
        for e in range(indptr[i], indptr[i + 1]):
            w = weights[e]
            ws += w * s[indices[e]]
            wc += w * c[indices[e]]
        l = layer_of[i]
        out[i] = omega + (c[i] * ws - s[i] * wc) + (c[i] * P[l] - s[i] * Q[l])


def rhs_dense(A, double omega, theta):
    cdef const double[:, ::1] at = np.ascontiguousarray(np.asarray(A, dtype=np.float64).T)
    cdef const double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t n = th.shape[0]
    out = np.empty(n)
    _rhs_dense(at, omega, th, np.empty(n), np.empty(n), np.empty(n), np.empty(n), out)
    return out


def rhs_layered(indptr, indices, weights, layer_of, inter, double omega, theta):
    cdef const double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t n = th.shape[0]
    cdef Py_ssize_t M = inter.shape[0]
    out = np.empty(n)
    _rhs_layered(np.ascontiguousarray(indptr, dtype=np.longlong),
                 np.ascontiguousarray(indices, dtype=np.longlong),
                 np.ascontiguousarray(weights, dtype=np.float64),
                 np.ascontiguousarray(layer_of, dtype=np.longlong),
                 np.ascontiguousarray(inter, dtype=np.float64), omega, th,
                 np.empty(n), np.empty(n), np.empty(M), np.empty(M),
                 np.empty(M), np.empty(M), out)
    return out


cdef inline bint _all_finite(const double[::1] y) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(y.shape[0]):
        if not isfinite(y[i]):
            return False
    return True


def rk4_dense(A, double omega, theta0, double dt, Py_ssize_t nsteps, Py_ssize_t record_every):
    cdef const double[:, ::1] a = np.ascontiguousarray(np.asarray(A, dtype=np.float64).T)
    cdef double[::1] y = np.array(theta0, dtype=np.float64)
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t nrec = nsteps // record_every + 1
    rec = np.empty((nrec, n))
    cdef double[:, ::1] out = rec
    cdef double[::1] k1 = np.empty(n), k2 = np.empty(n), k3 = np.empty(n), k4 = np.empty(n)
    cdef double[::1] tmp = np.empty(n), s = np.empty(n), c = np.empty(n)
    cdef double[::1] acs = np.empty(n), acc = np.empty(n)
    cdef double h2 = 0.5 * dt, h6 = dt / 6.0
    cdef Py_ssize_t step, i
    cdef Py_ssize_t bad = -1
    out[0, :] = y
    with nogil:
        for step in range(1, nsteps + 1):
            _rhs_dense(a, omega, y, s, c, acs, acc, k1)
            for i in range(n):
                tmp[i] = y[i] + h2 * k1[i]
            _rhs_dense(a, omega, tmp, s, c, acs, acc, k2)
            for i in range(n):
                tmp[i] = y[i] + h2 * k2[i]
            _rhs_dense(a, omega, tmp, s, c, acs, acc, k3)
            for i in range(n):
                tmp[i] = y[i] + dt * k3[i]
            _rhs_dense(a, omega, tmp, s, c, acs, acc, k4)
            for i in range(n):
                y[i] = y[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not _all_finite(y):
                bad = step
                break
            if step % record_every == 0:
                out[step // record_every, :] = y
    if bad >= 0:
        raise DivergenceError(f"non-finite phase at step {bad}", bad)
    return rec


def rk4_layered(indptr, indices, weights, layer_of, inter, double omega, theta0,
                double dt, Py_ssize_t nsteps, Py_ssize_t record_every):
    cdef const long long[::1] ip = np.ascontiguousarray(indptr, dtype=np.longlong)
    cdef const long long[::1] ix = np.ascontiguousarray(indices, dtype=np.longlong)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const long long[::1] lo = np.ascontiguousarray(layer_of, dtype=np.longlong)
    cdef const double[:, ::1] e = np.ascontiguousarray(inter, dtype=np.float64)
    cdef double[::1] y = np.array(theta0, dtype=np.float64)
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t M = e.shape[0]
    cdef Py_ssize_t nrec = nsteps // record_every + 1
    rec = np.empty((nrec, n))
    cdef double[:, ::1] out = rec
    cdef double[::1] k1 = np.empty(n), k2 = np.empty(n), k3 = np.empty(n), k4 = np.empty(n)
    cdef double[::1] tmp = np.empty(n), s = np.empty(n), c = np.empty(n)
    cdef double[::1] S = np.empty(M), C = np.empty(M), P = np.empty(M), Q = np.empty(M)
    cdef double h2 = 0.5 * dt, h6 = dt / 6.0
    cdef Py_ssize_t step, i
    cdef Py_ssize_t bad = -1
    out[0, :] = y
    with nogil:
        for step in range(1, nsteps + 1):
            _rhs_layered(ip, ix, w, lo, e, omega, y, s, c, S, C, P, Q, k1)
            for i in range(n):
                tmp[i] = y[i] + h2 * k1[i]
            _rhs_layered(ip, ix, w, lo, e, omega, tmp, s, c, S, C, P, Q, k2)
            for i in range(n):
                tmp[i] = y[i] + h2 * k2[i]
            _rhs_layered(ip, ix, w, lo, e, omega, tmp, s, c, S, C, P, Q, k3)
            for i in range(n):
                tmp[i] = y[i] + dt * k3[i]
            _rhs_layered(ip, ix, w, lo, e, omega, tmp, s, c, S, C, P, Q, k4)
            for i in range(n):
                y[i] = y[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not _all_finite(y):
                bad = step
                break
            if step % record_every == 0:
                out[step // record_every, :] = y
    if bad >= 0:
        raise DivergenceError(f"non-finite phase at step {bad}", bad)
    return rec


def jacobi_eigvals(S, double rtol=1e-12, Py_ssize_t max_sweeps=100):
    """Eigenvalues of a symmetric matrix by row-cyclic Jacobi rotations."""
    arr = np.array(S, dtype=np.float64, order="C")
    cdef double[:, ::1] a = arr
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, r, sweep
    cdef double apq, theta, t, cs, sn, arp, arq, off, total, target
    cdef bint converged = False
    if n < 2:
        return np.diag(arr).copy()
    with nogil:
        total = 0.0
        for p in range(n):
            for q in range(n):
                total += a[p, q] * a[p, q]
        target = rtol * sqrt(total)
        for sweep in range(max_sweeps + 1):
            off = 0.0
            for p in range(n):
                for q in range(p + 1, n):
                    off += 2.0 * a[p, q] * a[p, q]
            if sqrt(off) <= target:
                converged = True
                break
            if sweep == max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    if fabs(theta) > 1e150:
                        t = 0.5 / theta
                    elif theta == 0.0:
                        t = 1.0
                    elif theta > 0.0:
                        t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                    else:
                        t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                    cs = 1.0 / sqrt(t * t + 1.0)
                    sn = t * cs
                    a[p, p] = a[p, p] - t * apq
                    a[q, q] = a[q, q] + t * apq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for r in range(n):
                        if r != p and r != q:
                            arp = a[r, p]
                            arq = a[r, q]
                            a[r, p] = cs * arp - sn * arq
                            a[r, q] = sn * arp + cs * arq
                            a[p, r] = a[r, p]
                            a[q, r] = a[r, q]
    if not converged:
        raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    return np.diag(arr).copy()
