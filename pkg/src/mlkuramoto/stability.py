"""Jacobians at broadcast equilibria, their spectra and stability verdicts.

The full Jacobian at a broadcast equilibrium has diagonal blocks
``-λ_l I - L_l`` and off-diagonal blocks ``ε_lk cos(θ̄_k - θ̄_l) · ones``.
Its spectrum is the union of the shifted nonzero layer-Laplacian spectra
``-μ - λ_l`` with the spectrum of the reduced Jacobian, which lets large
networks be certified from small eigenproblems.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .dynamics import (SimulationParams, integrate_multilayer, kuramoto_rhs, perturb)
from .errors import (AssumptionError, ConnectivityError, NotEquilibriumError,
                     ParameterError)
from .network import MultilayerNetwork, laplacian, validate_row_regular
from .reduction import ReducedNetwork, broadcast, reduce, wrap

ZERO_TOL = 1e-9
EQUILIBRIUM_TOL = 1e-8
SYMMETRY_TOL = 1e-9

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"


def scaled_tol(base: float, inf_norm: float) -> float:
    return base * max(1.0, float(inf_norm))


def eig_symmetric(S, sym_tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Sorted eigenvalues of a symmetric matrix via cyclic Jacobi rotations."""
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ParameterError(f"matrix must be square, got shape {S.shape}")
    if S.size == 0:
        return np.zeros(0)
    asym = np.max(np.abs(S - S.T))
    if asym > scaled_tol(sym_tol, np.max(np.abs(S))):
        raise ParameterError(f"matrix is not symmetric (max |S - S^T| = {asym:.3g})")
    S = 0.5 * (S + S.T)
    return np.sort(_backend.kernels.jacobi_eigvals(np.ascontiguousarray(S)))


def reduced_residual(red: ReducedNetwork, theta_bar) -> float:
    """max |dθ̄/dt − ω| of the reduced system at ``theta_bar``."""
    rhs = kuramoto_rhs(red.rbar, 0.0, theta_bar)
    return float(np.max(np.abs(rhs), initial=0.0))


@dataclass(frozen=True)
class ReducedJacobian:
    matrix: np.ndarray
    lambdas: np.ndarray


@dataclass(frozen=True)
class FullJacobian:
    matrix: np.ndarray
    lambdas: np.ndarray
    layer_sizes: tuple

    def block_reduce(self, atol: float = 1e-10) -> np.ndarray:
        """M×M matrix of the common row sums of each block."""
        offsets = np.concatenate([[0], np.cumsum(self.layer_sizes)])
        M = len(self.layer_sizes)
        out = np.empty((M, M))
        for l in range(M):
            for k in range(M):
                block = self.matrix[offsets[l]:offsets[l + 1], offsets[k]:offsets[k + 1]]
                out[l, k] = validate_row_regular(block, atol=atol)
        return out


def _cos_diffs(theta_bar):
    theta_bar = np.asarray(theta_bar, dtype=np.float64)
    # entry (i, j) is cos(θ̄_j − θ̄_i)
    return np.cos(theta_bar[None, :] - theta_bar[:, None])


def _require_equilibrium(red: ReducedNetwork, theta_bar, tol: float):
    theta_bar = np.asarray(theta_bar, dtype=np.float64)
    if theta_bar.shape != (red.M,):
        raise ParameterError(f"expected {red.M} reduced phases, got shape {theta_bar.shape}")
    res = reduced_residual(red, theta_bar)
    if res > tol:
        raise NotEquilibriumError(
            f"reduced state is not an equilibrium (max residual {res:.3g} > {tol:g})", res
        )
    return theta_bar


def jacobian_reduced(red: ReducedNetwork, theta_bar_star,
                     residual_tol: float = EQUILIBRIUM_TOL) -> ReducedJacobian:
    theta_bar_star = _require_equilibrium(red, theta_bar_star, residual_tol)
    off = red.rbar * _cos_diffs(theta_bar_star)
    np.fill_diagonal(off, 0.0)
    lambdas = off.sum(axis=1)
    J = off.copy()
    np.fill_diagonal(J, -lambdas)
    return ReducedJacobian(J, lambdas)


def check_assumptions(net: MultilayerNetwork) -> None:
    """Equal layer sizes and connected layers; raise ``AssumptionError`` otherwise."""
    sizes = set(net.layer_sizes)
    if len(sizes) != 1:
        raise AssumptionError(
            f"stability analysis needs equal layer sizes, got {list(net.layer_sizes)}"
        )
    for l, g in enumerate(net.layers):
        if not g.is_connected():
            raise ConnectivityError(f"layer {l} ({g.label or 'unnamed'}) is not connected")


def jacobian_full(net: MultilayerNetwork, theta_bar_star,
                  residual_tol: float = EQUILIBRIUM_TOL) -> FullJacobian:
    check_assumptions(net)
    red = reduce(net)
    theta_bar_star = _require_equilibrium(red, theta_bar_star, residual_tol)
    cosd = _cos_diffs(theta_bar_star)
    lambdas = jacobian_reduced(red, theta_bar_star, residual_tol).lambdas
    n = net.total_size
    J = np.empty((n, n))
    for l in range(net.M):
        rows = net.layer_slice(l)
        for k in range(net.M):
            cols = net.layer_slice(k)
            if l == k:
                N = net.layers[l].size
                J[rows, cols] = -lambdas[l] * np.eye(N) - laplacian(net.layers[l])
            else:
                J[rows, cols] = net.inter[l, k] * cosd[l, k]
    return FullJacobian(J, lambdas, net.layer_sizes)


def jacobian_fd(A, theta_star, h: float = 1e-6, omega: float = 0.0) -> np.ndarray:
    """Central finite differences of the Kuramoto vector field, one column per phase."""
    if not h > 0:
        raise ParameterError(f"step must be positive, got {h}")
    A = np.asarray(A, dtype=np.float64)
    x = np.array(theta_star, dtype=np.float64)
    n = x.shape[0]
    J = np.empty((n, n))
    for j in range(n):
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        J[:, j] = (kuramoto_rhs(A, omega, xp) - kuramoto_rhs(A, omega, xm)) / (2.0 * h)
    return J


@dataclass
class SpectrumReport:
    """Eigenvalues sorted ascending, each tagged with the branch it came from.

    ``provenance[i]`` is ``("layer", l)`` or ``("reduced", None)``.
    """

    eigenvalues: np.ndarray
    provenance: list
    verdict: str
    zero_tolerance: float
    lambdas: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self):
        return len(self.eigenvalues)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "provenance": [{"branch": b, "layer_index": i} for b, i in self.provenance],
            "verdict": self.verdict,
            "zero_tolerance": self.zero_tolerance,
            "lambdas": [float(x) for x in self.lambdas],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumReport":
        return cls(
            eigenvalues=np.asarray(d["eigenvalues"], dtype=np.float64),
            provenance=[(p["branch"], p["layer_index"]) for p in d["provenance"]],
            verdict=d["verdict"],
            zero_tolerance=float(d["zero_tolerance"]),
            lambdas=np.asarray(d.get("lambdas", []), dtype=np.float64),
        )


def classify_stability(spectrum, zero_tol: float | None = None) -> str:
    """Stable: one zero mode, the rest negative. Unstable: any positive eigenvalue."""
    if isinstance(spectrum, SpectrumReport):
        eigs = spectrum.eigenvalues
        if zero_tol is None:
            zero_tol = spectrum.zero_tolerance
    else:
        eigs = np.asarray(spectrum, dtype=np.float64)
    if zero_tol is None:
        zero_tol = ZERO_TOL
    if np.any(eigs > zero_tol):
        return UNSTABLE
    zeros = int(np.sum(np.abs(eigs) < zero_tol))
    if zeros == 1 and np.all((np.abs(eigs) < zero_tol) | (eigs < -zero_tol)):
        return STABLE
    return MARGINAL


def _report(eigs, prov, lambdas, zero_tol) -> SpectrumReport:
    eigs = np.asarray(eigs, dtype=np.float64)
    order = np.argsort(eigs, kind="stable")
    eigs = eigs[order]
    prov = [prov[i] for i in order]
    return SpectrumReport(eigs, prov, classify_stability(eigs, zero_tol), zero_tol,
                          np.asarray(lambdas, dtype=np.float64))


def spectrum_reduced(red: ReducedNetwork, theta_bar_star,
                     zero_tol: float = ZERO_TOL) -> SpectrumReport:
    if not red.symmetric:
        raise AssumptionError("reduced matrix is asymmetric (unequal layer sizes)")
    jac = jacobian_reduced(red, theta_bar_star)
    tol = scaled_tol(zero_tol, np.max(np.abs(jac.matrix).sum(axis=1)))
    eigs = eig_symmetric(jac.matrix)
    return _report(eigs, [("reduced", None)] * len(eigs), jac.lambdas, tol)


def spectrum_direct(matrix, zero_tol: float = ZERO_TOL):
    """Sorted eigenvalues of an assembled Jacobian plus its verdict."""
    matrix = np.asarray(matrix, dtype=np.float64)
    tol = scaled_tol(zero_tol, np.max(np.abs(matrix).sum(axis=1), initial=0.0))
    eigs = eig_symmetric(matrix)
    return eigs, classify_stability(eigs, tol)


def full_inf_norm(net: MultilayerNetwork, theta_bar_star, lambdas) -> float:
    """Max absolute row sum of the full Jacobian, computed blockwise."""
    sizes = np.asarray(net.layer_sizes, dtype=np.float64)
    inter_part = (net.inter * np.abs(_cos_diffs(theta_bar_star))) @ sizes
    best = 0.0
    for l, g in enumerate(net.layers):
        deg = g.degrees
        rows = np.abs(lambdas[l] + deg) + deg + inter_part[l]
        best = max(best, float(rows.max(initial=0.0)))
    return best


def spectrum_via_join(net: MultilayerNetwork, theta_bar_star,
                      zero_tol: float = ZERO_TOL) -> SpectrumReport:
    """Full-Jacobian spectrum from layer Laplacians and the reduced Jacobian.

    Never assembles the full matrix.
    """
    check_assumptions(net)
    red = reduce(net)
    jac = jacobian_reduced(red, theta_bar_star)
    tol = scaled_tol(zero_tol, full_inf_norm(net, theta_bar_star, jac.lambdas))
    eigs = []
    prov = []
    for l, g in enumerate(net.layers):
        L = laplacian(g)
        mu = eig_symmetric(L)
        ltol = scaled_tol(zero_tol, np.max(np.abs(L).sum(axis=1), initial=0.0))
        drop = int(np.argmin(np.abs(mu)))
        rest = np.delete(mu, drop)
        if np.any(np.abs(rest) < ltol):
            raise ConnectivityError(
                f"layer {l} Laplacian has more than one zero eigenvalue (disconnected)"
            )
        eigs.extend(-rest - jac.lambdas[l])
        prov.extend([("layer", l)] * len(rest))
    red_eigs = eig_symmetric(jac.matrix)
    eigs.extend(red_eigs)
    prov.extend([("reduced", None)] * len(red_eigs))
    return _report(eigs, prov, jac.lambdas, tol)


def equilibrium_distance(theta, theta_star) -> float:
    """max |wrap(θ − θ* − c)| with c the circular mean offset (removes global phase shifts)."""
    d = np.asarray(theta) - np.asarray(theta_star)
    c = np.angle(np.exp(1j * d).mean(axis=-1))
    return np.max(np.abs(wrap(d - np.asarray(c)[..., None])), axis=-1)


@dataclass(frozen=True)
class CrossCheck:
    verdict: str
    final_distance: float
    max_distance: float
    consistent: bool | None
    T: float


def simulation_cross_check(net: MultilayerNetwork, theta_bar_star, verdict: str,
                           amplitude: float = 0.01, seed: int = 0, T: float = 200.0,
                           dt: float = 0.01, return_tol: float = 1e-3,
                           escape_tol: float = 0.1) -> CrossCheck:
    """Perturb every oscillator of the broadcast equilibrium and integrate.

    A stable verdict is consistent when the state returns within ``return_tol``
    of the rotating equilibrium orbit (modulo a global shift) by time ``T``; an
    unstable one when it leaves the ``escape_tol`` neighbourhood.
    """
    theta_star = broadcast(theta_bar_star, net.layer_sizes)
    theta0 = perturb(theta_star, amplitude, seed)
    params = SimulationParams(dt=dt, T=T, omega=net.omega, record_every=100)
    traj = integrate_multilayer(net, theta0, params, label="cross-check", seed=seed)
    orbit = theta_star[None, :] + net.omega * traj.times[:, None]
    dist = equilibrium_distance(traj.thetas, orbit)
    final, worst = float(dist[-1]), float(dist.max())
    if verdict == STABLE:
        consistent = final < return_tol
    elif verdict == UNSTABLE:
        consistent = worst > escape_tol
    else:
        consistent = None
    return CrossCheck(verdict, final, worst, consistent, float(traj.times[-1]))
