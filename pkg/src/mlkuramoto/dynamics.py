"""Kuramoto integration, order parameters and initial-state helpers."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from . import _backend
from .errors import ParameterError
from .network import MultilayerNetwork
from .reduction import ReducedNetwork, wrap


@dataclass(frozen=True)
class PhaseState:
    t: float
    theta: np.ndarray


@dataclass(frozen=True)
class SimulationParams:
    dt: float = 0.01
    T: float = 50.0
    omega: float = 0.0
    record_every: int = 10

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if not (np.isfinite(self.T) and self.T >= 0):
            raise ParameterError(f"T must be nonnegative, got {self.T}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ParameterError(f"record_every must be an integer >= 1, got {self.record_every}")
        if not np.isfinite(self.omega):
            raise ParameterError("omega must be finite")

    @property
    def nsteps(self) -> int:
        return int(round(self.T / self.dt))


@dataclass(frozen=True)
class Trajectory:
    """Phases sampled every ``dt * record_every``; row ``i`` of ``thetas`` is at ``times[i]``."""

    times: np.ndarray
    thetas: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def __iter__(self) -> Iterator[PhaseState]:
        for t, th in zip(self.times, self.thetas):
            yield PhaseState(float(t), th)

    @property
    def final(self) -> PhaseState:
        return PhaseState(float(self.times[-1]), self.thetas[-1])

    def order_parameter(self) -> np.ndarray:
        return order_parameter(self.thetas)


def _check_square(A, theta):
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ParameterError(f"adjacency must be square, got shape {A.shape}")
    if theta.ndim != 1 or theta.shape[0] != A.shape[0]:
        raise ParameterError(
            f"phase vector of shape {theta.shape} does not match {A.shape[0]} oscillators"
        )


def kuramoto_rhs(A, omega: float, theta) -> np.ndarray:
    """dθ_i/dt = ω + Σ_j A_ij sin(θ_j − θ_i)."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    _check_square(A, theta)
    return _backend.kernels.rhs_dense(A, float(omega), theta)


def _times(params: SimulationParams, nrec: int) -> np.ndarray:
    return np.arange(nrec) * (params.dt * params.record_every)


def integrate_rk4(A, theta0, params: SimulationParams, label: str = "",
                  seed=None) -> Trajectory:
    """Classical fixed-step RK4 on a dense adjacency matrix."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    theta0 = np.ascontiguousarray(theta0, dtype=np.float64)
    _check_square(A, theta0)
    thetas = _backend.dense_rk4(A.shape[0])(
        A, params.omega, theta0, params.dt, params.nsteps, int(params.record_every)
    )
    meta = {"label": label, "seed": seed, "params": params, "backend": "dense"}
    return Trajectory(_times(params, len(thetas)), thetas, meta)


def layered_operands(net: MultilayerNetwork):
    """CSR of the block-diagonal intra-layer adjacency plus the layer index of each node."""
    indptr = [0]
    indices = []
    weights = []
    for l, g in enumerate(net.layers):
        off = int(net.offsets[l])
        for row in g.adjacency:
            nz = np.flatnonzero(row)
            indices.append(nz + off)
            weights.append(row[nz])
            indptr.append(indptr[-1] + len(nz))
    indices = np.concatenate(indices) if indices else np.zeros(0, dtype=np.int64)
    weights = np.concatenate(weights) if weights else np.zeros(0)
    return (np.asarray(indptr, dtype=np.int64), indices.astype(np.int64), weights,
            net.layer_index().astype(np.int64), np.ascontiguousarray(net.inter))


def multilayer_rhs(net: MultilayerNetwork, theta) -> np.ndarray:
    """Same vector field as ``kuramoto_rhs(assemble_full(net), ...)`` without the dense matrix."""
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    if theta.shape != (net.total_size,):
        raise ParameterError(f"expected {net.total_size} phases, got shape {theta.shape}")
    ip, ix, w, lo, inter = layered_operands(net)
    return _backend.kernels.rhs_layered(ip, ix, w, lo, inter, net.omega, theta)


def integrate_multilayer(net: MultilayerNetwork, theta0, params: SimulationParams,
                         label: str = "", seed=None) -> Trajectory:
    """RK4 on a multilayer network, exploiting the all-to-all inter-layer blocks.

    Cost per step is linear in the number of intra-layer edges, so networks
    with thousands of nodes stay cheap. ``params.omega`` is used, not ``net.omega``.
    """
    theta0 = np.ascontiguousarray(theta0, dtype=np.float64)
    if theta0.shape != (net.total_size,):
        raise ParameterError(f"expected {net.total_size} phases, got shape {theta0.shape}")
    ip, ix, w, lo, inter = layered_operands(net)
    thetas = _backend.kernels.rk4_layered(
        ip, ix, w, lo, inter, params.omega, theta0, params.dt, params.nsteps,
        int(params.record_every),
    )
    meta = {"label": label, "seed": seed, "params": params, "backend": "layered"}
    return Trajectory(_times(params, len(thetas)), thetas, meta)


def integrate_reduced(red: ReducedNetwork, theta_bar0, params: SimulationParams,
                      label: str = "reduced", seed=None) -> Trajectory:
    return integrate_rk4(red.rbar, theta_bar0, params, label=label, seed=seed)


def order_parameter(theta) -> np.ndarray | float:
    """|mean(exp(iθ))| over the last axis, clipped into [0, 1]."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape[-1] < 1:
        raise ParameterError("order parameter needs at least one phase")
    r = np.abs(np.exp(1j * theta).mean(axis=-1))
    r = np.minimum(r, 1.0)
    return float(r) if r.ndim == 0 else r


def twisted_state(M: int, p: int) -> np.ndarray:
    """θ_j = −2πpj/M for j = 0..M−1."""
    if M < 1:
        raise ParameterError(f"M must be >= 1, got {M}")
    if int(p) != p:
        raise ParameterError(f"winding number must be an integer, got {p}")
    return -2.0 * np.pi * int(p) * np.arange(M) / M


def perturb(theta, amplitude: float, seed: int) -> np.ndarray:
    """Add ``amplitude * U(-π, π)`` noise, one independent draw per entry."""
    if not amplitude >= 0:
        raise ParameterError(f"amplitude must be >= 0, got {amplitude}")
    theta = np.asarray(theta, dtype=np.float64)
    u = np.random.default_rng(seed).uniform(-np.pi, np.pi, size=theta.shape)
    return theta + amplitude * u


def random_phases(n: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-np.pi, np.pi, size=n)


def rescale_time(traj: Trajectory, factor: float) -> Trajectory:
    """Sample times divided by ``factor``: the solution when all couplings are multiplied by it."""
    if not factor > 0:
        raise ParameterError(f"factor must be positive, got {factor}")
    meta = dict(traj.metadata)
    meta["time_scale"] = meta.get("time_scale", 1.0) * factor
    params = meta.get("params")
    if isinstance(params, SimulationParams):
        meta["params"] = replace(params, dt=params.dt / factor, T=params.T / factor)
    return Trajectory(traj.times / factor, traj.thetas, meta)


def max_wrapped_deviation(a, b) -> float:
    """Largest |wrap(a − b)| over all entries."""
    return float(np.max(np.abs(wrap(np.asarray(a) - np.asarray(b))), initial=0.0))
