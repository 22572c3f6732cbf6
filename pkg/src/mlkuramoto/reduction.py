"""Reduced (one oscillator per layer) system and broadcasting back to layers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .network import STRUCT_TOL, MultilayerNetwork, validate_row_regular

BROADCAST_TOL = 1e-8


@dataclass(frozen=True)
class ReducedNetwork:
    """M×M matrix of block row sums with a zero diagonal."""

    rbar: np.ndarray
    layer_sizes: tuple
    omega: float = 0.0

    def __post_init__(self):
        r = np.array(self.rbar, dtype=np.float64)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ParameterError(f"rbar must be square, got shape {r.shape}")
        if len(self.layer_sizes) != r.shape[0]:
            raise ParameterError("layer_sizes length does not match rbar")
        np.fill_diagonal(r, 0.0)
        r.setflags(write=False)
        object.__setattr__(self, "rbar", r)
        object.__setattr__(self, "layer_sizes", tuple(int(n) for n in self.layer_sizes))
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def M(self) -> int:
        return self.rbar.shape[0]

    @property
    def symmetric(self) -> bool:
        """False for the unequal-layer-size case, where stability analysis does not apply."""
        return bool(np.all(np.abs(self.rbar - self.rbar.T) <= STRUCT_TOL))


def reduce(net: MultilayerNetwork) -> ReducedNetwork:
    """rbar[l, k] = N_k * ε_lk, the row sum of the all-ones block (l, k)."""
    sizes = np.array(net.layer_sizes, dtype=np.float64)
    rbar = net.inter * sizes[None, :]
    return ReducedNetwork(rbar, net.layer_sizes, net.omega)


def reduce_adjacency(A, layer_sizes: Sequence[int], omega: float = 0.0,
                     atol: float = STRUCT_TOL) -> ReducedNetwork:
    """Reduce an externally supplied full adjacency with row-regular off-diagonal blocks."""
    a = np.asarray(A, dtype=np.float64)
    sizes = [int(n) for n in layer_sizes]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    if a.shape != (offsets[-1], offsets[-1]):
        raise ParameterError(f"adjacency shape {a.shape} does not match layer sizes {sizes}")
    M = len(sizes)
    rbar = np.zeros((M, M))
    for l in range(M):
        for k in range(M):
            if l != k:
                block = a[offsets[l]:offsets[l + 1], offsets[k]:offsets[k + 1]]
                rbar[l, k] = validate_row_regular(block, atol=atol)
    return ReducedNetwork(rbar, sizes, omega)


def broadcast(theta_bar, layer_sizes: Sequence[int]) -> np.ndarray:
    """Repeat each layer phase ``layer_sizes[l]`` times, in layer order."""
    theta_bar = np.asarray(theta_bar, dtype=np.float64)
    if theta_bar.shape[-1] != len(layer_sizes):
        raise ParameterError(
            f"{theta_bar.shape[-1]} reduced phases for {len(layer_sizes)} layers"
        )
    return np.repeat(theta_bar, layer_sizes, axis=-1)


def wrap(x):
    """Map angles to (-pi, pi]."""
    return -np.remainder(-np.asarray(x) + np.pi, 2 * np.pi) + np.pi


def layer_spreads(theta, layer_sizes: Sequence[int]) -> np.ndarray:
    """Per-layer max minus min of phases, measured relative to the layer's first node.

    Works on a single state (1-D) or on a stack of states (2-D, one per row).
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape[-1] != sum(layer_sizes):
        raise ParameterError(
            f"state of length {theta.shape[-1]} does not match layer sizes summing to "
            f"{sum(layer_sizes)}"
        )
    offsets = np.concatenate([[0], np.cumsum(layer_sizes)]).astype(int)
    out = np.zeros(theta.shape[:-1] + (len(layer_sizes),))
    for l in range(len(layer_sizes)):
        block = theta[..., offsets[l]:offsets[l + 1]]
        if block.shape[-1] == 0:
            continue
        d = wrap(block - block[..., :1])
        out[..., l] = d.max(axis=-1) - d.min(axis=-1)
    return out


def is_broadcast_state(theta, layer_sizes: Sequence[int], tol: float = BROADCAST_TOL):
    """Return ``(ok, spreads)``: ok iff every layer's wrapped spread is at most ``tol``."""
    spreads = layer_spreads(theta, layer_sizes)
    return bool(np.all(spreads <= tol)), spreads
