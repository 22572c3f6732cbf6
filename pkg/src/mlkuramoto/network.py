"""Layer graphs, multilayer networks and the block (join) adjacency."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GenerationError, ParameterError, RegularityError

STRUCT_TOL = 1e-12
MAX_CONNECT_RETRIES = 100


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LayerGraph:
    """Undirected weighted graph of one layer.

    ``adjacency`` must be symmetric, nonnegative and have a zero diagonal.
    The array is copied and made read-only.
    """

    adjacency: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = _frozen(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParameterError(f"adjacency must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ParameterError("adjacency has non-finite entries")
        if np.any(a < 0):
            raise ParameterError("adjacency has negative entries")
        if np.any(np.diag(a) != 0):
            raise ParameterError("adjacency diagonal must be zero")
        if a.size and np.max(np.abs(a - a.T)) > STRUCT_TOL:
            raise ParameterError("adjacency is not symmetric")
        object.__setattr__(self, "adjacency", a)

    @property
    def size(self) -> int:
        return self.adjacency.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def is_connected(self) -> bool:
        """Breadth-first traversal over edges with positive weight."""
        n = self.size
        if n <= 1:
            return True
        nbrs = [np.flatnonzero(row > 0) for row in self.adjacency]
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in nbrs[i]:
                if not seen[j]:
                    seen[j] = True
                    queue.append(j)
        return bool(seen.all())

    def to_csv(self, path) -> None:
        np.savetxt(path, self.adjacency, delimiter=",", fmt="%.17g")

    @classmethod
    def from_csv(cls, path, label: str = "") -> "LayerGraph":
        a = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(a, label=label)


def make_ring_circulant(N: int, k: int, w: float = 1.0) -> LayerGraph:
    """Ring where node i links to i±1, ..., i±k (mod N) with weight ``w``."""
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    if not 0 <= k <= (N - 1) // 2:
        raise ParameterError(f"k must lie in [0, {(N - 1) // 2}] for N={N}, got {k}")
    if not w > 0:
        raise ParameterError(f"weight must be positive, got {w}")
    a = np.zeros((N, N))
    idx = np.arange(N)
    for d in range(1, k + 1):
        a[idx, (idx + d) % N] = w
        a[idx, (idx - d) % N] = w
    return LayerGraph(a, label=f"ring(N={N},k={k},w={w})")


def make_complete(N: int, w: float = 1.0) -> LayerGraph:
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    if not w > 0:
        raise ParameterError(f"weight must be positive, got {w}")
    a = np.full((N, N), float(w))
    np.fill_diagonal(a, 0.0)
    return LayerGraph(a, label=f"complete(N={N},w={w})")


def make_random_connected(N: int, p: float = 0.1, w: float = 1.0, seed: int = 0) -> LayerGraph:
    """Connected Erdős–Rényi G(N, p) graph with weight ``w`` on every edge.

    Draws are repeated from the same seeded stream until the graph is
    connected, at most ``MAX_CONNECT_RETRIES`` times.
    """
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    if not 0 < p <= 1:
        raise ParameterError(f"p must lie in (0, 1], got {p}")
    if not w > 0:
        raise ParameterError(f"weight must be positive, got {w}")
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(N, k=1)
    for _ in range(MAX_CONNECT_RETRIES):
        present = rng.random(len(iu[0])) < p
        a = np.zeros((N, N))
        a[iu[0][present], iu[1][present]] = w
        a = a + a.T
        g = LayerGraph(a, label=f"random(N={N},p={p},w={w},seed={seed})")
        if g.is_connected():
            return g
    raise GenerationError(
        f"no connected G(N={N}, p={p}) found in {MAX_CONNECT_RETRIES} attempts"
    )


def laplacian(g: LayerGraph | np.ndarray) -> np.ndarray:
    """Weighted graph Laplacian ``diag(degrees) - adjacency``."""
    a = g.adjacency if isinstance(g, LayerGraph) else np.asarray(g, dtype=np.float64)
    lap = -a.copy()
    # diagonal as minus the off-diagonal row sum keeps row sums at zero
    np.fill_diagonal(lap, 0.0)
    np.fill_diagonal(lap, -lap.sum(axis=1))
    return lap


def validate_row_regular(B, atol: float = STRUCT_TOL) -> float:
    """Return the common row sum of ``B`` or raise ``RegularityError``."""
    b = np.asarray(B, dtype=np.float64)
    if b.ndim != 2 or b.size == 0:
        raise ParameterError("row-regularity needs a nonempty 2-D matrix")
    sums = b.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - sums[0]) > atol)
    if bad.size:
        raise RegularityError(
            f"row sums differ: row 0 sums to {sums[0]!r}, rows {bad.tolist()} "
            f"sum to {sums[bad].tolist()}",
            rows=bad.tolist(),
        )
    return float(sums[0])


@dataclass(frozen=True)
class MultilayerNetwork:
    """M layers joined by all-to-all inter-layer blocks ``inter[l, k] * ones``."""

    layers: tuple
    inter: np.ndarray
    omega: float = 0.0
    _offsets: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ParameterError("a multilayer network needs at least one layer")
        for g in layers:
            if not isinstance(g, LayerGraph):
                raise ParameterError("layers must be LayerGraph instances")
        inter = _frozen(self.inter)
        M = len(layers)
        if inter.shape != (M, M):
            raise ParameterError(f"inter must be {M}x{M}, got {inter.shape}")
        if not np.all(np.isfinite(inter)) or np.any(inter < 0):
            raise ParameterError("inter-layer couplings must be finite and >= 0")
        if np.any(np.diag(inter) != 0):
            raise ParameterError("inter-layer coupling matrix must have zero diagonal")
        asym = np.abs(inter - inter.T) > STRUCT_TOL
        if asym.any():
            l, k = map(int, np.argwhere(asym)[0])
            raise ParameterError(f"inter-layer coupling is asymmetric at ({l}, {k})")
        if not np.isfinite(self.omega):
            raise ParameterError("omega must be finite")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "inter", inter)
        object.__setattr__(self, "omega", float(self.omega))
        offsets = np.concatenate([[0], np.cumsum([g.size for g in layers])])
        offsets.setflags(write=False)
        object.__setattr__(self, "_offsets", offsets)

    @property
    def M(self) -> int:
        return len(self.layers)

    @property
    def layer_sizes(self) -> tuple:
        return tuple(g.size for g in self.layers)

    @property
    def total_size(self) -> int:
        return int(self._offsets[-1])

    @property
    def offsets(self) -> np.ndarray:
        return self._offsets

    def layer_slice(self, l: int) -> slice:
        return slice(int(self._offsets[l]), int(self._offsets[l + 1]))

    def layer_index(self) -> np.ndarray:
        """Layer number of every node in concatenated order."""
        return np.repeat(np.arange(self.M), self.layer_sizes)

    def assemble_full(self) -> np.ndarray:
        return assemble_full(self)


def assemble_full(net: MultilayerNetwork) -> np.ndarray:
    """Dense block adjacency: layer adjacencies on the diagonal, ε·ones off it."""
    n = net.total_size
    a = np.empty((n, n))
    for l in range(net.M):
        rows = net.layer_slice(l)
        for k in range(net.M):
            cols = net.layer_slice(k)
            if l == k:
                a[rows, cols] = net.layers[l].adjacency
            else:
                a[rows, cols] = net.inter[l, k]
    return a


def complete_inter(M: int, epsilon: float) -> np.ndarray:
    """Every pair of layers coupled with strength ``epsilon``."""
    e = np.full((M, M), float(epsilon))
    np.fill_diagonal(e, 0.0)
    return e


def ring_inter(M: int, epsilon: float) -> np.ndarray:
    """Layer l coupled to l±1 (mod M) with strength ``epsilon``."""
    e = np.zeros((M, M))
    if M > 1:
        idx = np.arange(M)
        e[idx, (idx + 1) % M] = epsilon
        e[idx, (idx - 1) % M] = epsilon
        np.fill_diagonal(e, 0.0)
    return e


def multilayer(layers: Sequence[LayerGraph], inter, omega: float = 0.0) -> MultilayerNetwork:
    return MultilayerNetwork(tuple(layers), np.asarray(inter, dtype=np.float64), omega)
