"""Random-graph sampling from latent positions, plus time-varying SBM latents.

Graphs are undirected and simple. Edges are stored as a sorted (m, 2) int64
array of pairs with i < j; dense or sparse adjacency matrices are
materialized only on demand.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ._accel import extract_edges
from .errors import DataError, NotPositiveSemidefiniteError

# Inner products may drift slightly outside [0, 1]; violations up to this
# tolerance are clamped (and counted), larger ones are an error.
CLAMP_TOL = 0.05

_SAMPLE_BLOCK_ROWS = 512


@dataclass(frozen=True)
class GraphSnapshot:
    """One undirected simple graph observed at process time `time`."""

    time: float
    n: int
    edges: np.ndarray  # (m, 2) int64, each row (i, j) with i < j, lex sorted

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", e)
        if e.size and (e.min() < 0 or e.max() >= self.n):
            raise DataError(f"edge endpoint out of range for n={self.n}")
        if e.size and not (e[:, 0] < e[:, 1]).all():
            raise DataError("edges must be stored as (i, j) with i < j")

    @property
    def edge_count(self) -> int:
        return self.edges.shape[0]

    def adjacency(self, sparse: bool = True):
        """Adjacency matrix as CSR (default) or dense float64."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        if sparse:
            data = np.ones(2 * len(i))
            a = sp.coo_matrix(
                (data, (np.concatenate([i, j]), np.concatenate([j, i]))),
                shape=(self.n, self.n),
            )
            return a.tocsr()
        a = np.zeros((self.n, self.n))
        a[i, j] = 1.0
        a[j, i] = 1.0
        return a


@dataclass(frozen=True)
class LatentMatrix:
    """Latent positions at one time: row i is node i's vector in R^d."""

    time: float
    rows: np.ndarray  # (n, d) float64

    def __post_init__(self):
        r = np.ascontiguousarray(np.atleast_2d(np.asarray(self.rows, dtype=np.float64)))
        object.__setattr__(self, "rows", r)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class SbmSpec:
    """Two-or-more-block SBM: K x K edge probabilities plus block sizes."""

    block_matrix: np.ndarray
    block_sizes: tuple[int, ...] = field(default=())

    def __post_init__(self):
        b = np.asarray(self.block_matrix, dtype=np.float64)
        object.__setattr__(self, "block_matrix", b)
        object.__setattr__(self, "block_sizes", tuple(int(s) for s in self.block_sizes))
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise DataError("block matrix must be square")
        if not np.allclose(b, b.T, atol=1e-12):
            raise DataError("block matrix must be symmetric")
        if b.min() < 0.0 or b.max() > 1.0:
            raise DataError("block probabilities must lie in [0, 1]")
        if len(self.block_sizes) != b.shape[0]:
            raise DataError("need one block size per block")
        if any(s <= 0 for s in self.block_sizes):
            raise DataError("block sizes must be positive")

    @property
    def n(self) -> int:
        return sum(self.block_sizes)


def sample_rdpg(latents: LatentMatrix, seed) -> GraphSnapshot:
    """Sample one RDPG snapshot: pair (i, j) connects with probability <X_i, X_j>.

    Deterministic given `seed` (an int or ``numpy.random.SeedSequence``);
    the same seed yields the same graph regardless of the kernel backend.
    Inner products outside [0, 1] by at most ``CLAMP_TOL`` are clamped and
    reported through a ``RuntimeWarning``; larger violations raise.
    """
    X = latents.rows
    n = X.shape[0]
    rng = np.random.default_rng(seed)
    parts_i: list[np.ndarray] = []
    parts_j: list[np.ndarray] = []
    n_clamped = 0
    max_violation = 0.0
    for row0 in range(0, n, _SAMPLE_BLOCK_ROWS):
        hi = min(row0 + _SAMPLE_BLOCK_ROWS, n)
        # uniforms are drawn for the full block row so the stream is
        # independent of the block partition
        unif = rng.random((hi - row0, n))
        probs = X[row0:hi] @ X.T
        ei, ej, nc, mv = extract_edges(probs, unif, row0, CLAMP_TOL)
        parts_i.append(ei)
        parts_j.append(ej)
        n_clamped += nc
        max_violation = max(max_violation, mv)
    if max_violation > CLAMP_TOL:
        raise DataError(
            f"inner products leave [0, 1] by {max_violation:.4g} "
            f"(> clamp tolerance {CLAMP_TOL})"
        )
    if n_clamped:
        warnings.warn(
            f"clamped {n_clamped} inner products into [0, 1] "
            f"(max violation {max_violation:.3g})",
            RuntimeWarning,
            stacklevel=2,
        )
    edges = np.column_stack([np.concatenate(parts_i), np.concatenate(parts_j)]) if parts_i else np.empty((0, 2), np.int64)
    return GraphSnapshot(time=latents.time, n=n, edges=edges)


# Block connectivity path: three anchor matrices linearly interpolated over
# [0, 3]; the interpolant is rank 1 exactly at t = 1.
SBM_B1 = np.array([[1 / 2, 1 / 3], [1 / 3, 1 / 2]])
SBM_B2 = np.array([[1 / 2, 1 / 2], [1 / 2, 1 / 2]])
SBM_B3 = np.array([[1 / 2, 1 / 3], [1 / 3, 1 / 3]])


def sbm_block_matrix_at(t: float) -> np.ndarray:
    """Piecewise-linear block matrix B_t on [0, 3] through B1, B2, B3, B1."""
    if not 0.0 <= t <= 3.0:
        raise DataError(f"block path is defined on [0, 3], got t={t}")
    if t <= 1.0:
        return (1.0 - t) * SBM_B1 + t * SBM_B2
    if t <= 2.0:
        return (2.0 - t) * SBM_B2 + (t - 1.0) * SBM_B3
    return (3.0 - t) * SBM_B3 + (t - 2.0) * SBM_B1


def sbm_latents(spec: SbmSpec, d: int | None = None, time: float = 0.0) -> LatentMatrix:
    """Factor the block matrix into per-block latent vectors.

    Uses the spectral factorization B = V diag(w) V^T; block k's latent
    vector is row k of V_+ diag(sqrt(w_+)) over the nonnegative eigenpairs,
    zero-padded (or an error, if impossible) to dimension `d`. Eigenvalues
    are sorted descending and each eigenvector's sign is fixed so its
    largest-magnitude entry is positive, making the output deterministic.
    """
    B = spec.block_matrix
    K = B.shape[0]
    if d is None:
        d = K
    w, V = np.linalg.eigh(B)
    order = np.argsort(w)[::-1]
    w, V = w[order], V[:, order]
    if w.min() < -1e-10:
        raise NotPositiveSemidefiniteError(
            f"block matrix has negative eigenvalue {w.min():.3g}"
        )
    w = np.maximum(w, 0.0)
    rank = int(np.count_nonzero(w > 1e-12))
    if d < rank:
        raise DataError(f"d={d} is below the block matrix rank {rank}")
    for k in range(K):
        col = V[:, k]
        lead = np.argmax(np.abs(col))
        if col[lead] < 0:
            V[:, k] = -col
    block_latents = np.zeros((K, d))
    cols = min(K, d)
    block_latents[:, :cols] = (V * np.sqrt(w)[None, :])[:, :cols]
    rows = np.repeat(block_latents, spec.block_sizes, axis=0)
    return LatentMatrix(time=time, rows=rows)


def induced_subgraph(g: GraphSnapshot, nodes) -> GraphSnapshot:
    """Subgraph on `nodes`, relabelled 0..len(nodes)-1 preserving order."""
    nodes = np.asarray(nodes, dtype=np.int64)
    if nodes.size != np.unique(nodes).size:
        raise DataError("node subset contains duplicates")
    if nodes.size and (nodes.min() < 0 or nodes.max() >= g.n):
        raise DataError("node subset out of range")
    relabel = -np.ones(g.n, dtype=np.int64)
    relabel[nodes] = np.arange(nodes.size)
    a = relabel[g.edges[:, 0]]
    b = relabel[g.edges[:, 1]]
    keep = (a >= 0) & (b >= 0)
    a, b = a[keep], b[keep]
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    edges = np.column_stack([lo, hi])
    if edges.size:
        edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    return GraphSnapshot(time=g.time, n=int(nodes.size), edges=edges)


def write_edge_list(g: GraphSnapshot, path) -> None:
    """Write `# t=<time> n=<count>` then one tab-separated pair per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# t={g.time!r} n={g.n}\n")
        for i, j in g.edges:
            fh.write(f"{i}\t{j}\n")


def read_edge_list(path) -> GraphSnapshot:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("# t=") or " n=" not in header:
            raise DataError(f"{path}: malformed edge-list header {header!r}")
        t_part, n_part = header[2:].split(" n=")
        time = float(t_part[2:])
        n = int(n_part)
        pairs = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            i_s, j_s = line.split("\t")
            pairs.append((int(i_s), int(j_s)))
    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    return GraphSnapshot(time=time, n=n, edges=edges)
