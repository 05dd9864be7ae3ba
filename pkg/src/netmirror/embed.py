"""Adjacency spectral embedding of graph snapshots.

The embedding takes the d largest-algebraic eigenpairs of the (raw,
zero-diagonal) adjacency matrix. Rows are U sqrt(S) when scaled, U
otherwise. Dense symmetric LAPACK is used up to `DENSE_CUTOFF` nodes;
above that a Lanczos iteration with full reorthogonalization runs on the
sparse adjacency to tolerance 1e-10.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DataError, NumericalError, RankDeficiencyError
from .graphgen import GraphSnapshot

DENSE_CUTOFF = 4096
_LANCZOS_TOL = 1e-10


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Spectral embedding of one snapshot: row i is node i's position."""

    time: float
    rows: np.ndarray  # (n, d)
    eigenvalues: np.ndarray  # (d,), descending
    scaled: bool

    def __post_init__(self):
        object.__setattr__(self, "rows", np.asarray(self.rows, dtype=np.float64))
        object.__setattr__(self, "eigenvalues", np.asarray(self.eigenvalues, dtype=np.float64))

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry (ties: lowest index) is positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            out[:, k] = -col
    return out


def _lanczos_topk(A, k: int, tol: float = _LANCZOS_TOL, max_dim: int | None = None):
    """Largest-algebraic k eigenpairs of a symmetric operator via Lanczos.

    Full reorthogonalization against the whole Krylov basis keeps the
    iteration stable; the start vector is a fixed seeded Gaussian so the
    result is deterministic. Returns (values descending, vectors).
    """
    n = A.shape[0]
    if max_dim is None:
        max_dim = min(n, max(4 * k + 40, 120))
    rng = np.random.default_rng(0x5EED)
    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)
    Q = np.zeros((n, max_dim))
    alphas = np.zeros(max_dim)
    betas = np.zeros(max_dim)
    Q[:, 0] = q
    m = 0
    check_every = max(k + 2, 10)
    while m < max_dim:
        u = A @ Q[:, m]
        alphas[m] = Q[:, m] @ u
        u -= alphas[m] * Q[:, m]
        if m > 0:
            u -= betas[m - 1] * Q[:, m - 1]
        # full reorthogonalization, two passes
        u -= Q[:, : m + 1] @ (Q[:, : m + 1].T @ u)
        u -= Q[:, : m + 1] @ (Q[:, : m + 1].T @ u)
        beta = np.linalg.norm(u)
        m += 1
        if m == max_dim or beta < 1e-14:
            break
        betas[m - 1] = beta
        Q[:, m] = u / beta
        if m >= check_every and (m % check_every == 0 or m == max_dim - 1):
            T = np.diag(alphas[:m]) + np.diag(betas[: m - 1], 1) + np.diag(betas[: m - 1], -1)
            w, s = np.linalg.eigh(T)
            top = np.argsort(w)[::-1][:k]
            resid = np.abs(betas[m - 1] * s[m - 1, top])
            scale = np.maximum(np.abs(w[top]), 1.0)
            if (resid <= tol * scale).all():
                break
    T = np.diag(alphas[:m]) + np.diag(betas[: m - 1], 1) + np.diag(betas[: m - 1], -1)
    w, s = np.linalg.eigh(T)
    order = np.argsort(w)[::-1][:k]
    if order.size < k:
        raise NumericalError("Lanczos basis collapsed before reaching k eigenpairs")
    values = w[order]
    vectors = Q[:, :m] @ s[:, order]
    # one re-normalization pass; rounding can leave norms a hair off 1
    vectors /= np.linalg.norm(vectors, axis=0, keepdims=True)
    return values, vectors


def ase(
    g: GraphSnapshot,
    d: int,
    scaled: bool = True,
    dense_cutoff: int = DENSE_CUTOFF,
) -> EmbeddingMatrix:
    """Adjacency spectral embedding with dimension d.

    Eigenvalues are the d largest by algebraic value, sorted descending;
    eigenvector signs follow the deterministic largest-entry convention.
    Raises ``RankDeficiencyError`` (carrying the eigenvalue list) when any
    of the top d eigenvalues is nonpositive, since sqrt(S) then leaves the
    reals; callers may retry with a smaller d or zero-pad.
    """
    n = g.n
    if not 1 <= d <= n:
        raise DataError(f"need 1 <= d <= n, got d={d}, n={n}")
    if n <= dense_cutoff:
        A = g.adjacency(sparse=False)
        values, vectors = scipy.linalg.eigh(A, subset_by_index=[n - d, n - 1])
        values = values[::-1]
        vectors = vectors[:, ::-1]
    else:
        A = g.adjacency(sparse=True)
        values, vectors = _lanczos_topk(A, d)
    vectors = _fix_signs(vectors)
    if values[-1] <= 0:
        raise RankDeficiencyError(
            f"eigenvalue {d} of the adjacency matrix is {values[-1]:.4g} <= 0",
            eigenvalues=values,
        )
    rows = vectors * np.sqrt(values)[None, :] if scaled else vectors
    return EmbeddingMatrix(time=g.time, rows=rows, eigenvalues=values, scaled=scaled)


def write_embedding(e: EmbeddingMatrix, csv_path, sidecar_path) -> None:
    """CSV `node,x1..xd` plus JSON sidecar with eigenvalues and the scaled flag."""
    header = ["node"] + [f"x{k+1}" for k in range(e.d)]
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for node in range(e.n):
            writer.writerow([node] + [repr(float(x)) for x in e.rows[node]])
    sidecar = {
        "time": float(e.time),
        "eigenvalues": [float(v) for v in e.eigenvalues],
        "scaled": bool(e.scaled),
    }
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_embedding(csv_path, sidecar_path) -> EmbeddingMatrix:
    try:
        with open(sidecar_path, "r", encoding="utf-8") as fh:
            sidecar = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read embedding sidecar {sidecar_path}: {exc}") from exc
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
    rows = data[np.argsort(data[:, 0]), 1:]
    return EmbeddingMatrix(
        time=float(sidecar["time"]),
        rows=rows,
        eigenvalues=np.asarray(sidecar["eigenvalues"], dtype=np.float64),
        scaled=bool(sidecar["scaled"]),
    )
