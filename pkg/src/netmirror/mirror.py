"""Distance-matrix assembly, CMDS curve reconstruction, and 1-D ISOMAP.

CMDS double-centers the squared distance matrix, B = -0.5 P D^(2) P with
P = I - J/m, and scales the top eigenvectors by the square roots of their
eigenvalues. The full signed eigenvalue profile (scree) is kept for
dimension selection. ISOMAP runs geodesic distances on a k-nearest-neighbor
graph (augmented by minimum-spanning-tree edges when disconnected) through
the same CMDS with c = 1.
"""

from __future__ import annotations

import csv
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree, shortest_path

from .errors import DataError, NumericalError
from .lpp import TimeGrid
from .metric import dmv_hat


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise distances between the grid's time points."""

    grid: TimeGrid
    values: np.ndarray  # (m, m), zero diagonal

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.grid.m, self.grid.m):
            raise DataError("distance matrix shape does not match the grid")
        if not np.array_equal(v, v.T) or np.any(np.diag(v) != 0.0):
            raise DataError("distance matrix must be exactly symmetric with zero diagonal")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class MirrorCurve:
    """CMDS coordinates over the grid plus the full eigenvalue scree."""

    grid: TimeGrid
    coords: np.ndarray  # (m, c)
    scree: np.ndarray  # (m,), signed eigenvalues, descending
    c: int


@dataclass(frozen=True)
class IsomapTrace:
    """One-dimensional geodesic trace over the grid (sign/shift fixed)."""

    grid: TimeGrid
    values: np.ndarray  # (m,)


def distance_matrix(embeddings, refine: bool = False, workers: int = 1) -> DistanceMatrix:
    """Pairwise estimated distances; each unordered pair computed once."""
    embeddings = list(embeddings)
    m = len(embeddings)
    if m < 2:
        raise DataError("need at least two embeddings")
    n0, d0 = embeddings[0].rows.shape
    for e in embeddings[1:]:
        if e.rows.shape != (n0, d0):
            raise DataError(
                f"embedding at t={e.time} has shape {e.rows.shape}, expected {(n0, d0)}"
            )
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    values = np.zeros((m, m))

    def one(pair):
        i, j = pair
        return i, j, dmv_hat(embeddings[i], embeddings[j], refine=refine).distance

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, pairs))
    else:
        results = [one(p) for p in pairs]
    for i, j, dist in results:
        values[i, j] = dist
        values[j, i] = dist
    grid = TimeGrid(times=np.array([e.time for e in embeddings]), horizon=float(embeddings[-1].time))
    return DistanceMatrix(grid=grid, values=values)


def _fix_column_signs(coords: np.ndarray) -> np.ndarray:
    out = coords.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            out[:, k] = -col
    return out


def cmds(D: DistanceMatrix, c: int) -> MirrorCurve:
    """Classical multidimensional scaling into c dimensions.

    Columns whose eigenvalue is not positive are zeroed (with a warning)
    rather than scaled by an imaginary factor; the signed value stays in
    the scree. Output columns carry the deterministic sign convention.
    """
    m = D.grid.m
    if not 1 <= c < m:
        raise DataError(f"need 1 <= c < m_T, got c={c}, m_T={m}")
    D2 = D.values**2
    B = D2 - D2.mean(axis=0)[None, :] - D2.mean(axis=1)[:, None] + D2.mean()
    B *= -0.5
    w, V = np.linalg.eigh(B)
    order = np.argsort(w)[::-1]
    w, V = w[order], V[:, order]
    coords = np.zeros((m, c))
    bad = 0
    for k in range(c):
        if w[k] > 0:
            coords[:, k] = V[:, k] * np.sqrt(w[k])
        else:
            bad += 1
    if bad:
        warnings.warn(
            f"zeroed {bad} mirror column(s) with nonpositive eigenvalue",
            RuntimeWarning,
            stacklevel=2,
        )
    coords = _fix_column_signs(coords)
    return MirrorCurve(grid=D.grid, coords=coords, scree=w, c=c)


def isomap_1d(curve: MirrorCurve, k: int = 5) -> IsomapTrace:
    """Geodesic 1-D trace of the mirror points.

    Builds the symmetric k-nearest-neighbor graph with Euclidean edge
    weights, adds minimum-spanning-tree edges if that graph is
    disconnected, runs all-pairs shortest paths, and applies CMDS with
    c = 1. The trace is flipped if needed so its first step is
    nondecreasing.
    """
    if k < 1:
        raise DataError("k must be at least 1")
    pts = curve.coords
    m = pts.shape[0]
    if m < 2:
        raise DataError("need at least two points")
    diffs = pts[:, None, :] - pts[None, :, :]
    euclid = np.sqrt((diffs**2).sum(axis=2))
    kk = min(k, m - 1)
    neighbor_rank = np.argsort(euclid, axis=1, kind="stable")
    mask = np.zeros((m, m), dtype=bool)
    for i in range(m):
        # skip self at rank 0
        mask[i, neighbor_rank[i, 1 : kk + 1]] = True
    mask |= mask.T
    ii, jj = np.nonzero(mask)
    # COO constructor keeps explicit zero weights (coincident points) as edges
    graph = sp.csr_matrix((euclid[ii, jj], (ii, jj)), shape=(m, m))
    n_comp, _ = connected_components(graph, directed=False)
    if n_comp > 1:
        # coincident points are always mutual nearest neighbors, so the
        # missing connections here have strictly positive length
        mst = minimum_spanning_tree(sp.csr_matrix(euclid))
        mst = mst + mst.T
        graph = graph.maximum(sp.csr_matrix(mst))
    geo = shortest_path(graph, method="D", directed=False)
    if not np.isfinite(geo).all():
        raise NumericalError("geodesic distances are not all finite")
    geo = 0.5 * (geo + geo.T)
    np.fill_diagonal(geo, 0.0)
    trace_curve = cmds(DistanceMatrix(grid=curve.grid, values=geo), c=1)
    values = trace_curve.coords[:, 0].copy()
    if values[1] < values[0]:
        values = -values
    return IsomapTrace(grid=curve.grid, values=values)


def stress(D: DistanceMatrix, coords: np.ndarray, origin: float | None = None) -> float:
    """Weighted residual between squared distances and squared coordinates.

    Sum over (i, j) of |D_ij^2 - ||v_i - v_j||^2|^2 * dt_i * dt_j with
    backward differences dt_i = t_i - t_{i-1}. The first weight uses the
    process origin when one is supplied, otherwise dt_1 = t_2 - t_1.
    """
    coords = np.atleast_2d(np.asarray(coords, dtype=np.float64))
    if coords.shape[0] != D.grid.m:
        raise DataError("coordinate rows must match the grid")
    t = D.grid.times
    dt = np.empty_like(t)
    dt[1:] = np.diff(t)
    dt[0] = t[0] - origin if origin is not None else t[1] - t[0]
    diffs = coords[:, None, :] - coords[None, :, :]
    sq = (diffs**2).sum(axis=2)
    resid = (D.values**2 - sq) ** 2
    return float((resid * dt[:, None] * dt[None, :]).sum())


def select_dimension(scree: np.ndarray, threshold: float = 0.95) -> tuple[int, np.ndarray]:
    """Smallest c whose positive-eigenvalue mass reaches the threshold.

    Negative eigenvalues are ignored. Returns (c, cumulative mass profile
    over the positive part).
    """
    scree = np.asarray(scree, dtype=np.float64)
    if np.any(np.diff(scree) > 1e-12):
        raise DataError("scree must be nonincreasing")
    pos = np.clip(scree, 0.0, None)
    total = pos.sum()
    if total <= 0:
        raise NumericalError("no positive eigenvalues to select from")
    profile = np.cumsum(pos) / total
    c = int(np.searchsorted(profile, threshold - 1e-12) + 1)
    return c, profile


# --- CSV formats -------------------------------------------------------------


def write_distance_csv(D: DistanceMatrix, path) -> None:
    """Square matrix; header row carries the grid times."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([repr(float(t)) for t in D.grid.times])
        for row in D.values:
            writer.writerow([repr(float(x)) for x in row])


def read_distance_csv(path) -> DistanceMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if len(rows) < 3:
        raise DataError(f"{path}: expected a header and at least two rows")
    times = np.array([float(x) for x in rows[0]])
    values = np.array([[float(x) for x in row] for row in rows[1:]])
    values = 0.5 * (values + values.T)
    np.fill_diagonal(values, 0.0)
    grid = TimeGrid(times=times, horizon=float(times[-1]))
    return DistanceMatrix(grid=grid, values=values)


def write_mirror_csv(curve: MirrorCurve, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t"] + [f"psi{k+1}" for k in range(curve.c)])
        for i in range(curve.grid.m):
            writer.writerow([repr(float(curve.grid.times[i]))] + [repr(float(x)) for x in curve.coords[i]])


def write_scree_csv(curve: MirrorCurve, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank", "eigenvalue"])
        for r, v in enumerate(curve.scree, start=1):
            writer.writerow([r, repr(float(v))])


def write_isomap_csv(trace: IsomapTrace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "iota"])
        for t, x in zip(trace.grid.times, trace.values):
            writer.writerow([repr(float(t)), repr(float(x))])


def read_mirror_csv(path) -> MirrorCurve:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    times = data[:, 0]
    coords = data[:, 1:]
    grid = TimeGrid(times=times, horizon=float(times[-1]))
    scree = np.full(grid.m, np.nan)
    return MirrorCurve(grid=grid, coords=coords, scree=scree, c=coords.shape[1])


def read_isomap_csv(path) -> IsomapTrace:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    grid = TimeGrid(times=data[:, 0], horizon=float(data[-1, 0]))
    return IsomapTrace(grid=grid, values=data[:, 1])
