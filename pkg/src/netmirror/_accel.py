"""Hot numeric kernels: numba-compiled when available, pure numpy otherwise.

The accelerated path is active when numba imports cleanly and the
environment variable ``NETMIRROR_DISABLE_NUMBA`` is unset (or set to
``0``/``false``). Both paths consume the same pre-drawn random inputs and
perform the same arithmetic in the same order, so switching between them
never changes a result, only its wall-clock cost. ``benchmarks/bench_kernels.py``
times the two side by side.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "NETMIRROR_DISABLE_NUMBA"

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


def _env_disabled() -> bool:
    return os.environ.get(_ENV_FLAG, "0").lower() not in ("0", "", "false")


def numba_enabled() -> bool:
    """True when the compiled kernel path is in use."""
    return _HAVE_NUMBA and not _env_disabled()


# ---------------------------------------------------------------------------
# Edge extraction: Bernoulli-threshold a block of rows of the probability
# matrix against pre-drawn uniforms, keeping only pairs j > i. Probabilities
# slightly outside [0, 1] (within `tol`) are clamped and counted; the caller
# errors out on larger violations using the returned max.
# ---------------------------------------------------------------------------


def _extract_edges_numpy(
    prob_block: np.ndarray,
    unif_block: np.ndarray,
    row0: int,
    tol: float,
) -> tuple[np.ndarray, np.ndarray, int, float]:
    b, n = prob_block.shape
    cols = np.arange(n)
    upper = cols[None, :] > (row0 + np.arange(b))[:, None]
    lo = -prob_block
    hi = prob_block - 1.0
    viol = np.maximum(np.maximum(lo, hi), 0.0)
    viol[~upper] = 0.0
    max_violation = float(viol.max()) if viol.size else 0.0
    n_clamped = int(np.count_nonzero(viol))
    clipped = np.clip(prob_block, 0.0, 1.0)
    rows, js = np.nonzero((unif_block < clipped) & upper)
    return (rows + row0).astype(np.int64), js.astype(np.int64), n_clamped, max_violation


if _HAVE_NUMBA:

    @njit(cache=True)
    def _extract_edges_numba(prob_block, unif_block, row0, tol):  # pragma: no cover
        b, n = prob_block.shape
        buf_i = np.empty(b * n, np.int64)
        buf_j = np.empty(b * n, np.int64)
        k = 0
        n_clamped = 0
        max_violation = 0.0
        for r in range(b):
            i = row0 + r
            for j in range(i + 1, n):
                p = prob_block[r, j]
                if p < 0.0:
                    if -p > max_violation:
                        max_violation = -p
                    n_clamped += 1
                    p = 0.0
                elif p > 1.0:
                    if p - 1.0 > max_violation:
                        max_violation = p - 1.0
                    n_clamped += 1
                    p = 1.0
                if unif_block[r, j] < p:
                    buf_i[k] = i
                    buf_j[k] = j
                    k += 1
        return buf_i[:k], buf_j[:k], n_clamped, max_violation


def extract_edges(
    prob_block: np.ndarray,
    unif_block: np.ndarray,
    row0: int,
    tol: float,
    use_numba: bool | None = None,
) -> tuple[np.ndarray, np.ndarray, int, float]:
    """Threshold one row block, returning (i, j) pairs with j > i.

    Returns (i_array, j_array, clamp_count, max_violation) where the clamp
    count and max violation are taken over the used (upper-triangle) entries
    only. `use_numba=None` defers to the package-level setting.
    """
    if use_numba is None:
        use_numba = numba_enabled()
    if use_numba and _HAVE_NUMBA:
        return _extract_edges_numba(prob_block, unif_block, row0, tol)
    return _extract_edges_numpy(prob_block, unif_block, row0, tol)


# ---------------------------------------------------------------------------
# Orthogonal-alignment refinement. Works entirely in d x d Gram space:
# for M = Xt - Xs W the Gram matrix is
#     M^T M = Gtt - C^T W - W^T C + W^T Gss W,   C = Xs^T Xt,
# so the spectral norm of M is sqrt(lambda_max(M^T M)) at O(d^3) per probe.
# The search greedily sweeps Givens planes, line-minimizing each angle by a
# coarse grid plus golden-section polish.
# ---------------------------------------------------------------------------

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _alignment_objective(W, Gtt, C, Gss):
    M = Gtt - C.T @ W - W.T @ C + W.T @ Gss @ W
    return np.linalg.eigvalsh(M)[-1]


def _refine_rotation_py(W0, Gtt, C, Gss, max_sweeps, tol):
    d = W0.shape[0]
    W = W0.copy()
    best = _alignment_objective(W, Gtt, C, Gss)
    if d < 2:
        return W, best
    grid = np.linspace(-0.5, 0.5, 17)
    for _ in range(max_sweeps):
        gained = 0.0
        for p in range(d - 1):
            for q in range(p + 1, d):
                wp = W[:, p].copy()
                wq = W[:, q].copy()

                def f(theta):
                    c, s = np.cos(theta), np.sin(theta)
                    Wc = W.copy()
                    Wc[:, p] = c * wp + s * wq
                    Wc[:, q] = -s * wp + c * wq
                    return _alignment_objective(Wc, Gtt, C, Gss)

                vals = np.array([f(t) for t in grid])
                k = int(np.argmin(vals))
                a = grid[max(k - 1, 0)]
                b = grid[min(k + 1, len(grid) - 1)]
                x1 = b - _GOLDEN * (b - a)
                x2 = a + _GOLDEN * (b - a)
                f1, f2 = f(x1), f(x2)
                for _ in range(40):
                    if f1 < f2:
                        b, x2, f2 = x2, x1, f1
                        x1 = b - _GOLDEN * (b - a)
                        f1 = f(x1)
                    else:
                        a, x1, f1 = x1, x2, f2
                        x2 = a + _GOLDEN * (b - a)
                        f2 = f(x2)
                theta = 0.5 * (a + b)
                val = f(theta)
                if val < best:
                    c, s = np.cos(theta), np.sin(theta)
                    W[:, p] = c * wp + s * wq
                    W[:, q] = -s * wp + c * wq
                    gained += best - val
                    best = val
        if gained < tol:
            break
    return W, best


if _HAVE_NUMBA:

    @njit(cache=True)
    def _objective_nb(W, Gtt, C, Gss):  # pragma: no cover
        M = Gtt - C.T @ W - W.T @ C + W.T @ Gss @ W
        w = np.linalg.eigvalsh(M)
        return w[-1]

    @njit(cache=True)
    def _rotated_objective_nb(W, p, q, theta, Gtt, C, Gss):  # pragma: no cover
        c = np.cos(theta)
        s = np.sin(theta)
        Wc = W.copy()
        for r in range(W.shape[0]):
            Wc[r, p] = c * W[r, p] + s * W[r, q]
            Wc[r, q] = -s * W[r, p] + c * W[r, q]
        return _objective_nb(Wc, Gtt, C, Gss)

    @njit(cache=True)
    def _refine_rotation_nb(W0, Gtt, C, Gss, max_sweeps, tol):  # pragma: no cover
        d = W0.shape[0]
        W = W0.copy()
        best = _objective_nb(W, Gtt, C, Gss)
        if d < 2:
            return W, best
        golden = (np.sqrt(5.0) - 1.0) / 2.0
        grid = np.linspace(-0.5, 0.5, 17)
        for _ in range(max_sweeps):
            gained = 0.0
            for p in range(d - 1):
                for q in range(p + 1, d):
                    vals = np.empty(17)
                    for g in range(17):
                        vals[g] = _rotated_objective_nb(W, p, q, grid[g], Gtt, C, Gss)
                    k = int(np.argmin(vals))
                    a = grid[max(k - 1, 0)]
                    b = grid[min(k + 1, 16)]
                    x1 = b - golden * (b - a)
                    x2 = a + golden * (b - a)
                    f1 = _rotated_objective_nb(W, p, q, x1, Gtt, C, Gss)
                    f2 = _rotated_objective_nb(W, p, q, x2, Gtt, C, Gss)
                    for _ in range(40):
                        if f1 < f2:
                            b, x2, f2 = x2, x1, f1
                            x1 = b - golden * (b - a)
                            f1 = _rotated_objective_nb(W, p, q, x1, Gtt, C, Gss)
                        else:
                            a, x1, f1 = x1, x2, f2
                            x2 = a + golden * (b - a)
                            f2 = _rotated_objective_nb(W, p, q, x2, Gtt, C, Gss)
                    theta = 0.5 * (a + b)
                    val = _rotated_objective_nb(W, p, q, theta, Gtt, C, Gss)
                    if val < best:
                        c = np.cos(theta)
                        s = np.sin(theta)
                        for r in range(d):
                            wp = W[r, p]
                            wq = W[r, q]
                            W[r, p] = c * wp + s * wq
                            W[r, q] = -s * wp + c * wq
                        gained += best - val
                        best = val
            if gained < tol:
                break
        return W, best


def refine_rotation(
    W0: np.ndarray,
    Gtt: np.ndarray,
    C: np.ndarray,
    Gss: np.ndarray,
    max_sweeps: int = 200,
    tol: float = 1e-10,
    use_numba: bool | None = None,
) -> tuple[np.ndarray, float]:
    """Greedy Givens-plane descent of lambda_max of the alignment Gram matrix.

    Starts from `W0` (typically the Frobenius-Procrustes rotation) and never
    returns a worse objective value than it started with.
    """
    if use_numba is None:
        use_numba = numba_enabled()
    W0 = np.ascontiguousarray(W0, dtype=np.float64)
    Gtt = np.ascontiguousarray(Gtt, dtype=np.float64)
    C = np.ascontiguousarray(C, dtype=np.float64)
    Gss = np.ascontiguousarray(Gss, dtype=np.float64)
    if use_numba and _HAVE_NUMBA:
        return _refine_rotation_nb(W0, Gtt, C, Gss, max_sweeps, tol)
    return _refine_rotation_py(W0, Gtt, C, Gss, max_sweeps, tol)
