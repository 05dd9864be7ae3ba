"""Independent oracles used by the tests.

Everything here is deliberately implemented by a different route than the
package code it checks: Monte Carlo second-moment estimates, Euler
integration of sample paths, brute-force searches, and closed-form
eigenstructure.
"""

from __future__ import annotations

import numpy as np


def mc_dmv(xt: np.ndarray, xs: np.ndarray) -> float:
    """Monte-Carlo population distance from paired samples.

    Estimates min over W of ||E[(X_t - W X_s)(X_t - W X_s)^T]||_2^(1/2)
    with the W search restricted to {Frobenius-Procrustes rotation,
    identity}; for the drift-plus-noise processes under test the identity
    is the exact minimizer, so this restriction is lossless there.
    """
    n = xt.shape[0]
    best = np.inf
    C = xs.T @ xt
    U, _, Vt = np.linalg.svd(C)
    for W in (U @ Vt, np.eye(xt.shape[1])):
        Z = xt - xs @ W
        second_moment = Z.T @ Z / n
        best = min(best, float(np.linalg.eigvalsh(second_moment)[-1]))
    return float(np.sqrt(best))


def mc_dmv_batched(xt: np.ndarray, xs: np.ndarray, n_batches: int = 20):
    """(estimate, standard error) with the SE taken across sample batches."""
    n = xt.shape[0]
    full = mc_dmv(xt, xs)
    edges = np.linspace(0, n, n_batches + 1).astype(int)
    vals = np.array([mc_dmv(xt[a:b], xs[a:b]) for a, b in zip(edges[:-1], edges[1:])])
    se = float(vals.std(ddof=1) / np.sqrt(n_batches))
    return full, se


def euler_integrated_bm(sigma: float, t: float, n_paths: int, substeps: int, rng):
    """Euler-discretized (B_t, I_t) samples for one coordinate.

    Left-endpoint Riemann integration of a Brownian path over `substeps`
    steps; the package simulator must agree with this up to the O(dt)
    discretization error.
    """
    dt = t / substeps
    incr = rng.standard_normal((n_paths, substeps)) * (sigma * np.sqrt(dt))
    b_path = np.cumsum(incr, axis=1)
    b_t = b_path[:, -1]
    i_t = (b_path[:, :-1].sum(axis=1) + 0.0) * dt  # left endpoints, B_0 = 0
    return b_t, i_t


def random_orthogonal(d: int, rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def complete_graph_top_pair(n: int):
    """Top eigenpair of K_n's adjacency: (n-1, all-ones/sqrt(n))."""
    return float(n - 1), np.full(n, 1.0 / np.sqrt(n))


def reconstructed_distances(coords: np.ndarray) -> np.ndarray:
    diffs = coords[:, None, :] - coords[None, :, :]
    return np.sqrt((diffs**2).sum(axis=2))


def procrustes_residual(A: np.ndarray, B: np.ndarray) -> float:
    """min over orthogonal R of ||A - B R||_F via the closed form."""
    U, _, Vt = np.linalg.svd(B.T @ A)
    R = U @ Vt
    return float(np.linalg.norm(A - B @ R))


def dmv_discrete_mixture(points_t, points_s, weights, n_angles: int = 720) -> float:
    """Population distance for a finite latent mixture, d = 2 only.

    The latent vector equals points_t[k] (resp. points_s[k]) with
    probability weights[k], with the same k at both times. Minimizes the
    spectral norm of the second-moment difference exactly over O(2) by a
    dense angle grid over rotations and reflections plus local golden
    refinement.
    """
    points_t = np.asarray(points_t, dtype=np.float64)
    points_s = np.asarray(points_s, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)

    def value(W):
        z = points_t - points_s @ W
        m = (weights[:, None, None] * (z[:, :, None] * z[:, None, :])).sum(axis=0)
        return float(np.linalg.eigvalsh(m)[-1])

    def rot(theta, reflect):
        c, s = np.cos(theta), np.sin(theta)
        W = np.array([[c, -s], [s, c]])
        if reflect:
            W = W @ np.diag([1.0, -1.0])
        return W

    best = np.inf
    for reflect in (False, True):
        thetas = np.linspace(0.0, 2 * np.pi, n_angles, endpoint=False)
        vals = np.array([value(rot(th, reflect)) for th in thetas])
        k = int(np.argmin(vals))
        a = thetas[k] - 2 * np.pi / n_angles
        b = thetas[k] + 2 * np.pi / n_angles
        gr = (np.sqrt(5.0) - 1.0) / 2.0
        x1, x2 = b - gr * (b - a), a + gr * (b - a)
        f1, f2 = value(rot(x1, reflect)), value(rot(x2, reflect))
        for _ in range(60):
            if f1 < f2:
                b, x2, f2 = x2, x1, f1
                x1 = b - gr * (b - a)
                f1 = value(rot(x1, reflect))
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + gr * (b - a)
                f2 = value(rot(x2, reflect))
        best = min(best, value(rot(0.5 * (a + b), reflect)))
    return float(np.sqrt(best))
