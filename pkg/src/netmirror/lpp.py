"""Latent position processes over a time grid.

Two worked processes are simulated exactly (no discretization bias): a
deterministic drift a(t)v plus Brownian noise, and the same drift plus
time-integrated Brownian noise. Each comes with the closed-form
maximum-directional-variation distance between process times, used as an
oracle by the estimation pipeline's tests. Row bootstrap of an empirical
trajectory set preserves each node's dependence across time.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .graphgen import LatentMatrix


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing sample times t_1 < ... < t_m within [0, horizon]."""

    times: np.ndarray
    horizon: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64).ravel()
        object.__setattr__(self, "times", t)
        if t.size < 2:
            raise DataError("time grid needs at least two points")
        if not (np.diff(t) > 0).all():
            raise DataError("grid times must be strictly increasing")
        if t[0] < 0 or t[-1] > self.horizon + 1e-12:
            raise DataError("grid times must lie within [0, horizon]")

    @property
    def m(self) -> int:
        return self.times.size

    @classmethod
    def regular(cls, start: float, stop: float, m: int) -> "TimeGrid":
        return cls(times=np.linspace(start, stop, m), horizon=float(stop))


@dataclass(frozen=True)
class LatentTrajectorySet:
    """Per-node latent paths: paths[j, i] is node j's vector at grid time i."""

    grid: TimeGrid
    paths: np.ndarray  # (n, m, d) float64

    def __post_init__(self):
        p = np.asarray(self.paths, dtype=np.float64)
        if p.ndim != 3 or p.shape[1] != self.grid.m:
            raise DataError("paths must have shape (n, m_times, d)")
        object.__setattr__(self, "paths", p)

    @property
    def n(self) -> int:
        return self.paths.shape[0]

    @property
    def d(self) -> int:
        return self.paths.shape[2]

    def latent_at(self, index: int) -> LatentMatrix:
        return LatentMatrix(time=float(self.grid.times[index]), rows=self.paths[:, index, :])

    def latent_matrices(self) -> list[LatentMatrix]:
        return [self.latent_at(i) for i in range(self.grid.m)]


@dataclass(frozen=True)
class DriftSpec:
    """Drift a(t) v with a(t) = c1*t + c2 (linear) or c1*t^2 + c2 (quadratic)."""

    kind: str
    c1: float
    c2: float
    v: np.ndarray
    sigma: float

    def __post_init__(self):
        if self.kind not in ("linear", "quadratic"):
            raise DataError(f"unknown drift kind {self.kind!r}")
        if self.sigma < 0:
            raise DataError("sigma must be nonnegative")
        object.__setattr__(self, "v", np.asarray(self.v, dtype=np.float64).ravel())

    def a(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "linear":
            return self.c1 * t + self.c2
        return self.c1 * t * t + self.c2

    @property
    def v_norm(self) -> float:
        return float(np.linalg.norm(self.v))

    @property
    def d(self) -> int:
        return self.v.size


def simulate_bm_drift(spec: DriftSpec, grid: TimeGrid, n: int, seed) -> LatentTrajectorySet:
    """Sample n independent paths X(t_i) = a(t_i) v + W_{t_i}.

    W is a d-dimensional Brownian motion started at 0 at time 0 and scaled
    by `spec.sigma`, simulated exactly at the grid times via independent
    Gaussian increments with variance sigma^2 * (t_{i+1} - t_i) per
    coordinate (the first increment spans [0, t_1]).
    """
    rng = np.random.default_rng(seed)
    d = spec.d
    t = grid.times
    dt = np.diff(np.concatenate([[0.0], t]))
    incr = rng.standard_normal((n, grid.m, d)) * (spec.sigma * np.sqrt(dt))[None, :, None]
    noise = np.cumsum(incr, axis=1)
    drift = spec.a(t)[:, None] * spec.v[None, :]
    return LatentTrajectorySet(grid=grid, paths=drift[None, :, :] + noise)


def simulate_integrated_bm(
    a: float,
    b: float,
    v: np.ndarray,
    sigma: float,
    grid: TimeGrid,
    n: int,
    seed,
) -> LatentTrajectorySet:
    """Sample n paths X(t) = (a t + b) v + I_t with I_t the integral of a BM.

    The pair (B_t, I_t) is jointly Gaussian; each grid step of length dt
    adds an increment (dB, dI) with Cov = sigma^2 * [[dt, dt^2/2],
    [dt^2/2, dt^3/3]] per coordinate, drawn exactly through the Cholesky
    factor of that 2x2 block. No Euler discretization error is incurred.
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    d = v.size
    rng = np.random.default_rng(seed)
    t = grid.times
    dt = np.diff(np.concatenate([[0.0], t]))
    B = np.zeros((n, d))
    I = np.zeros((n, d))
    paths = np.empty((n, grid.m, d))
    for i, step in enumerate(dt):
        z1 = rng.standard_normal((n, d))
        z2 = rng.standard_normal((n, d))
        # Cholesky of [[dt, dt^2/2], [dt^2/2, dt^3/3]]
        l11 = np.sqrt(step)
        l21 = 0.5 * step ** 1.5
        l22 = step ** 1.5 / (2.0 * np.sqrt(3.0))
        dB = sigma * l11 * z1
        dI = step * B + sigma * (l21 * z1 + l22 * z2)
        B = B + dB
        I = I + dI
        paths[:, i, :] = (a * t[i] + b) * v[None, :] + I
    return LatentTrajectorySet(grid=grid, paths=paths)


def dmv_oracle_bm(spec: DriftSpec, t: float, s: float) -> float:
    """Closed-form process distance for drift-plus-Brownian-motion.

    d(t, s)^2 = (a(t) - a(s))^2 ||v||^2 + sigma^2 |t - s|.
    """
    da = float(spec.a(t) - spec.a(s))
    return float(np.sqrt(da * da * spec.v_norm**2 + spec.sigma**2 * abs(t - s)))


def dmv_oracle_ibm(a: float, v: np.ndarray, sigma: float, t: float, s: float) -> float:
    """Closed-form process distance for drift-plus-integrated-Brownian-motion.

    With lo = min(t, s) and hi = max(t, s):
    d^2 = a^2 (hi - lo)^2 ||v||^2 + sigma^2 (hi - lo)^2 (hi + 2 lo) / 3.
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    lo, hi = (t, s) if t <= s else (s, t)
    gap = hi - lo
    vv = float(v @ v)
    return float(np.sqrt(a * a * gap * gap * vv + sigma**2 * gap * gap * (hi + 2 * lo) / 3.0))


def bootstrap_resample(empirical: LatentTrajectorySet, n_s: int, seed) -> LatentTrajectorySet:
    """Resample n_s node paths uniformly with replacement.

    One index draw per output node: the same source row is used at every
    time point, so each node's dependence across time is preserved.
    """
    if n_s < 1:
        raise DataError("n_s must be at least 1")
    if empirical.n < 1:
        raise DataError("empty source trajectory set")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, empirical.n, size=n_s)
    return LatentTrajectorySet(grid=empirical.grid, paths=empirical.paths[idx])


# --- trajectory archive -----------------------------------------------------


def write_trajectories(ts: LatentTrajectorySet, directory, seed=None, spec: dict | None = None) -> None:
    """One CSV per time point (`node,x1..xd`) plus a JSON manifest."""
    os.makedirs(directory, exist_ok=True)
    d = ts.d
    header = ["node"] + [f"x{k+1}" for k in range(d)]
    for i in range(ts.grid.m):
        path = os.path.join(directory, f"latents_{i:04d}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for node in range(ts.n):
                writer.writerow([node] + [repr(float(x)) for x in ts.paths[node, i]])
    manifest = {
        "times": [float(t) for t in ts.grid.times],
        "horizon": float(ts.grid.horizon),
        "d": d,
        "n": ts.n,
        "seed": seed,
        "spec": spec,
    }
    with open(os.path.join(directory, "trajectories.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_trajectories(directory) -> LatentTrajectorySet:
    manifest_path = os.path.join(directory, "trajectories.json")
    try:
        with open(manifest_path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read trajectory manifest {manifest_path}: {exc}") from exc
    times = np.asarray(manifest["times"], dtype=np.float64)
    n, d = int(manifest["n"]), int(manifest["d"])
    paths = np.empty((n, times.size, d))
    for i in range(times.size):
        path = os.path.join(directory, f"latents_{i:04d}.csv")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape != (n, d + 1):
            raise DataError(f"{path}: expected {n} rows of node,x1..x{d}")
        paths[:, i, :] = data[np.argsort(data[:, 0]), 1:]
    grid = TimeGrid(times=times, horizon=float(manifest["horizon"]))
    return LatentTrajectorySet(grid=grid, paths=paths)
