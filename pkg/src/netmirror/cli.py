"""Configuration-driven pipeline orchestration and the `netmirror` command.

The pipeline follows the estimation recipe end to end: snapshots (simulated
or loaded) -> spectral embeddings -> pairwise distance matrix -> CMDS
mirror -> 1-D ISOMAP trace -> rolling change-point scans, with every
artifact written to the output directory and content-hashed into a
manifest. Subcommands expose the individual stages on the same file
formats. Exit codes: 0 success, 2 config error, 3 data error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .changepoint import regression_band_scan, sigmage_scan, write_report_json
from .embed import DENSE_CUTOFF, EmbeddingMatrix, ase, read_embedding, write_embedding
from .errors import (
    ConfigError,
    DataError,
    NetmirrorError,
    NumericalError,
    RankDeficiencyError,
)
from .graphgen import (
    GraphSnapshot,
    LatentMatrix,
    SbmSpec,
    induced_subgraph,
    read_edge_list,
    sample_rdpg,
    sbm_block_matrix_at,
    sbm_latents,
    write_edge_list,
)
from .lpp import (
    DriftSpec,
    LatentTrajectorySet,
    TimeGrid,
    bootstrap_resample,
    read_trajectories,
    simulate_bm_drift,
    simulate_integrated_bm,
    write_trajectories,
)
from .mirror import (
    DistanceMatrix,
    IsomapTrace,
    MirrorCurve,
    cmds,
    distance_matrix,
    isomap_1d,
    read_distance_csv,
    read_isomap_csv,
    read_mirror_csv,
    select_dimension,
    write_distance_csv,
    write_isomap_csv,
    write_mirror_csv,
    write_scree_csv,
)

# spawn-key namespaces for deriving independent substreams from one seed
_STREAM_PROCESS = 0
_STREAM_GRAPHS = 1
_STREAM_BOOTSTRAP = 2


@dataclass
class PipelineConfig:
    """Fully explicit pipeline settings; defaults are echoed to the manifest."""

    input: dict
    d: int
    output_dir: str
    c: int | str = "auto"
    scaled: bool = True
    refine: bool = False
    isomap_k: int = 5
    changepoint: dict = field(
        default_factory=lambda: {"w": 5, "threshold": 5.0, "multiplier": 5.0}
    )
    seed: int | None = None
    partition: str | None = None
    workers: int = 1
    scree_threshold: float = 0.95
    dense_cutoff: int = DENSE_CUTOFF

    def __post_init__(self):
        if self.d < 1:
            raise ConfigError("d must be at least 1")
        if self.c != "auto":
            self.c = int(self.c)
            if self.c < 1:
                raise ConfigError("c must be at least 1 (or 'auto')")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        cp = {"w": 5, "threshold": 5.0, "multiplier": 5.0}
        cp.update(self.changepoint or {})
        self.changepoint = cp
        if not isinstance(self.input, dict) or len(self.input) != 1:
            raise ConfigError("input must be {'simulate': {...}} or {'load': <dir>}")
        kind = next(iter(self.input))
        if kind not in ("simulate", "load", "load_trajectories"):
            raise ConfigError(f"unknown input kind {kind!r}")
        if kind == "simulate" and self.seed is None:
            raise ConfigError("simulation requires a seed")

    def to_dict(self) -> dict:
        return {
            "input": self.input,
            "d": self.d,
            "c": self.c,
            "scaled": self.scaled,
            "refine": self.refine,
            "isomap_k": self.isomap_k,
            "changepoint": self.changepoint,
            "seed": self.seed,
            "partition": self.partition,
            "workers": self.workers,
            "scree_threshold": self.scree_threshold,
            "dense_cutoff": self.dense_cutoff,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        known = {f: raw[f] for f in raw}
        extra = set(known) - {
            "input",
            "d",
            "c",
            "scaled",
            "refine",
            "isomap_k",
            "changepoint",
            "seed",
            "partition",
            "workers",
            "scree_threshold",
            "dense_cutoff",
            "output_dir",
        }
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            return cls(**known)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def _substream(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))


def _parse_times(raw) -> np.ndarray:
    if isinstance(raw, dict):
        try:
            return np.linspace(float(raw["start"]), float(raw["stop"]), int(raw["count"]))
        except KeyError as exc:
            raise ConfigError(f"times spec missing key {exc}") from exc
    times = np.asarray(raw, dtype=np.float64)
    if times.ndim != 1 or times.size < 2:
        raise ConfigError("times must be a list of at least two values")
    return times


def simulate_latents(spec: dict, seed: int) -> LatentTrajectorySet:
    """Build the latent trajectory set described by a simulation spec."""
    kind = spec.get("process")
    times = _parse_times(spec.get("times"))
    grid = TimeGrid(times=times, horizon=float(spec.get("horizon", times[-1])))
    n = int(spec.get("n", 0))
    if n < 1:
        raise ConfigError("simulation spec needs a positive n")
    sub = _substream(seed, _STREAM_PROCESS)
    if kind == "bm_drift":
        drift = DriftSpec(
            kind=spec.get("kind", "linear"),
            c1=float(spec["c1"]),
            c2=float(spec["c2"]),
            v=np.asarray(spec["v"], dtype=np.float64),
            sigma=float(spec["sigma"]),
        )
        return simulate_bm_drift(drift, grid, n, sub)
    if kind == "integrated_bm":
        return simulate_integrated_bm(
            a=float(spec["a"]),
            b=float(spec["b"]),
            v=np.asarray(spec["v"], dtype=np.float64),
            sigma=float(spec["sigma"]),
            grid=grid,
            n=n,
            seed=sub,
        )
    if kind == "sbm":
        sizes = tuple(int(s) for s in spec["block_sizes"])
        if sum(sizes) != n:
            raise ConfigError("block sizes must sum to n")
        d_lat = int(spec.get("d", len(sizes)))
        paths = np.empty((n, grid.m, d_lat))
        for i, t in enumerate(grid.times):
            lat = sbm_latents(SbmSpec(sbm_block_matrix_at(float(t)), sizes), d=d_lat, time=float(t))
            paths[:, i, :] = lat.rows
        return LatentTrajectorySet(grid=grid, paths=paths)
    raise ConfigError(f"unknown simulation process {kind!r}")


def sample_snapshots(latents: LatentTrajectorySet, seed: int) -> list[GraphSnapshot]:
    """One RDPG snapshot per grid time, each from its own seeded substream."""
    return [
        sample_rdpg(latents.latent_at(i), _substream(seed, _STREAM_GRAPHS, i))
        for i in range(latents.grid.m)
    ]


def _load_snapshots(directory) -> list[GraphSnapshot]:
    try:
        names = sorted(f for f in os.listdir(directory) if f.endswith(".edges"))
    except OSError as exc:
        raise DataError(f"cannot list snapshot directory {directory}: {exc}") from exc
    if not names:
        raise DataError(f"no .edges files in {directory}")
    snaps = [read_edge_list(os.path.join(directory, f)) for f in names]
    n0 = snaps[0].n
    for s in snaps:
        if s.n != n0:
            raise DataError(f"snapshot at t={s.time} has n={s.n}, expected {n0}")
    return snaps


def embed_snapshot_padded(
    g: GraphSnapshot, d: int, scaled: bool, dense_cutoff: int = DENSE_CUTOFF
) -> EmbeddingMatrix:
    """ASE that zero-pads trailing columns when the spectrum runs out.

    Wraps the rank-deficiency error: if eigenvalue k <= 0 for some k <= d,
    the embedding is computed at the largest feasible dimension and padded
    with zero columns (eigenvalue recorded as 0), with a warning. This is
    the orchestration-level policy; the core `ase` keeps the strict error.
    """
    try:
        return ase(g, d, scaled=scaled, dense_cutoff=dense_cutoff)
    except RankDeficiencyError as err:
        positive = int(np.sum(np.asarray(err.eigenvalues) > 0))
        if positive == 0:
            raise
        warnings.warn(
            f"snapshot at t={g.time}: only {positive} positive eigenvalues; "
            f"zero-padding {d - positive} embedding column(s)",
            RuntimeWarning,
            stacklevel=2,
        )
        e = ase(g, positive, scaled=scaled, dense_cutoff=dense_cutoff)
        rows = np.zeros((e.n, d))
        rows[:, :positive] = e.rows
        values = np.zeros(d)
        values[:positive] = e.eigenvalues
        return EmbeddingMatrix(time=e.time, rows=rows, eigenvalues=values, scaled=scaled)


def embed_snapshots(
    snapshots, d: int, scaled: bool, workers: int = 1, dense_cutoff: int = DENSE_CUTOFF
) -> list[EmbeddingMatrix]:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(
                pool.map(lambda g: embed_snapshot_padded(g, d, scaled, dense_cutoff), snapshots)
            )
    return [embed_snapshot_padded(g, d, scaled, dense_cutoff) for g in snapshots]


def mirror_with_dimension(
    D: DistanceMatrix, c_setting, threshold: float
) -> tuple[MirrorCurve, int]:
    """Run CMDS, resolving c='auto' from the scree at the given threshold."""
    if c_setting == "auto":
        probe = cmds(D, 1)
        c_used, _ = select_dimension(probe.scree, threshold=threshold)
        c_used = min(c_used, D.grid.m - 1)
    else:
        c_used = int(c_setting)
    return cmds(D, c_used), c_used


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(output_dir, config_dict: dict, results: dict) -> None:
    entries = {}
    for root, _, files in os.walk(output_dir):
        for f in sorted(files):
            if f == "manifest.json":
                continue
            full = os.path.join(root, f)
            entries[os.path.relpath(full, output_dir)] = _sha256(full)
    config_json = json.dumps(config_dict, sort_keys=True)
    manifest = {
        "config": config_dict,
        "config_hash": hashlib.sha256(config_json.encode()).hexdigest(),
        "versions": {
            "netmirror": __version__,
            "numpy": np.__version__,
            "scipy": __import__("scipy").__version__,
        },
        "artifacts": entries,
        "results": results,
    }
    with open(os.path.join(output_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_partition(path) -> dict[str, np.ndarray]:
    try:
        lines = open(path, "r", encoding="utf-8").read().strip().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read partition file {path}: {exc}") from exc
    groups: dict[str, list[int]] = {}
    start = 1 if lines and lines[0].lower().startswith("node") else 0
    for line in lines[start:]:
        if not line.strip():
            continue
        node_s, comm = line.split(",", 1)
        groups.setdefault(comm.strip(), []).append(int(node_s))
    return {k: np.array(sorted(v), dtype=np.int64) for k, v in sorted(groups.items())}


def _pipeline_core(
    snapshots: list[GraphSnapshot], config: PipelineConfig, output_dir
) -> dict:
    """Embed -> distances -> mirror -> isomap -> scans, writing artifacts."""
    os.makedirs(output_dir, exist_ok=True)
    emb_dir = os.path.join(output_dir, "embeddings")
    os.makedirs(emb_dir, exist_ok=True)
    embeddings = embed_snapshots(
        snapshots, config.d, config.scaled, config.workers, config.dense_cutoff
    )
    for i, e in enumerate(embeddings):
        write_embedding(
            e,
            os.path.join(emb_dir, f"emb_{i:04d}.csv"),
            os.path.join(emb_dir, f"emb_{i:04d}.json"),
        )
    D = distance_matrix(embeddings, refine=config.refine, workers=config.workers)
    write_distance_csv(D, os.path.join(output_dir, "distances.csv"))
    curve, c_used = mirror_with_dimension(D, config.c, config.scree_threshold)
    write_mirror_csv(curve, os.path.join(output_dir, "mirror.csv"))
    write_scree_csv(curve, os.path.join(output_dir, "scree.csv"))
    trace = isomap_1d(curve, k=config.isomap_k)
    write_isomap_csv(trace, os.path.join(output_dir, "isomap.csv"))
    results: dict = {"c": c_used, "m_times": D.grid.m, "n": snapshots[0].n}
    w = int(config.changepoint["w"])
    if D.grid.m > w:
        sig = sigmage_scan(trace, w=w, threshold=float(config.changepoint["threshold"]))
        reg = regression_band_scan(trace, w=w, multiplier=float(config.changepoint["multiplier"]))
        write_report_json(sig, os.path.join(output_dir, "sigmage.json"))
        write_report_json(reg, os.path.join(output_dir, "regression_band.json"))
        results["sigmage_flags"] = sig.flagged_times()
        results["regression_flags"] = reg.flagged_times()
    else:
        results["changepoint"] = f"skipped: {D.grid.m} times <= window {w}"
    return results


def run_pipeline(config: PipelineConfig) -> dict:
    """Full pipeline run; returns the manifest's results block."""
    kind = next(iter(config.input))
    if kind == "simulate":
        latents = simulate_latents(config.input["simulate"], config.seed)
        snapshots = sample_snapshots(latents, config.seed)
    elif kind == "load_trajectories":
        latents = read_trajectories(config.input["load_trajectories"])
        if config.seed is None:
            raise ConfigError("sampling from trajectories requires a seed")
        snapshots = sample_snapshots(latents, config.seed)
    else:
        snapshots = _load_snapshots(config.input["load"])
    results = _pipeline_core(snapshots, config, config.output_dir)
    if config.partition:
        groups = _read_partition(config.partition)
        results["communities"] = {}
        for name, nodes in groups.items():
            sub_dir = os.path.join(config.output_dir, "communities", name)
            sub_snaps = [induced_subgraph(g, nodes) for g in snapshots]
            results["communities"][name] = _pipeline_core(sub_snaps, config, sub_dir)
    _write_manifest(config.output_dir, config.to_dict(), results)
    return results


def _aligned_trace_error(trace: np.ndarray, reference: np.ndarray) -> float:
    """RMS gap after centering, minimized over the sign flip."""
    a = trace - trace.mean()
    b = reference - reference.mean()
    err = min(np.linalg.norm(a - b), np.linalg.norm(a + b))
    return float(err / np.sqrt(b.size))


def run_bootstrap(
    config: PipelineConfig,
    n_s_list,
    replicates: int,
    identity_resample: bool = False,
) -> dict:
    """Row-bootstrap study: resample latents, rerun the pipeline, compare traces.

    For each sample size and replicate the latent rows are drawn with
    replacement (or passed through unchanged when `identity_resample`, a
    testing hook), new graphs are sampled, and the resulting ISOMAP trace
    is compared to the source trace after centering and sign alignment.
    """
    kind = next(iter(config.input))
    if kind == "simulate":
        latents = simulate_latents(config.input["simulate"], config.seed)
    elif kind == "load_trajectories":
        latents = read_trajectories(config.input["load_trajectories"])
    else:
        raise ConfigError("bootstrap needs simulated or archived latent trajectories")
    os.makedirs(config.output_dir, exist_ok=True)

    source_dir = os.path.join(config.output_dir, "source")
    src_snapshots = sample_snapshots(latents, config.seed)
    _pipeline_core(src_snapshots, config, source_dir)
    source_trace = read_isomap_csv(os.path.join(source_dir, "isomap.csv"))

    summary: dict = {"n_s": {}, "replicates": replicates}
    for n_s in n_s_list:
        errors = []
        for rep in range(replicates):
            sub = _substream(config.seed, _STREAM_BOOTSTRAP, int(n_s), rep)
            if identity_resample:
                resampled = latents
            else:
                resampled = bootstrap_resample(latents, int(n_s), sub)
            graph_seed = int(
                _substream(config.seed, _STREAM_BOOTSTRAP, int(n_s), rep, 1).generate_state(1)[0]
            )
            snapshots = sample_snapshots(resampled, graph_seed)
            embeddings = embed_snapshots(
                snapshots, config.d, config.scaled, config.workers, config.dense_cutoff
            )
            D = distance_matrix(embeddings, refine=config.refine, workers=config.workers)
            curve, _ = mirror_with_dimension(D, config.c, config.scree_threshold)
            trace = isomap_1d(curve, k=config.isomap_k)
            write_isomap_csv(
                trace,
                os.path.join(config.output_dir, f"isomap_ns{int(n_s)}_rep{rep:03d}.csv"),
            )
            errors.append(_aligned_trace_error(trace.values, source_trace.values))
        summary["n_s"][str(int(n_s))] = {
            "errors": errors,
            "median_error": float(np.median(errors)),
        }
    with open(os.path.join(config.output_dir, "bootstrap_summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(config.output_dir, config.to_dict(), {"bootstrap": summary})
    return summary


# --- command-line front end ---------------------------------------------------


def _config_from_args(args) -> PipelineConfig:
    raw: dict = {}
    if getattr(args, "simulate_spec", None):
        raw["input"] = {"simulate": json.loads(args.simulate_spec)}
    elif getattr(args, "input_dir", None):
        raw["input"] = {"load": args.input_dir}
    for name in (
        "d",
        "c",
        "scaled",
        "refine",
        "isomap_k",
        "seed",
        "partition",
        "workers",
        "scree_threshold",
        "dense_cutoff",
        "output_dir",
    ):
        val = getattr(args, name, None)
        if val is not None:
            raw[name] = val
    cp = {}
    for src, dst in (("w", "w"), ("threshold", "threshold"), ("multiplier", "multiplier")):
        val = getattr(args, f"cp_{src}", None)
        if val is not None:
            cp[dst] = val
    if cp:
        raw["changepoint"] = cp
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from exc
        raw.update(file_cfg)  # the config file overrides flags
    if "c" in raw and raw["c"] != "auto":
        raw["c"] = int(raw["c"])
    try:
        return PipelineConfig.from_dict(raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _add_common_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; its values override flags")
    p.add_argument("--simulate-spec", help="inline JSON simulation spec")
    p.add_argument("--input-dir", help="directory of .edges snapshots")
    p.add_argument("--d", type=int, help="embedding dimension")
    p.add_argument("--c", help="mirror dimension (integer or 'auto')")
    p.add_argument("--scaled", type=int, choices=(0, 1), help="eigenvalue-scaled embedding")
    p.add_argument("--refine", type=int, choices=(0, 1), help="refine alignments")
    p.add_argument("--isomap-k", dest="isomap_k", type=int, help="ISOMAP neighborhood size")
    p.add_argument("--cp-w", dest="cp_w", type=int, help="change-point window")
    p.add_argument("--cp-threshold", dest="cp_threshold", type=float)
    p.add_argument("--cp-multiplier", dest="cp_multiplier", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--partition", help="node,community CSV for per-community runs")
    p.add_argument("--workers", type=int)
    p.add_argument("--scree-threshold", dest="scree_threshold", type=float)
    p.add_argument("--dense-cutoff", dest="dense_cutoff", type=int)
    p.add_argument("--output-dir", dest="output_dir", help="artifact directory")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netmirror", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate snapshots and latent trajectories")
    p.add_argument("--simulate-spec", required=False)
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--output-dir", dest="output_dir", required=True)

    p = sub.add_parser("embed", help="spectrally embed edge-list snapshots")
    p.add_argument("--input-dir", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--scaled", type=int, choices=(0, 1), default=1)
    p.add_argument("--dense-cutoff", dest="dense_cutoff", type=int, default=DENSE_CUTOFF)
    p.add_argument("--output-dir", dest="output_dir", required=True)

    p = sub.add_parser("distances", help="pairwise distance matrix from embeddings")
    p.add_argument("--embeddings-dir", required=True)
    p.add_argument("--refine", type=int, choices=(0, 1), default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", required=True)

    p = sub.add_parser("mirror", help="CMDS mirror and scree from a distance matrix")
    p.add_argument("--distances", required=True)
    p.add_argument("--c", default="auto")
    p.add_argument("--scree-threshold", dest="scree_threshold", type=float, default=0.95)
    p.add_argument("--output-dir", dest="output_dir", required=True)

    p = sub.add_parser("isomap", help="1-D geodesic trace of a mirror")
    p.add_argument("--mirror", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--output", required=True)

    p = sub.add_parser("changepoint", help="rolling scans over an ISOMAP trace")
    p.add_argument("--isomap", required=True)
    p.add_argument("--w", type=int, default=5)
    p.add_argument("--threshold", type=float, default=5.0)
    p.add_argument("--multiplier", type=float, default=5.0)
    p.add_argument("--output-dir", dest="output_dir", required=True)

    p = sub.add_parser("pipeline", help="full end-to-end run")
    _add_common_pipeline_flags(p)

    p = sub.add_parser("bootstrap", help="row-bootstrap convergence study")
    _add_common_pipeline_flags(p)
    p.add_argument("--ns-list", dest="ns_list", required=True, help="comma-separated sizes")
    p.add_argument("--replicates", type=int, default=10)

    return parser


def _cmd_simulate(args) -> None:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
        spec = cfg.get("input", {}).get("simulate", cfg.get("simulate"))
        seed = cfg.get("seed", args.seed)
    else:
        if not args.simulate_spec:
            raise ConfigError("simulate needs --simulate-spec or --config")
        spec = json.loads(args.simulate_spec)
        seed = args.seed
    if seed is None:
        raise ConfigError("simulation requires a seed")
    latents = simulate_latents(spec, int(seed))
    snapshots = sample_snapshots(latents, int(seed))
    snap_dir = os.path.join(args.output_dir, "snapshots")
    os.makedirs(snap_dir, exist_ok=True)
    for i, g in enumerate(snapshots):
        write_edge_list(g, os.path.join(snap_dir, f"snap_{i:04d}.edges"))
    write_trajectories(
        latents, os.path.join(args.output_dir, "trajectories"), seed=int(seed), spec=spec
    )
    print(f"wrote {len(snapshots)} snapshots to {snap_dir}")


def _cmd_embed(args) -> None:
    snaps = _load_snapshots(args.input_dir)
    os.makedirs(args.output_dir, exist_ok=True)
    for i, g in enumerate(snaps):
        e = embed_snapshot_padded(g, args.d, bool(args.scaled), args.dense_cutoff)
        write_embedding(
            e,
            os.path.join(args.output_dir, f"emb_{i:04d}.csv"),
            os.path.join(args.output_dir, f"emb_{i:04d}.json"),
        )
    print(f"embedded {len(snaps)} snapshots into {args.output_dir}")


def _load_embeddings(directory) -> list[EmbeddingMatrix]:
    names = sorted(
        f for f in os.listdir(directory) if f.startswith("emb_") and f.endswith(".csv")
    )
    if not names:
        raise DataError(f"no emb_*.csv files in {directory}")
    out = []
    for f in names:
        out.append(
            read_embedding(
                os.path.join(directory, f),
                os.path.join(directory, f.replace(".csv", ".json")),
            )
        )
    return out


def _cmd_distances(args) -> None:
    embeddings = _load_embeddings(args.embeddings_dir)
    D = distance_matrix(embeddings, refine=bool(args.refine), workers=args.workers)
    write_distance_csv(D, args.output)
    print(f"wrote {D.grid.m}x{D.grid.m} distance matrix to {args.output}")


def _cmd_mirror(args) -> None:
    D = read_distance_csv(args.distances)
    c_setting = args.c if args.c == "auto" else int(args.c)
    curve, c_used = mirror_with_dimension(D, c_setting, args.scree_threshold)
    os.makedirs(args.output_dir, exist_ok=True)
    write_mirror_csv(curve, os.path.join(args.output_dir, "mirror.csv"))
    write_scree_csv(curve, os.path.join(args.output_dir, "scree.csv"))
    print(f"mirror written with c={c_used}")


def _cmd_isomap(args) -> None:
    curve = read_mirror_csv(args.mirror)
    trace = isomap_1d(curve, k=args.k)
    write_isomap_csv(trace, args.output)
    print(f"wrote trace of {trace.grid.m} points to {args.output}")


def _cmd_changepoint(args) -> None:
    trace = read_isomap_csv(args.isomap)
    sig = sigmage_scan(trace, w=args.w, threshold=args.threshold)
    reg = regression_band_scan(trace, w=args.w, multiplier=args.multiplier)
    os.makedirs(args.output_dir, exist_ok=True)
    write_report_json(sig, os.path.join(args.output_dir, "sigmage.json"))
    write_report_json(reg, os.path.join(args.output_dir, "regression_band.json"))
    flags = sorted(set(sig.flagged_times()) | set(reg.flagged_times()))
    if flags:
        print("flagged times: " + ", ".join(repr(t) for t in flags))
    else:
        print("no change points flagged")


def _cmd_pipeline(args) -> None:
    config = _config_from_args(args)
    results = run_pipeline(config)
    print(f"pipeline complete: artifacts in {config.output_dir}")
    for key in ("sigmage_flags", "regression_flags"):
        if results.get(key):
            print(f"{key}: {results[key]}")


def _cmd_bootstrap(args) -> None:
    config = _config_from_args(args)
    n_s_list = [int(x) for x in args.ns_list.split(",")]
    summary = run_bootstrap(config, n_s_list, args.replicates)
    for n_s, block in summary["n_s"].items():
        print(f"n_s={n_s}: median aligned trace error {block['median_error']:.6g}")


_COMMANDS = {
    "simulate": _cmd_simulate,
    "embed": _cmd_embed,
    "distances": _cmd_distances,
    "mirror": _cmd_mirror,
    "isomap": _cmd_isomap,
    "changepoint": _cmd_changepoint,
    "pipeline": _cmd_pipeline,
    "bootstrap": _cmd_bootstrap,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except NetmirrorError as exc:
        if isinstance(exc, ConfigError):
            code = 2
        elif isinstance(exc, DataError):
            code = 3
        else:
            code = 4
        payload = {
            "stage": args.command,
            "error": type(exc).__name__,
            "cause": str(exc),
        }
        if isinstance(exc, RankDeficiencyError):
            payload["eigenvalues"] = exc.eigenvalues
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return code
    except OSError as exc:
        print(
            json.dumps(
                {"stage": args.command, "error": "OSError", "cause": str(exc)},
                sort_keys=True,
            ),
            file=sys.stderr,
        )
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
