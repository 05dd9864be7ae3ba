"""Euclidean mirrors for network time series.

Simulate latent-position random-graph time series, estimate the maximum
directional variation distance between snapshots from spectral
embeddings, reconstruct the low-dimensional mirror curve via classical
multidimensional scaling and ISOMAP, and flag change points with rolling
scans.
"""

__version__ = "0.1.0"

from ._accel import numba_enabled
from .changepoint import (
    RegressionBandReport,
    SigmageReport,
    regression_band_scan,
    sigmage_scan,
)
from .embed import EmbeddingMatrix, ase
from .errors import (
    ConfigError,
    DataError,
    NetmirrorError,
    NotPositiveSemidefiniteError,
    NumericalError,
    RankDeficiencyError,
)
from .graphgen import (
    GraphSnapshot,
    LatentMatrix,
    SbmSpec,
    induced_subgraph,
    sample_rdpg,
    sbm_block_matrix_at,
    sbm_latents,
)
from .lpp import (
    DriftSpec,
    LatentTrajectorySet,
    TimeGrid,
    bootstrap_resample,
    dmv_oracle_bm,
    dmv_oracle_ibm,
    simulate_bm_drift,
    simulate_integrated_bm,
)
from .metric import AlignmentResult, dmv_hat, procrustes_rotation, sin_theta_norm, spectral_norm
from .mirror import (
    DistanceMatrix,
    IsomapTrace,
    MirrorCurve,
    cmds,
    distance_matrix,
    isomap_1d,
    select_dimension,
    stress,
)

__all__ = [
    "__version__",
    "numba_enabled",
    "AlignmentResult",
    "ConfigError",
    "DataError",
    "DistanceMatrix",
    "DriftSpec",
    "EmbeddingMatrix",
    "GraphSnapshot",
    "IsomapTrace",
    "LatentMatrix",
    "LatentTrajectorySet",
    "MirrorCurve",
    "NetmirrorError",
    "NotPositiveSemidefiniteError",
    "NumericalError",
    "RankDeficiencyError",
    "RegressionBandReport",
    "SbmSpec",
    "SigmageReport",
    "TimeGrid",
    "ase",
    "bootstrap_resample",
    "cmds",
    "distance_matrix",
    "dmv_hat",
    "dmv_oracle_bm",
    "dmv_oracle_ibm",
    "induced_subgraph",
    "isomap_1d",
    "procrustes_rotation",
    "regression_band_scan",
    "sample_rdpg",
    "sbm_block_matrix_at",
    "sbm_latents",
    "select_dimension",
    "sigmage_scan",
    "simulate_bm_drift",
    "simulate_integrated_bm",
    "sin_theta_norm",
    "spectral_norm",
    "stress",
]
