"""jllab: a numerical laboratory for linear dimensionality reduction limits.

The package builds point sets that are hard to embed, measures the
distortion of linear maps on them, certifies rank lower bounds from
spectra, estimates gaussian tail probabilities against exact oracles, and
accounts for quantization nets of bounded matrices.  Everything is
deterministic given a 64-bit seed.
"""

from .certify import (
    MODE_NORM,
    MODE_PAIRWISE,
    AuditError,
    AuditReport,
    DistortionReport,
    SpectralCertificate,
    audit_embedding,
    distortion,
    pair_from_flat,
    rank_lower_bound,
    spectral_certificate,
    witness_search,
)
from .concentration import (
    CalibrationConstants,
    CalibrationError,
    TailEstimate,
    TailQuery,
    calibrate_constants,
    chaos_tail_estimate,
    chaos_threshold,
    chi_square_sf,
    joint_event_rate,
    map_samples,
    norm_deviation_sample,
    norm_tail_estimate,
    norm_tail_oracle,
    symmetric_form_tail_estimate,
)
from .embeddings import (
    LinearMap,
    OptimizeInfo,
    OptimizerOptions,
    gaussian_map,
    identity_map,
    optimize_map,
    pca_map,
    read_map,
    write_map,
)
from .net import (
    NetCardinality,
    NetParams,
    covering_radius_for,
    log_cardinality,
    net_params,
    quantize,
)
from .pointset import (
    MAX_TOTAL_COORDS,
    PointSet,
    SizeError,
    gaussian_vectors,
    hard_instance,
    read_pointset,
    simplex,
    standard_basis,
    write_pointset,
)
from .seeds import Seed, as_seed, mix64

__version__ = "0.1.0"

__all__ = [
    "AuditError",
    "AuditReport",
    "CalibrationConstants",
    "CalibrationError",
    "DistortionReport",
    "LinearMap",
    "MAX_TOTAL_COORDS",
    "MODE_NORM",
    "MODE_PAIRWISE",
    "NetCardinality",
    "NetParams",
    "OptimizeInfo",
    "OptimizerOptions",
    "PointSet",
    "Seed",
    "SizeError",
    "SpectralCertificate",
    "TailEstimate",
    "TailQuery",
    "as_seed",
    "audit_embedding",
    "calibrate_constants",
    "chaos_tail_estimate",
    "chaos_threshold",
    "chi_square_sf",
    "covering_radius_for",
    "distortion",
    "gaussian_map",
    "gaussian_vectors",
    "hard_instance",
    "identity_map",
    "joint_event_rate",
    "log_cardinality",
    "map_samples",
    "mix64",
    "net_params",
    "norm_deviation_sample",
    "norm_tail_estimate",
    "norm_tail_oracle",
    "optimize_map",
    "pair_from_flat",
    "pca_map",
    "quantize",
    "rank_lower_bound",
    "read_map",
    "read_pointset",
    "simplex",
    "spectral_certificate",
    "standard_basis",
    "symmetric_form_tail_estimate",
    "witness_search",
    "write_map",
    "write_pointset",
]
