"""Geometry of Bell correlations: nonsignalling polytope sampling,
trace-distance nonlocality, and correlation-matrix norms."""

from .cycle import local_volume_ratio, pyramid_volume
from .distance import (
    DEFAULT_EPS,
    DistanceResult,
    NlEvaluator,
    VertexBasis,
    is_local,
    local_vertex_basis,
    nl_distance,
)
from .experiments import (
    ExperimentSpec,
    Histogram,
    VolumeReport,
    reproduce,
    run_22d,
    run_histogram,
    run_volume,
)
from .norms import NormReport, classify, gamma2_norm, norm_experiment, pi_norm
from .sampler import (
    SampleBatch,
    SamplerConfig,
    SamplingMethod,
    gibbs_sample,
    iid_box_sample,
    rejection_sample,
)
from .scenario import (
    Behavior,
    Bipartite,
    Cycle,
    Framework,
    Multipartite,
    Scenario,
    full_correlators,
    pr_box,
)

__version__ = "0.1.0"

__all__ = [
    "Behavior",
    "Bipartite",
    "Cycle",
    "DEFAULT_EPS",
    "DistanceResult",
    "ExperimentSpec",
    "Framework",
    "Histogram",
    "Multipartite",
    "NlEvaluator",
    "NormReport",
    "SampleBatch",
    "SamplerConfig",
    "SamplingMethod",
    "Scenario",
    "VertexBasis",
    "VolumeReport",
    "classify",
    "full_correlators",
    "gamma2_norm",
    "gibbs_sample",
    "iid_box_sample",
    "is_local",
    "local_vertex_basis",
    "local_volume_ratio",
    "nl_distance",
    "norm_experiment",
    "pi_norm",
    "pr_box",
    "pyramid_volume",
    "rejection_sample",
    "reproduce",
    "run_22d",
    "run_histogram",
    "run_volume",
]
