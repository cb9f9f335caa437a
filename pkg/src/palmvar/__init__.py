"""Estimation of VAR(1) transition matrices under sparsity or low-rank constraints.

The estimator fits time-series data by least squares while penalizing
violations of the steady-state Lyapunov relation. Structure is imposed
through a split variable and solved with proximal alternating linearized
minimization (:func:`palm_solve`); a gradient-projection baseline
(:func:`gp_solve`) handles convex relaxations.
"""

from .evaluation import (
    bisect_l1_threshold,
    cosine_score,
    count_nonzeros,
    cross_validate,
    evaluate,
    normalized_error,
)
from .gp import GpConfig, gp_solve
from .model_data import (
    SteadyStateData,
    TimeSeriesData,
    VarModel,
    discretize,
    generate_lowrank_stable,
    generate_sparse_stable,
    numerical_rank,
    rescale_to_stable,
    sample_covariance,
    sample_steady_state,
    simulate,
    solve_lyapunov,
    spectral_radius,
)
from .objective import ProblemSpec, full_gradient, full_objective
from .palm import PalmConfig, SolveReport, palm_solve
from .proximal import Constraint

__version__ = "0.1.0"

__all__ = [
    "bisect_l1_threshold",
    "cosine_score",
    "count_nonzeros",
    "cross_validate",
    "evaluate",
    "normalized_error",
    "SteadyStateData",
    "TimeSeriesData",
    "VarModel",
    "discretize",
    "generate_lowrank_stable",
    "generate_sparse_stable",
    "numerical_rank",
    "rescale_to_stable",
    "sample_covariance",
    "sample_steady_state",
    "simulate",
    "solve_lyapunov",
    "spectral_radius",
    "GpConfig",
    "gp_solve",
    "ProblemSpec",
    "full_gradient",
    "full_objective",
    "PalmConfig",
    "SolveReport",
    "palm_solve",
    "Constraint",
    "__version__",
]
