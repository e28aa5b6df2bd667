"""Pathwise coordinate optimization for sparse generalized linear models.

Fits entire regularization paths for l1-, MCP-, and SCAD-penalized linear,
logistic, Poisson, and scaled (noise-level-estimating) linear regression using
warm starts, strong-rule coordinate preselection, active-set coordinate
descent, and proximal Newton steps for the curved losses.
"""

from .data import Dataset, StandardizationRecord, generate_synthetic, load_csv, save_csv, standardize
from .exceptions import (
    DataError,
    DegenerateCurvatureError,
    DegenerateDataError,
    DegenerateFitError,
    EvaluationError,
    FormatError,
    ParameterError,
    ParseError,
    SparsePathError,
)
from .objectives import (
    ObjectiveSpec,
    QuadraticModel,
    full_gradient,
    loss_value,
    quadratic_approx,
    sigma_update,
)
from .regularizers import RegularizerSpec, penalty_derivative, penalty_total, penalty_value, scalar_threshold
from .solver import (
    ActiveState,
    GramCache,
    MiddleResult,
    PathConfig,
    PathFit,
    compute_lambda_path,
    fit_path,
    inner_coordinate_loop,
    kkt_residual,
    middle_loop,
    strong_rule_preselect,
)

__version__ = "0.1.0"

__all__ = [
    "ActiveState",
    "DataError",
    "Dataset",
    "DegenerateCurvatureError",
    "DegenerateDataError",
    "DegenerateFitError",
    "EvaluationError",
    "FormatError",
    "GramCache",
    "MiddleResult",
    "ObjectiveSpec",
    "ParameterError",
    "ParseError",
    "PathConfig",
    "PathFit",
    "QuadraticModel",
    "RegularizerSpec",
    "SparsePathError",
    "StandardizationRecord",
    "compute_lambda_path",
    "fit_path",
    "full_gradient",
    "generate_synthetic",
    "inner_coordinate_loop",
    "kkt_residual",
    "load_csv",
    "loss_value",
    "middle_loop",
    "penalty_derivative",
    "penalty_total",
    "penalty_value",
    "quadratic_approx",
    "save_csv",
    "scalar_threshold",
    "sigma_update",
    "standardize",
    "strong_rule_preselect",
    "__version__",
]
