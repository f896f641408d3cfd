from .branch import (
    Branch,
    BranchPoint,
    RealBranchSolver,
    VerificationReport,
    bifurcation_predictor,
    continue_branch,
    linearization_real,
    residual_real,
    verify_branch,
)
from .discretization import RadialOperator, build_operator
from .newton import NewtonResult, newton_solve

__all__ = [
    "Branch",
    "BranchPoint",
    "NewtonResult",
    "RadialOperator",
    "RealBranchSolver",
    "VerificationReport",
    "bifurcation_predictor",
    "build_operator",
    "continue_branch",
    "linearization_real",
    "newton_solve",
    "residual_real",
    "verify_branch",
]
