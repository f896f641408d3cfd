from .solver import (
    ComplexBranchSolver,
    FrequencySensitivities,
    SolutionPoint,
    frequency_relation_residual,
    frequency_sensitivities,
    gauge_residual,
    residual_full,
    solve_perturbed,
)
from .sweep import SolutionSheet, sweep_parameters

__all__ = [
    "ComplexBranchSolver",
    "FrequencySensitivities",
    "SolutionPoint",
    "SolutionSheet",
    "frequency_relation_residual",
    "frequency_sensitivities",
    "gauge_residual",
    "residual_full",
    "solve_perturbed",
    "sweep_parameters",
]
