from typing import Any, Dict, Optional


class SpiralwaveError(Exception):
    """Base exception for toolkit errors"""

    exit_code = 2

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.details = details or {}
        super().__init__(message)


class ConfigError(SpiralwaveError):
    """Malformed run configuration or command line"""

    exit_code = 64


class ValidationFailure(SpiralwaveError):
    """Input data violating a geometric or kinetic hypothesis"""

    exit_code = 1


class GeometryError(ValidationFailure):
    """Exception raised for surfaces that fail validation"""

    pass


class BoundaryConditionError(ValidationFailure):
    """Exception raised for inadmissible boundary data"""

    pass


class KineticsError(ValidationFailure):
    """Exception raised for reaction terms violating the standing kinetic hypotheses"""

    pass


class SolverFailure(SpiralwaveError):
    """Numerical failure inside a solver"""

    exit_code = 2


class IntegrationError(SolverFailure):
    """Adaptive integration failed (step-size underflow near a tip)"""

    pass


class BracketNotFoundError(SolverFailure):
    """No eigenvalue bracket below the search cap"""

    pass


class NodalCountError(SolverFailure):
    """Computed eigenfunction has the wrong number of sign changes"""

    pass


class SpectrumOrderError(SolverFailure):
    """Computed eigenvalues are not strictly increasing in n"""

    pass


class ConvergenceError(SolverFailure):
    """Newton stagnation or divergence"""

    pass


class SingularJacobianError(ConvergenceError):
    """Jacobian is singular beyond the gauged direction"""

    pass


class SecantError(SolverFailure):
    """Secant iteration for the frozen locus failed"""

    pass


class OutputError(SpiralwaveError):
    """Writing an output artifact failed"""

    exit_code = 2
