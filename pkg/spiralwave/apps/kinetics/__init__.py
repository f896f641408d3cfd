from .assumptions import AssumptionReport, check_assumptions, locate_zero
from .reaction import (
    KineticsSpec,
    make_cubic,
    make_cubic_omega,
    make_custom_kinetics,
    make_polynomial_kinetics,
    parse_kinetics,
)

__all__ = [
    "AssumptionReport",
    "KineticsSpec",
    "check_assumptions",
    "locate_zero",
    "make_cubic",
    "make_cubic_omega",
    "make_custom_kinetics",
    "make_polynomial_kinetics",
    "parse_kinetics",
]
