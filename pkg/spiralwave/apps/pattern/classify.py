import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from spiralwave.apps.complex_branch.solver import SolutionPoint
from spiralwave.apps.kinetics.reaction import KineticsSpec
from spiralwave.core import settings

from .polar import PolarProfile, polar_decompose

logger = logging.getLogger(__name__)

ROTATING = "rotating"
FROZEN = "frozen"
SPIRAL = "spiral"
VORTEX = "vortex"


@dataclass(frozen=True)
class PatternClass:
    rotation: str
    shape: str
    diagnostics: Dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return f"{self.rotation} {self.shape}"

    @property
    def consistent(self) -> bool:
        return bool(self.diagnostics.get("consistent", True))


def spiral_criterion(pt: SolutionPoint, K: Optional[KineticsSpec] = None) -> float:
    """Omega - eta f_R(0, b) + f_I(0, b); a nonzero value forces a spiral."""
    K = K or pt.kinetics
    return float(pt.omega - pt.eta * K.real(0.0, pt.b) + K.imag(0.0, pt.b))


def classify(
    pt: SolutionPoint,
    K: Optional[KineticsSpec] = None,
    omega_tol: Optional[float] = None,
    p_tol: Optional[float] = None,
    profile: Optional[PolarProfile] = None,
) -> PatternClass:
    """
    Label a solution as rotating/frozen and spiral/vortex.

    The thresholds decide the label. The algebraic criterion is evaluated
    alongside and only reported: a nonzero value with a vortex label is
    flagged as inconsistent.

    Args:
        pt: converged solution
        K: kinetics, the solution's own when omitted
        omega_tol: |Omega| threshold for frozen
        p_tol: threshold on sup|p'| * s_star for vortex
        profile: precomputed polar decomposition
    """
    K = K or pt.kinetics
    omega_tol = settings.OMEGA_TOL if omega_tol is None else omega_tol
    p_tol = settings.P_TOL if p_tol is None else p_tol
    if omega_tol <= 0.0 or p_tol <= 0.0:
        raise ValueError("Classification tolerances must be positive")

    profile = profile or polar_decompose(pt)
    sup_p_prime = profile.sup_p_prime()
    phase_scale = sup_p_prime * pt.grid.s_star
    criterion = spiral_criterion(pt, K)

    rotation = FROZEN if abs(pt.omega) <= omega_tol else ROTATING
    shape = VORTEX if phase_scale <= p_tol else SPIRAL
    criterion_spiral = abs(criterion) > omega_tol
    consistent = not (criterion_spiral and shape == VORTEX)
    if not consistent:
        logger.warning(
            f"Vortex label at eta={pt.eta:.6g} b={np.atleast_1d(pt.b).tolist()} "
            f"despite spiral criterion {criterion:.3e}"
        )
    return PatternClass(
        rotation=rotation,
        shape=shape,
        diagnostics={
            "omega": pt.omega,
            "sup_p_prime": sup_p_prime,
            "phase_scale": phase_scale,
            "omega_tol": omega_tol,
            "p_tol": p_tol,
            "criterion": criterion,
            "criterion_spiral": criterion_spiral,
            "consistent": consistent,
        },
    )
