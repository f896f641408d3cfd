"""
Amplitude/phase decomposition u = A e^{ip} of radial profiles.

The phase derivative is evaluated on grid intervals and averaged onto nodes.
Intervals touching a node whose amplitude is at or below the floor carry no
value; nodes without a valid neighbouring interval take p' = 0, the
continuous extension at zeros of u.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from spiralwave.apps.complex_branch.solver import SolutionPoint
from spiralwave.apps.kinetics.reaction import KineticsSpec
from spiralwave.core import settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PolarProfile:
    nodes: np.ndarray
    A: np.ndarray
    p_prime: np.ndarray
    p: np.ndarray
    interval_p_prime: np.ndarray
    amp_floor: float

    @property
    def resolved(self) -> np.ndarray:
        """Nodes whose amplitude lies above the floor."""
        return self.A > self.amp_floor

    def sup_p_prime(self) -> float:
        return float(np.max(np.abs(self.p_prime))) if self.p_prime.size else 0.0


def _valid_intervals(A: np.ndarray, amp_floor: float) -> np.ndarray:
    above = A > amp_floor
    return above[:-1] & above[1:]


def _to_nodes(interval_values: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Average the valid neighbouring interval values onto nodes."""
    values = np.where(valid, interval_values, 0.0)
    weight = valid.astype(float)
    total = np.zeros(valid.size + 1)
    count = np.zeros(valid.size + 1)
    total[:-1] += values
    total[1:] += values
    count[:-1] += weight
    count[1:] += weight
    return np.divide(total, count, out=np.zeros_like(total), where=count > 0)


def _amp_floor(A: np.ndarray, amp_floor_factor: Optional[float]) -> float:
    factor = settings.AMP_FLOOR_FACTOR if amp_floor_factor is None else amp_floor_factor
    return factor * float(np.max(A)) if A.size else 0.0


def polar_decompose(pt: SolutionPoint, amp_floor_factor: Optional[float] = None) -> PolarProfile:
    """
    Split a solution profile into amplitude and phase.

    On each interval p' is the phase increment arg(conj(u_i) u_{i+1}) over the
    interval length, so a profile A e^{ics} returns c exactly.
    """
    nodes = pt.grid.nodes
    u = np.asarray(pt.u, dtype=complex)
    A = np.abs(u)
    floor = _amp_floor(A, amp_floor_factor)
    valid = _valid_intervals(A, floor)

    increments = np.angle(np.conj(u[:-1]) * u[1:])
    interval = np.where(valid, increments / np.diff(nodes), 0.0)
    p_prime = _to_nodes(interval, valid)
    p = cumulative_trapezoid(p_prime, nodes, initial=0.0)
    return PolarProfile(nodes=nodes, A=A, p_prime=p_prime, p=p, interval_p_prime=interval, amp_floor=floor)


def interval_flux(pt: SolutionPoint, K: Optional[KineticsSpec] = None) -> np.ndarray:
    """
    Phase flux a A^2 p' on each interval from the integrated equation.

    F_i = -lambda / (1 + eta^2) * sum_{j <= i} W_j |u_j|^2 (Omega - eta f_R + f_I).
    """
    K = K or pt.kinetics
    op = pt.operator
    v = op.restrict(pt.u)
    y = np.abs(v) ** 2
    density = op.weights * y * (pt.omega - pt.eta * K.real(y, pt.b) + K.imag(y, pt.b))
    cumulative = np.cumsum(op.embed(density))[:-1]
    return -pt.lam / (1.0 + pt.eta**2) * cumulative


def phase_derivative_integral(
    pt: SolutionPoint,
    K: Optional[KineticsSpec] = None,
    amp_floor_factor: Optional[float] = None,
) -> np.ndarray:
    """
    Phase derivative from the integral relation instead of differentiating the phase.

    Uses the same amplitude floor and node averaging as polar_decompose, so
    the two profiles are directly comparable.
    """
    grid = pt.grid
    A = np.abs(np.asarray(pt.u))
    floor = _amp_floor(A, amp_floor_factor)
    valid = _valid_intervals(A, floor)
    a_mid = pt.operator.surface.a(grid.midpoints)
    denominator = a_mid * A[:-1] * A[1:]
    flux = interval_flux(pt, K)
    interval = np.divide(flux, denominator, out=np.zeros_like(flux), where=valid)
    return _to_nodes(interval, valid)
