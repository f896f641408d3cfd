from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from spiralwave.apps.complex_branch.solver import SolutionPoint

from .polar import PolarProfile, polar_decompose


@dataclass(frozen=True, eq=False)
class SpiralCurves:
    """
    Level curves of the pattern phase on the embedded surface at time t.

    arms[k] holds the points (a cos phi_k, a sin phi_k, atilde) for
    phi_k(s) = (Omega t - p(s) + k pi) / m, sampled at s.
    """

    t: float
    m: int
    omega: float
    s: np.ndarray
    arms: List[np.ndarray]


def render_pattern(
    pt: SolutionPoint,
    m: int,
    t: float = 0.0,
    points_per_arm: int = 200,
    profile: Optional[PolarProfile] = None,
) -> SpiralCurves:
    if m < 1:
        raise ValueError("Winding number m must be at least 1")
    if points_per_arm < 2:
        raise ValueError("points_per_arm must be at least 2")
    profile = profile or polar_decompose(pt)
    surface = pt.operator.surface
    s = np.linspace(0.0, surface.s_star, points_per_arm)
    p = np.interp(s, profile.nodes, profile.p)
    arms = []
    for k in range(2 * m):
        phi = (pt.omega * t - p + k * np.pi) / m
        arms.append(surface.embed(s, phi))
    return SpiralCurves(t=float(t), m=m, omega=pt.omega, s=s, arms=arms)
