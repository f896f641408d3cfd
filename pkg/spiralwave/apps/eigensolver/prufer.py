"""
Prüfer-angle shooting for the radial eigenproblem of -Delta_m.

With w = a v' the radial equation (a v')' = (m^2/a - lambda a) v becomes the
first-order system v' = w / a, w' = (m^2 - lambda a^2) v / a. Writing
(v, w) = R (cos theta, sin theta) gives

    theta' = (-sin^2 theta + (m^2 - lambda a^2) cos^2 theta) / a
    (ln R)' = sin theta cos theta (1 + m^2 - lambda a^2) / a

which is the Euler-time flow divided by a. Near a tip a(s) ~ s, the bounded
solution leaves along tan theta = m; near a far tip a(s) ~ s_star - s it
arrives along tan theta = -m.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from spiralwave.apps.geometry.boundary import BoundaryCondition
from spiralwave.apps.geometry.grid import RadialGrid
from spiralwave.apps.geometry.surface import SurfaceOfRevolution
from spiralwave.core import settings
from spiralwave.core.exceptions import IntegrationError
from spiralwave.core.metrics import PRUFER_SHOTS

logger = logging.getLogger(__name__)


@dataclass
class PruferState:
    """Terminal state of a Prüfer integration plus the sampled path."""

    theta: float
    s: float
    crossings: int
    path_s: np.ndarray = field(default_factory=lambda: np.zeros(0))
    path_theta: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def zeros(self) -> int:
        """Zeros of v passed so far, read off the continuous angle."""
        return max(0, int(np.floor(0.5 - self.theta / np.pi)))


def _cos_event(s, y):
    return np.cos(y[0])


_cos_event.terminal = False


def _angle_rhs(S: SurfaceOfRevolution, m: int, lam: float):
    m2 = float(m * m)

    def rhs(s, y):
        a = float(S.a(s))
        c = np.cos(y[0])
        sn = np.sin(y[0])
        return [(-sn * sn + (m2 - lam * a * a) * c * c) / a]

    return rhs


def _polar_rhs(S: SurfaceOfRevolution, m: int, lam: float):
    m2 = float(m * m)

    def rhs(s, y):
        a = float(S.a(s))
        c = np.cos(y[0])
        sn = np.sin(y[0])
        q = m2 - lam * a * a
        return [(-sn * sn + q * c * c) / a, sn * c * (1.0 + q) / a]

    return rhs


def integrate_angle(
    S: SurfaceOfRevolution,
    m: int,
    lam: float,
    s_start: float,
    s_end: float,
    theta_start: float,
    t_eval: Optional[np.ndarray] = None,
    count_crossings: bool = True,
):
    """Integrate the angle equation between two interior points of [0, s_star]."""
    PRUFER_SHOTS.labels(surface=S.name).inc()
    solution = solve_ivp(
        _angle_rhs(S, m, lam),
        (s_start, s_end),
        [theta_start],
        method="DOP853",
        rtol=settings.PRUFER_RTOL,
        atol=settings.PRUFER_ATOL,
        t_eval=t_eval,
        events=_cos_event if count_crossings else None,
    )
    if solution.status < 0:
        raise IntegrationError(
            f"Prüfer integration failed: {solution.message}",
            details={
                "surface": S.name,
                "m": m,
                "lambda": lam,
                "interval": [s_start, s_end],
                "reached": float(solution.t[-1]) if solution.t.size else s_start,
            },
        )
    return solution


def integrate_polar(
    S: SurfaceOfRevolution,
    m: int,
    lam: float,
    s_start: float,
    s_end: float,
    theta_start: float,
    log_r_start: float,
    t_eval: np.ndarray,
):
    """Integrate angle and log-amplitude, sampled at t_eval."""
    PRUFER_SHOTS.labels(surface=S.name).inc()
    solution = solve_ivp(
        _polar_rhs(S, m, lam),
        (s_start, s_end),
        [theta_start, log_r_start],
        method="DOP853",
        rtol=settings.PRUFER_RTOL,
        atol=settings.PRUFER_ATOL,
        t_eval=t_eval,
    )
    if solution.status < 0:
        raise IntegrationError(
            f"Prüfer amplitude integration failed: {solution.message}",
            details={"surface": S.name, "m": m, "lambda": lam, "interval": [s_start, s_end]},
        )
    return solution


def boundary_target(S: SurfaceOfRevolution, bc: BoundaryCondition) -> float:
    """Angle in (-pi/2, 0] encoding alpha1 v + alpha2 v' = 0 at s_star."""
    if bc.is_dirichlet:
        return -0.5 * np.pi
    return -float(np.arctan(float(S.a(S.s_star)) * bc.alpha1 / bc.alpha2))


def prufer_flow(
    S: SurfaceOfRevolution,
    m: int,
    lam: float,
    bc: BoundaryCondition,
    grid: Optional[RadialGrid] = None,
) -> PruferState:
    """
    Integrate the Prüfer angle from the tip asymptotic state to the far end.

    The far end is s_star when the surface has a boundary and
    s_star - tip_offset otherwise. When a grid is given, the angle is also
    sampled at every grid node inside the integration interval.

    Raises:
        IntegrationError: on step-size underflow
    """
    if m < 1:
        raise ValueError("Winding number m must be at least 1")
    bc.check_surface(S)
    tip_offset = grid.tip_offset if grid is not None else settings.TIP_OFFSET_FACTOR * S.s_star
    s_end = S.s_star if S.has_boundary else S.s_star - tip_offset
    theta0 = float(np.arctan(m))
    t_eval = None
    if grid is not None:
        inside = grid.nodes[(grid.nodes >= tip_offset) & (grid.nodes <= s_end)]
        t_eval = np.unique(np.concatenate([[tip_offset], inside, [s_end]]))

    solution = integrate_angle(S, m, lam, tip_offset, s_end, theta0, t_eval=t_eval)
    crossings = int(solution.t_events[0].size)
    state = PruferState(
        theta=float(solution.y[0, -1]),
        s=s_end,
        crossings=crossings,
        path_s=solution.t.copy() if t_eval is not None else np.zeros(0),
        path_theta=solution.y[0].copy() if t_eval is not None else np.zeros(0),
    )
    logger.debug(f"Prüfer flow m={m} lambda={lam:.12g}: theta={state.theta:.12g}, crossings={crossings}")
    return state
