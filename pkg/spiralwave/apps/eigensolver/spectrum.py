import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from spiralwave.apps.geometry.boundary import BoundaryCondition
from spiralwave.apps.geometry.grid import RadialGrid, make_grid
from spiralwave.apps.geometry.surface import SurfaceOfRevolution
from spiralwave.core import settings
from spiralwave.core.exceptions import BracketNotFoundError, NodalCountError, SpectrumOrderError
from spiralwave.core.instrumentation import track_latency
from spiralwave.core.metrics import SOLVER_LATENCY

from .prufer import boundary_target, integrate_angle, integrate_polar

logger = logging.getLogger(__name__)

# Relative dead-band for sign changes
NODAL_DEADBAND = 1e-12


@dataclass(frozen=True)
class EigenPair:
    """
    Eigenvalue lambda_n^m of -Delta_m and its radial eigenfunction.

    radial is sampled on grid.nodes, normalised to int v^2 a ds = 1 and
    positive near s = 0.
    """

    m: int
    n: int
    lam: float
    radial: np.ndarray
    grid: RadialGrid


def nodal_count(profile) -> int:
    """Strict sign changes between consecutive samples, ignoring a dead-band."""
    values = np.asarray(profile, dtype=float)
    if values.size == 0:
        return 0
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return 0
    kept = values[np.abs(values) > NODAL_DEADBAND * scale]
    signs = np.sign(kept)
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _mismatch(S: SurfaceOfRevolution, m: int, n: int, bc: BoundaryCondition, tip_offset: float) -> Callable[[float], float]:
    """Function of lambda decreasing through zero at lambda_n^m."""
    theta_tip = float(np.arctan(m))
    if S.has_boundary:
        target = boundary_target(S, bc) - n * np.pi

        def mismatch(lam: float) -> float:
            solution = integrate_angle(S, m, lam, tip_offset, S.s_star, theta_tip, count_crossings=False)
            return float(solution.y[0, -1]) - target

        return mismatch

    mid = 0.5 * S.s_star
    far = S.s_star - tip_offset

    def mismatch(lam: float) -> float:
        left = integrate_angle(S, m, lam, tip_offset, mid, theta_tip, count_crossings=False)
        right = integrate_angle(S, m, lam, far, mid, -theta_tip, count_crossings=False)
        return float(left.y[0, -1]) - float(right.y[0, -1]) + n * np.pi

    return mismatch


def eigenvalue(
    S: SurfaceOfRevolution,
    m: int,
    n: int,
    bc: BoundaryCondition,
    lambda_cap: Optional[float] = None,
    tip_offset: Optional[float] = None,
) -> float:
    """
    Eigenvalue lambda_n^m by Prüfer shooting.

    The terminal mismatch is positive at lambda = 0 and strictly decreasing in
    lambda. It is bracketed by doubling from lambda = 1 and then solved with
    Brent's method.

    Raises:
        BracketNotFoundError: if no sign change occurs below lambda_cap
    """
    if m < 1:
        raise ValueError("Winding number m must be at least 1")
    if n < 0:
        raise ValueError("Nodal index n must be nonnegative")
    bc.check_surface(S)
    lambda_cap = lambda_cap or settings.LAMBDA_CAP
    tip_offset = tip_offset or settings.TIP_OFFSET_FACTOR * S.s_star

    with track_latency(SOLVER_LATENCY, operation="eigenvalue"):
        mismatch = _mismatch(S, m, n, bc, tip_offset)
        lower, upper = 0.0, 1.0
        f_upper = mismatch(upper)
        while f_upper > 0.0:
            lower = upper
            upper *= 2.0
            if upper > lambda_cap:
                raise BracketNotFoundError(
                    f"No bracket for lambda_{n}^{m} below lambda_cap={lambda_cap:g}; increase lambda_cap",
                    details={"surface": S.name, "m": m, "n": n, "lambda_cap": lambda_cap},
                )
            f_upper = mismatch(upper)
        if f_upper == 0.0:
            lam = upper
        else:
            lam = float(brentq(mismatch, lower, upper, xtol=1e-13, rtol=0.1 * settings.EIGEN_RTOL))

    logger.info(f"Eigenvalue on {S.name} ({bc.label()}): lambda_{n}^{m} = {lam:.12g}")
    return lam


def _tip_log_amplitude(m: int, tip_offset: float) -> float:
    return m * float(np.log(tip_offset))


def eigenfunction(
    S: SurfaceOfRevolution,
    m: int,
    n: int,
    bc: BoundaryCondition,
    grid: Optional[RadialGrid] = None,
    lam: Optional[float] = None,
) -> EigenPair:
    """
    Normalised radial eigenfunction v_n^m sampled on the grid.

    (v, w) is rebuilt from the Prüfer angle and log-amplitude started on the
    tip ray v = s^m. On boundaryless surfaces a second solution is started on
    the far-tip ray and spliced at s_star / 2.

    Raises:
        NodalCountError: if the profile does not have exactly n sign changes
    """
    grid = grid or make_grid(S)
    if lam is None:
        lam = eigenvalue(S, m, n, bc, tip_offset=grid.tip_offset)
    nodes = grid.nodes
    s0 = grid.tip_offset
    theta_tip = float(np.arctan(m))
    log_r0 = _tip_log_amplitude(m, s0)
    radial = np.zeros(nodes.size)

    if S.has_boundary:
        left = integrate_polar(S, m, lam, s0, S.s_star, theta_tip, log_r0, nodes[1:])
        radial[1:] = np.exp(left.y[1]) * np.cos(left.y[0])
    else:
        mid_index = int(np.argmin(np.abs(nodes - 0.5 * S.s_star)))
        mid = nodes[mid_index]
        left = integrate_polar(S, m, lam, s0, mid, theta_tip, log_r0, nodes[1:mid_index + 1])
        right = integrate_polar(
            S, m, lam, nodes[-2], mid, -theta_tip, log_r0, nodes[mid_index:-1][::-1]
        )
        v_left = np.exp(left.y[1]) * np.cos(left.y[0])
        w_left = np.exp(left.y[1]) * np.sin(left.y[0])
        v_right = (np.exp(right.y[1]) * np.cos(right.y[0]))[::-1]
        w_right = (np.exp(right.y[1]) * np.sin(right.y[0]))[::-1]
        # least-squares match of (v, w) at the splice node
        scale = (v_left[-1] * v_right[0] + w_left[-1] * w_right[0]) / (v_right[0] ** 2 + w_right[0] ** 2)
        radial[1:mid_index + 1] = v_left
        radial[mid_index:-1] = scale * v_right
        radial[mid_index] = v_left[-1]

    a = S.a(nodes)
    norm = float(np.sqrt(simpson(radial**2 * a, x=nodes)))
    radial = radial / norm
    if radial[1] < 0.0:
        radial = -radial

    count = nodal_count(radial[1:-1])
    if count != n:
        raise NodalCountError(
            f"Eigenfunction for lambda_{n}^{m} has {count} sign changes, expected {n}",
            details={"surface": S.name, "m": m, "n": n, "lambda": lam, "count": count},
        )
    return EigenPair(m=m, n=n, lam=lam, radial=radial, grid=grid)


def spectrum(
    S: SurfaceOfRevolution,
    m: int,
    bc: BoundaryCondition,
    n_max: int,
    grid: Optional[RadialGrid] = None,
    threads: Optional[int] = None,
) -> List[EigenPair]:
    """
    Eigenpairs for n = 0..n_max, solved concurrently and returned in order.

    Raises:
        SpectrumOrderError: if the eigenvalues are not strictly increasing
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    grid = grid or make_grid(S)
    workers = max(1, min(threads or settings.THREADS, n_max + 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pairs = list(pool.map(lambda n: eigenfunction(S, m, n, bc, grid), range(n_max + 1)))

    values = np.array([pair.lam for pair in pairs])
    gaps = np.diff(values)
    if np.any(gaps <= 1e-8):
        raise SpectrumOrderError(
            "Computed eigenvalues are not strictly increasing",
            details={"m": m, "values": values.tolist()},
        )
    return pairs
