import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from spiralwave.core import settings
from spiralwave.core.exceptions import ConvergenceError, SingularJacobianError
from spiralwave.core.metrics import NEWTON_ITERATIONS

logger = logging.getLogger(__name__)


@dataclass
class NewtonResult:
    x: np.ndarray
    residual_norm: float
    iterations: int
    step_norms: List[float] = field(default_factory=list)
    stagnated: bool = False


def newton_solve(
    equation: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], sp.spmatrix],
    x0: np.ndarray,
    residual_norm: Callable[[np.ndarray], float],
    step_norm: Callable[[np.ndarray], float],
    solver: str,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> NewtonResult:
    """
    Newton iteration with sparse direct solves.

    Converges when residual_norm(G(x)) <= tol. An iterate whose residual is
    already below NEWTON_STAGNATION_TOL and stops decreasing (less than a
    factor 2 per step) has reached the roundoff floor and is accepted as well.

    Raises:
        SingularJacobianError: if a linear solve fails or returns non-finite values
        ConvergenceError: on divergence (step norm growing over
            DIVERGENCE_WINDOW consecutive iterations) or when max_iter is exhausted
    """
    tol = tol if tol is not None else settings.NEWTON_TOL
    max_iter = max_iter if max_iter is not None else settings.NEWTON_MAX_ITER
    window = settings.DIVERGENCE_WINDOW

    x = np.array(x0, dtype=float, copy=True)
    steps: List[float] = []
    G = equation(x)
    res = residual_norm(G)
    if res <= tol:
        return NewtonResult(x, res, 0, steps)

    for iteration in range(1, max_iter + 1):
        J = jacobian(x)
        with warnings.catch_warnings():
            warnings.simplefilter("error", MatrixRankWarning)
            try:
                delta = spsolve(sp.csc_matrix(J), -G)
            except (MatrixRankWarning, RuntimeError) as exc:
                raise SingularJacobianError(
                    f"{solver}: singular Jacobian at iteration {iteration}",
                    details={"iteration": iteration, "residual": res, "error": str(exc)},
                ) from exc
        if not np.all(np.isfinite(delta)):
            raise SingularJacobianError(
                f"{solver}: non-finite Newton step at iteration {iteration}",
                details={"iteration": iteration, "residual": res},
            )
        NEWTON_ITERATIONS.labels(solver=solver).inc()
        x = x + delta
        steps.append(step_norm(delta))
        previous = res
        G = equation(x)
        res = residual_norm(G)
        logger.debug(f"{solver} Newton iteration {iteration}: residual={res:.3e}, step={steps[-1]:.3e}")

        if res <= tol:
            return NewtonResult(x, res, iteration, steps)
        if res <= settings.NEWTON_STAGNATION_TOL and res > 0.5 * previous:
            return NewtonResult(x, res, iteration, steps, stagnated=True)
        if len(steps) > window and all(steps[-k] > steps[-k - 1] for k in range(1, window + 1)):
            raise ConvergenceError(
                f"{solver}: Newton diverging, step norm grew for {window} consecutive iterations",
                details={"iteration": iteration, "residual": res, "steps": steps},
            )

    raise ConvergenceError(
        f"{solver}: no convergence in {max_iter} iterations (residual {res:.3e})",
        details={"iterations": max_iter, "residual": res, "steps": steps},
    )
