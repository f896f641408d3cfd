import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from spiralwave.apps.complex_branch.solver import ComplexBranchSolver, SolutionPoint
from spiralwave.apps.kinetics.reaction import KineticsSpec
from spiralwave.apps.real_branch.branch import BranchPoint
from spiralwave.core import settings
from spiralwave.core.exceptions import SecantError, SolverFailure
from spiralwave.core.instrumentation import track_latency
from spiralwave.core.metrics import SOLVER_LATENCY

logger = logging.getLogger(__name__)

SECANT_OFFSET = 1e-3


@dataclass(frozen=True, eq=False)
class LocusSample:
    b: np.ndarray
    eta_tilde: float
    omega_residual: float
    iterations: int
    point: SolutionPoint = field(repr=False)

    @property
    def beta(self) -> float:
        return float(self.b[0])


@dataclass
class FrozenLocus:
    samples: List[LocusSample]
    skipped: List[Dict]
    slope_at_zero: np.ndarray

    def as_pairs(self) -> List[Tuple[float, float]]:
        return [(sample.beta, sample.eta_tilde) for sample in self.samples]


def _secant(
    solver: ComplexBranchSolver,
    b: np.ndarray,
    eta0: float,
    eta1: float,
    guess: np.ndarray,
    omega_guess: float,
    tol: float,
    max_iter: int,
) -> LocusSample:
    """Root of eta -> Omega(eta, b) by the secant method, warm-starting each solve."""
    previous = solver.solve(eta0, b, guess=guess, omega_guess=omega_guess)
    if abs(previous.omega) <= tol:
        return LocusSample(b=b, eta_tilde=eta0, omega_residual=previous.omega, iterations=0, point=previous)
    current = solver.solve(eta1, b, guess=previous.u, omega_guess=previous.omega)
    for iteration in range(1, max_iter + 1):
        if abs(current.omega) <= tol:
            return LocusSample(b=b, eta_tilde=current.eta, omega_residual=current.omega, iterations=iteration, point=current)
        slope = (current.omega - previous.omega) / (current.eta - previous.eta)
        if slope == 0.0 or not np.isfinite(slope):
            raise SecantError(
                f"Secant slope degenerate at eta={current.eta:.6g}",
                details={"b": b.tolist(), "eta": current.eta, "omega": current.omega},
            )
        eta_next = current.eta - current.omega / slope
        previous, current = current, solver.solve(eta_next, b, guess=current.u, omega_guess=current.omega)
    raise SecantError(
        f"Secant did not reach |Omega| <= {tol:g} in {max_iter} iterations",
        details={"b": b.tolist(), "eta": current.eta, "omega": current.omega},
    )


def frozen_locus(
    base: BranchPoint,
    beta_samples: Sequence,
    K: Optional[KineticsSpec] = None,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    threads: Optional[int] = None,
) -> FrozenLocus:
    """
    Trace eta_tilde(b), the parameter where the rotation frequency vanishes.

    The b = 0 anchor is solved first; the remaining samples start from it and
    run concurrently. Each secant starts at the linear prediction
    -dOmega/db * b / dOmega/deta. Samples whose secant fails are skipped and
    reported.
    """
    solver = ComplexBranchSolver(base, K)
    kinetics = solver.kinetics
    if kinetics.param_dim < 1:
        raise ValueError("The frozen locus needs at least one kinetic parameter")
    tol = settings.LOCUS_OMEGA_TOL if tol is None else tol
    max_iter = settings.LOCUS_MAX_ITER if max_iter is None else max_iter
    d_eta, d_b = solver.quadrature_sensitivities()
    zero = np.zeros(kinetics.param_dim)
    params = [kinetics.params(b) for b in beta_samples]

    def trace(b: np.ndarray, guess: np.ndarray, omega_guess: float):
        eta0 = float(-(d_b @ b) / d_eta)
        try:
            return _secant(solver, b, eta0, eta0 + SECANT_OFFSET, guess, omega_guess, tol, max_iter), None
        except SolverFailure as exc:
            logger.warning(f"Frozen locus sample b={b.tolist()} skipped: {exc.message}")
            return None, {"b": b.tolist(), "reason": exc.message, **exc.details}

    with track_latency(SOLVER_LATENCY, operation="frozen_locus"):
        anchor, failure = trace(zero, base.u, 0.0)
        if anchor is None:
            raise SecantError("Frozen locus anchor at b = 0 failed", details=failure)
        pending = [b for b in params if np.any(b != 0.0)]
        with ThreadPoolExecutor(max_workers=max(1, threads or settings.THREADS)) as executor:
            traced = dict(zip(map(tuple, pending), executor.map(lambda b: trace(b, anchor.point.u, anchor.point.omega), pending)))

    samples, skipped = [], []
    for b in params:
        sample, failure = (anchor, None) if not np.any(b != 0.0) else traced[tuple(b)]
        if sample is not None:
            samples.append(sample)
        else:
            skipped.append(failure)
    logger.info(f"Frozen locus: {len(samples)} samples, {len(skipped)} skipped")
    return FrozenLocus(samples=samples, skipped=skipped, slope_at_zero=-d_b / d_eta)
