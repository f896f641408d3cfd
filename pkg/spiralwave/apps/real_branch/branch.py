import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackError, eigsh

from spiralwave.apps.eigensolver.spectrum import eigenfunction, nodal_count
from spiralwave.apps.geometry.boundary import BoundaryCondition, default_boundary
from spiralwave.apps.geometry.grid import RadialGrid, make_grid
from spiralwave.apps.geometry.surface import SurfaceOfRevolution
from spiralwave.apps.kinetics.reaction import KineticsSpec
from spiralwave.core import settings
from spiralwave.core.exceptions import ConvergenceError, SolverFailure
from spiralwave.core.instrumentation import instrument
from spiralwave.core.metrics import BRANCH_POINTS, SOLVER_LATENCY

from .discretization import RadialOperator
from .newton import newton_solve

logger = logging.getLogger(__name__)

# Points with weighted norm below this count as the trivial solution
TRIVIAL_NORM = 1e-8
SUP_SLACK = 1e-8


@dataclass(frozen=True, eq=False)
class BranchPoint:
    """
    One converged solution of the real radial equation.

    u lives on the full grid (tip closure values included). sigma_proj is the
    weighted projection sum W u e_n onto the discrete eigenvector.
    """

    lam: float
    u: np.ndarray
    sigma_sign: int
    residual_norm: float
    nodal_index: int
    sigma_proj: float
    sup_u: float
    principal_eigenvalue: float
    operator: RadialOperator = field(repr=False)
    kinetics: KineticsSpec = field(repr=False)
    # accepted on the Newton rounding floor rather than NEWTON_TOL
    stagnated: bool = False

    @property
    def m(self) -> int:
        return self.operator.m

    @property
    def grid(self) -> RadialGrid:
        return self.operator.grid


@dataclass
class Branch:
    m: int
    n: int
    points: List[BranchPoint]
    bifurcation_lambda: float
    discrete_bifurcation_lambda: float
    sigma_sign: int = 1
    complete: bool = True
    diagnostic: Dict = field(default_factory=dict)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([p.lam for p in self.points])

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([p.sigma_proj for p in self.points])


@dataclass
class LinearizedOperator:
    """Discrete Delta_m + lambda f_R + 2 lambda d_y f_R u^2 on the unknowns."""

    matrix: sp.csr_matrix
    weighted: sp.csr_matrix
    weights: np.ndarray

    def asymmetry(self) -> float:
        """Largest entry of W L - (W L)^T."""
        difference = (self.weighted - self.weighted.T).tocoo()
        return float(np.max(np.abs(difference.data))) if difference.nnz else 0.0

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v


@dataclass
class VerificationReport:
    m: int
    n: int
    checks: List[Dict] = field(default_factory=list)
    amplitude_monotone: bool = True

    @property
    def passed(self) -> bool:
        return self.amplitude_monotone and all(all(check["passed"].values()) for check in self.checks)

    def failures(self) -> List[Dict]:
        return [check for check in self.checks if not all(check["passed"].values())]


class RealBranchSolver:
    """
    Real radial equation Delta_m u + lambda f_R(u^2, 0) u = 0 on one grid.

    This class holds the discretisation and provides residuals, the
    linearization, the pitchfork predictor and natural-parameter continuation.
    """

    def __init__(
        self,
        S: SurfaceOfRevolution,
        K: KineticsSpec,
        m: int,
        bc: Optional[BoundaryCondition] = None,
        grid: Optional[RadialGrid] = None,
        operator: Optional[RadialOperator] = None,
    ):
        self.surface = S
        self.kinetics = K
        self.m = m
        self.bc = bc or default_boundary(S)
        self.grid = grid or (operator.grid if operator is not None else make_grid(S))
        self.operator = operator or RadialOperator.build(S, self.grid, m, self.bc)
        self._zero = np.zeros(K.param_dim)
        self._eigen: Dict[int, Tuple[float, float, np.ndarray]] = {}

    # -- equations -----------------------------------------------------------

    def equation(self, lam: float, v: np.ndarray) -> np.ndarray:
        """Cell-integrated equation G = K v + lambda W f_R(v^2, 0) v on the unknowns."""
        op = self.operator
        return op.apply(v) + lam * op.weights * self.kinetics.real(v * v, self._zero) * v

    def jacobian(self, lam: float, v: np.ndarray) -> sp.csc_matrix:
        y = v * v
        q = self.kinetics.real(y, self._zero) + 2.0 * self.kinetics.dy_real(y, self._zero) * y
        return (self.operator.stiffness + sp.diags(lam * self.operator.weights * q)).tocsc()

    def residual(self, lam: float, u: np.ndarray) -> np.ndarray:
        """Residual profile Delta_m u + lambda f_R(u^2, 0) u on the full grid."""
        op = self.operator
        v = op.restrict(u)
        return op.embed(self.equation(lam, v) / op.weights)

    def residual_norm(self, lam: float, u: np.ndarray) -> float:
        op = self.operator
        return op.weighted_norm_of_equation(self.equation(lam, op.restrict(u)))

    def linearization(self, lam: float, u: np.ndarray) -> LinearizedOperator:
        op = self.operator
        weighted = self.jacobian(lam, op.restrict(u)).tocsr()
        matrix = (sp.diags(1.0 / op.weights) @ weighted).tocsr()
        return LinearizedOperator(matrix=matrix, weighted=weighted, weights=op.weights)

    def principal_eigenvalue(self, lam: float, u: np.ndarray) -> float:
        """
        Largest eigenvalue of the linearization.

        The generalized problem J x = mu W x is symmetric; shift-invert about a
        point above the spectrum picks out the top eigenvalue.
        """
        op = self.operator
        v = op.restrict(u)
        y = v * v
        q = self.kinetics.real(y, self._zero) + 2.0 * self.kinetics.dy_real(y, self._zero) * y
        sigma = lam * float(np.max(q)) + 1.0
        J = self.jacobian(lam, v)
        W = sp.diags(op.weights, format="csc")
        try:
            values = eigsh(J, k=1, M=W, sigma=sigma, which="LM", return_eigenvectors=False)
        except ArpackError as exc:
            raise ConvergenceError(f"Principal eigenvalue did not converge: {exc}") from exc
        return float(values[0])

    # -- bifurcation ---------------------------------------------------------

    def eigenpair(self, n: int) -> Tuple[float, float, np.ndarray]:
        """(shooting lambda_n, discrete mu_n, discrete eigenvector on unknowns)."""
        if n not in self._eigen:
            pair = eigenfunction(self.surface, self.m, n, self.bc, self.grid)
            mu, vector = self.operator.discrete_eigenpair(n, pair.lam, self.operator.restrict(pair.radial))
            logger.info(
                f"Eigenpair m={self.m} n={n}: shooting {pair.lam:.12g}, discrete {mu:.12g}"
            )
            self._eigen[n] = (pair.lam, mu, vector)
        return self._eigen[n]

    def curvature(self, n: int) -> float:
        """D^2_sigma lambda_n(0) = -2 lambda_n d_y f_R(0, 0) sum W e^4."""
        _, mu, vector = self.eigenpair(n)
        dy0 = float(self.kinetics.dy_real(0.0, self._zero))
        return -2.0 * mu * dy0 * float(np.sum(self.operator.weights * vector**4))

    def predictor(self, n: int, sigma: float) -> Tuple[float, np.ndarray]:
        """Pitchfork predictor (lambda_n + sigma^2 D^2 / 2, sigma e_n) on the full grid."""
        _, mu, vector = self.eigenpair(n)
        lam = mu + 0.5 * sigma * sigma * self.curvature(n)
        return lam, self.operator.embed(sigma * vector)

    def sigma_for(self, n: int, lam: float) -> float:
        _, mu, _ = self.eigenpair(n)
        return float(np.sqrt(max(2.0 * (lam - mu) / self.curvature(n), 0.0)))

    # -- solving -------------------------------------------------------------

    def solve(self, lam: float, guess: np.ndarray, tol: Optional[float] = None) -> Tuple[np.ndarray, float, bool]:
        """Newton corrector at fixed lambda from a full-grid guess; returns (u, residual, stagnated)."""
        op = self.operator
        result = newton_solve(
            equation=lambda v: self.equation(lam, v),
            jacobian=lambda v: self.jacobian(lam, v),
            x0=op.restrict(guess),
            residual_norm=op.weighted_norm_of_equation,
            step_norm=op.norm,
            solver="real",
            tol=tol,
        )
        return op.embed(result.x), result.residual_norm, result.stagnated

    def make_point(
        self, n: int, lam: float, u: np.ndarray, residual: float, sigma_sign: int, stagnated: bool = False
    ) -> BranchPoint:
        _, _, vector = self.eigenpair(n)
        op = self.operator
        v = op.restrict(u)
        return BranchPoint(
            lam=float(lam),
            u=u,
            sigma_sign=sigma_sign,
            residual_norm=float(residual),
            nodal_index=nodal_count(v),
            sigma_proj=float(np.sum(op.weights * v * vector)),
            sup_u=float(np.max(np.abs(u))),
            principal_eigenvalue=self.principal_eigenvalue(lam, u),
            operator=op,
            kinetics=self.kinetics,
            stagnated=bool(stagnated),
        )

    def _admissible(self, n: int, point: BranchPoint) -> Optional[str]:
        if self.operator.norm(self.operator.restrict(point.u)) <= TRIVIAL_NORM:
            return "collapsed onto the trivial solution"
        if point.nodal_index != n:
            return f"nodal count {point.nodal_index} != {n}"
        if point.sup_u > self.kinetics.sup_bound + SUP_SLACK:
            return f"sup|u| = {point.sup_u:.6g} exceeds sqrt(C)"
        if np.sign(point.sigma_proj) != point.sigma_sign:
            return "switched pitchfork leg"
        return None

    def continue_branch(
        self,
        n: int,
        lambda_max: float,
        step: Optional[float] = None,
        sigma_sign: int = 1,
        step_min: Optional[float] = None,
        first_step: Optional[float] = None,
    ) -> Branch:
        """
        Natural-parameter continuation of C_n^m from the pitchfork to lambda_max.

        The first point comes from the pitchfork predictor, later ones from
        secant extrapolation in lambda. A failed corrector halves the step; at
        step_min the partial branch is returned with complete = False.
        """
        step = step or settings.CONTINUATION_STEP
        step_min = step_min or settings.CONTINUATION_STEP_MIN
        if sigma_sign not in (1, -1):
            raise ValueError("sigma_sign must be +1 or -1")
        lam_n, mu, _ = self.eigenpair(n)
        if lambda_max <= max(lam_n, mu):
            raise ValueError(f"lambda_max={lambda_max} must exceed the bifurcation value {max(lam_n, mu):.12g}")

        branch = Branch(
            m=self.m,
            n=n,
            points=[],
            bifurcation_lambda=lam_n,
            discrete_bifurcation_lambda=mu,
            sigma_sign=sigma_sign,
        )
        current = min(first_step or step, lambda_max - mu)
        lam_prev = mu
        while lam_prev < lambda_max:
            lam = min(lam_prev + current, lambda_max)
            guess = self._guess(branch, n, lam, sigma_sign)
            reason = None
            try:
                u, residual, stagnated = self.solve(lam, guess)
                point = self.make_point(n, lam, u, residual, sigma_sign, stagnated)
                reason = self._admissible(n, point)
            except SolverFailure as exc:
                reason = exc.message
            if reason is None:
                if branch.points and point.sup_u < branch.points[-1].sup_u - 1e-10:
                    logger.warning(f"Amplitude decreased along branch m={self.m} n={n} at lambda={lam:.6g}")
                branch.points.append(point)
                lam_prev = lam
                current = min(step, 1.5 * current)
                continue
            current *= 0.5
            logger.debug(f"Rejected lambda={lam:.6g} ({reason}); step -> {current:.3g}")
            if current < step_min:
                branch.complete = False
                branch.diagnostic = {"lambda": lam, "reason": reason, "step": current}
                logger.warning(
                    f"Branch m={self.m} n={n} stopped at lambda={lam_prev:.6g}: {reason}"
                )
                break

        BRANCH_POINTS.labels(m=str(self.m), n=str(n)).set(len(branch.points))
        logger.info(
            f"Branch m={self.m} n={n}: {len(branch.points)} points up to lambda={lam_prev:.6g}"
            f"{'' if branch.complete else ' (partial)'}"
        )
        return branch

    def _guess(self, branch: Branch, n: int, lam: float, sigma_sign: int) -> np.ndarray:
        points = branch.points
        if not points:
            return self.predictor(n, sigma_sign * self.sigma_for(n, lam))[1]
        if len(points) == 1:
            _, mu, _ = self.eigenpair(n)
            ratio = np.sqrt((lam - mu) / (points[0].lam - mu))
            return ratio * points[0].u
        last, before = points[-1], points[-2]
        t = (lam - last.lam) / (last.lam - before.lam)
        return last.u + t * (last.u - before.u)


def residual_gate(point: BranchPoint) -> float:
    """Residual bound a point must meet: the Newton tolerance, or the rounding floor if it stagnated."""
    return settings.NEWTON_STAGNATION_TOL if point.stagnated else settings.NEWTON_TOL


def verify_branch(B: Branch) -> VerificationReport:
    """Per-point residual, nodal, C0, sign and reflection checks."""
    report = VerificationReport(m=B.m, n=B.n)
    previous_sup = -np.inf
    for point in B.points:
        op = point.operator
        v = op.restrict(point.u)
        passed = {
            "residual": point.residual_norm <= residual_gate(point),
            "nodal": point.nodal_index == B.n,
            "sup_bound": point.sup_u <= point.kinetics.sup_bound + SUP_SLACK,
            "supercritical": point.lam > B.bifurcation_lambda,
        }
        values = {"lambda": point.lam, "sup_u": point.sup_u, "residual": point.residual_norm}
        if B.n == 0:
            passed["sign_definite"] = bool(np.min(point.sigma_sign * v) > 0.0)
            passed["principal_negative"] = point.principal_eigenvalue < 0.0
            values["principal_eigenvalue"] = point.principal_eigenvalue
        if op.surface.reflection_symmetric and op.grid.far_tip:
            mirrored = point.u[op.grid.mirror_index()]
            reflection = float(np.max(np.abs(mirrored - (-1) ** B.n * point.u)))
            passed["reflection"] = reflection <= 1e-6
            values["reflection_residual"] = reflection
        report.checks.append({"passed": passed, "values": values})
        if point.sup_u < previous_sup - 1e-10:
            report.amplitude_monotone = False
        previous_sup = point.sup_u
    return report


@instrument(SOLVER_LATENCY, operation="continue_branch")
def continue_branch(
    S: SurfaceOfRevolution,
    K: KineticsSpec,
    m: int,
    n: int,
    lambda_max: float,
    step: Optional[float] = None,
    bc: Optional[BoundaryCondition] = None,
    grid: Optional[RadialGrid] = None,
    sigma_sign: int = 1,
    first_step: Optional[float] = None,
) -> Branch:
    solver = RealBranchSolver(S, K, m, bc=bc, grid=grid)
    return solver.continue_branch(n, lambda_max, step=step, sigma_sign=sigma_sign, first_step=first_step)


def residual_real(
    S: SurfaceOfRevolution,
    K: KineticsSpec,
    m: int,
    lam: float,
    u: np.ndarray,
    bc: Optional[BoundaryCondition] = None,
    grid: Optional[RadialGrid] = None,
) -> np.ndarray:
    return RealBranchSolver(S, K, m, bc=bc, grid=grid).residual(lam, u)


def linearization_real(
    S: SurfaceOfRevolution,
    K: KineticsSpec,
    m: int,
    lam: float,
    u: np.ndarray,
    bc: Optional[BoundaryCondition] = None,
    grid: Optional[RadialGrid] = None,
) -> LinearizedOperator:
    return RealBranchSolver(S, K, m, bc=bc, grid=grid).linearization(lam, u)


def bifurcation_predictor(
    S: SurfaceOfRevolution,
    K: KineticsSpec,
    m: int,
    n: int,
    sigma: float,
    bc: Optional[BoundaryCondition] = None,
    grid: Optional[RadialGrid] = None,
) -> Tuple[float, np.ndarray]:
    return RealBranchSolver(S, K, m, bc=bc, grid=grid).predictor(n, sigma)
