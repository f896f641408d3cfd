"""
Gauge-fixed bordered Newton solver for the complex radial equation

    (1 + i eta) Delta_m u + i lambda Omega u + lambda f(|u|^2, b) u = 0.

The unknowns are the real and imaginary parts of u on the grid unknowns plus
the rotation frequency Omega. One scalar gauge equation, the weighted
projection of Im u onto the base profile, removes the S^1 phase degeneracy so
the 2N + 1 square system is nonsingular near the base point.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from spiralwave.apps.kinetics.reaction import KineticsSpec
from spiralwave.apps.real_branch.branch import BranchPoint
from spiralwave.apps.real_branch.discretization import RadialOperator
from spiralwave.apps.real_branch.newton import newton_solve
from spiralwave.core.exceptions import SingularJacobianError
from spiralwave.core.instrumentation import instrument
from spiralwave.core.metrics import JACOBIAN_CONDITION, SOLVER_LATENCY

logger = logging.getLogger(__name__)

FD_STEP = 1e-4


@dataclass(frozen=True, eq=False)
class SolutionPoint:
    """A converged relative equilibrium (Omega, u) at parameters (lambda, eta, b)."""

    lam: float
    eta: float
    b: np.ndarray
    omega: float
    u: np.ndarray
    residual_norm: float
    gauge_residual: float
    freq_relation_residual: float
    iterations: int = 0
    condition: float = float("nan")
    operator: Optional[RadialOperator] = field(default=None, repr=False)
    kinetics: Optional[KineticsSpec] = field(default=None, repr=False)

    @property
    def grid(self):
        return self.operator.grid

    @property
    def b_key(self) -> Tuple[float, ...]:
        return tuple(float(value) for value in np.atleast_1d(self.b))


@dataclass
class FrequencySensitivities:
    """First derivatives of Omega(eta, b) at the decoupled base point."""

    d_eta: float
    d_b: np.ndarray
    d_eta_fd: float
    d_b_fd: np.ndarray

    @property
    def locus_slope(self) -> np.ndarray:
        """Slope of the frozen locus eta(b) through the origin."""
        return -self.d_b / self.d_eta


def residual_full(
    operator: RadialOperator,
    K: KineticsSpec,
    lam: float,
    omega: float,
    u: np.ndarray,
    eta: float,
    b=None,
) -> np.ndarray:
    """Complex residual profile W^-1 G on the full grid (zero on closure nodes)."""
    v = operator.restrict(np.asarray(u, dtype=complex))
    return operator.embed(_equation(operator, K, lam, omega, v, eta, K.params(b)) / operator.weights)


def _equation(
    operator: RadialOperator,
    K: KineticsSpec,
    lam: float,
    omega: float,
    v: np.ndarray,
    eta: float,
    b: np.ndarray,
) -> np.ndarray:
    y = np.abs(v) ** 2
    W = operator.weights
    return (1.0 + 1j * eta) * operator.apply(v) + 1j * lam * omega * W * v + lam * W * K.value(y, b) * v


def gauge_residual(u: np.ndarray, u_ref: np.ndarray, operator: RadialOperator) -> float:
    """
    Weighted projection of Im u onto the reference profile.

    Normalized by the reference norm, so u = i u_ref gives 1 and
    u = exp(i theta) u_ref gives sin(theta).
    """
    reference = operator.restrict(np.real(u_ref))
    return float(
        np.sum(operator.weights * np.imag(operator.restrict(u)) * reference)
        / np.sum(operator.weights * reference**2)
    )


class ComplexBranchSolver:
    """
    Bordered Newton solves continuing one real base point into the complex equation.

    Args:
        base: converged point on a real branch; its profile fixes the gauge
        K: kinetics; defaults to the kinetics the base was computed with
    """

    def __init__(self, base: BranchPoint, K: Optional[KineticsSpec] = None):
        self.base = base
        self.kinetics = K or base.kinetics
        self.operator = base.operator
        reference = self.operator.restrict(base.u)
        self.gauge_row = self.operator.weights * reference / np.sum(self.operator.weights * reference**2)

    @property
    def size(self) -> int:
        return self.operator.size

    # -- stacked real system -------------------------------------------------

    def _split(self, z: np.ndarray) -> Tuple[np.ndarray, float]:
        N = self.size
        return z[:N] + 1j * z[N : 2 * N], float(z[-1])

    def _stack(self, v: np.ndarray, omega: float) -> np.ndarray:
        return np.concatenate([v.real, v.imag, [omega]])

    def system(self, z: np.ndarray, lam: float, eta: float, b: np.ndarray) -> np.ndarray:
        v, omega = self._split(z)
        G = _equation(self.operator, self.kinetics, lam, omega, v, eta, b)
        return np.concatenate([G.real, G.imag, [self.gauge_row @ v.imag]])

    def system_norm(self, F: np.ndarray) -> float:
        N = self.size
        G = F[:N] + 1j * F[N : 2 * N]
        return float(np.hypot(self.operator.weighted_norm_of_equation(G), F[-1]))

    def step_norm(self, delta: np.ndarray) -> float:
        v, omega = self._split(delta)
        return float(np.hypot(self.operator.norm(v), omega))

    def jacobian(self, z: np.ndarray, lam: float, eta: float, b: np.ndarray) -> sp.csc_matrix:
        """2 x 2 real block Jacobian bordered by the Omega column and the gauge row."""
        op, K = self.operator, self.kinetics
        v, omega = self._split(z)
        x, y = v.real, v.imag
        Y = x * x + y * y
        fR, fI = K.real(Y, b), K.imag(Y, b)
        dfR, dfI = K.dy_real(Y, b), K.dy_imag(Y, b)
        lw = lam * op.weights
        Kmat = op.stiffness

        dA_dx = fR + 2.0 * x * x * dfR - 2.0 * x * y * dfI
        dA_dy = 2.0 * x * y * dfR - fI - 2.0 * y * y * dfI
        dB_dx = 2.0 * x * y * dfR + fI + 2.0 * x * x * dfI
        dB_dy = fR + 2.0 * y * y * dfR + 2.0 * x * y * dfI

        blocks = [
            [Kmat + sp.diags(lw * dA_dx), -eta * Kmat + sp.diags(lw * (dA_dy - omega)), sp.csc_matrix((-lw * y)[:, None])],
            [eta * Kmat + sp.diags(lw * (dB_dx + omega)), Kmat + sp.diags(lw * dB_dy), sp.csc_matrix((lw * x)[:, None])],
            [None, sp.csc_matrix(self.gauge_row[None, :]), None],
        ]
        return sp.bmat(blocks, format="csc")

    def condition_number(self, J: sp.csc_matrix) -> float:
        """1-norm condition number of the bordered Jacobian."""
        try:
            lu = splu(J)
        except RuntimeError as exc:
            raise SingularJacobianError(f"Bordered Jacobian is singular: {exc}") from exc
        inverse = lu.solve(np.eye(J.shape[0]))
        if not np.all(np.isfinite(inverse)):
            raise SingularJacobianError("Bordered Jacobian is numerically singular")
        norm = float(abs(J).sum(axis=0).max())
        return norm * float(np.abs(inverse).sum(axis=0).max())

    # -- solves --------------------------------------------------------------

    def solve(
        self,
        eta: float,
        b=None,
        lam: Optional[float] = None,
        guess: Optional[np.ndarray] = None,
        omega_guess: float = 0.0,
    ) -> SolutionPoint:
        """
        Solve at (lam, eta, b) from a warm start.

        Args:
            eta: diffusion twist parameter
            b: kinetic parameter vector; the nominal kinetics parameter when omitted
            lam: overrides the base lambda
            guess: full-grid complex profile; the base profile when omitted
            omega_guess: starting frequency

        Returns:
            SolutionPoint with all residuals evaluated

        Raises:
            SingularJacobianError: possible secondary bifurcation
            ConvergenceError: Newton diverged or stagnated
        """
        K = self.kinetics
        params = K.params(b)
        lam = self.base.lam if lam is None else float(lam)
        start = self.base.u if guess is None else guess
        z0 = self._stack(self.operator.restrict(np.asarray(start, dtype=complex)), omega_guess)

        result = newton_solve(
            equation=lambda z: self.system(z, lam, eta, params),
            jacobian=lambda z: self.jacobian(z, lam, eta, params),
            x0=z0,
            residual_norm=self.system_norm,
            step_norm=self.step_norm,
            solver="complex",
        )
        v, omega = self._split(result.x)
        condition = self.condition_number(self.jacobian(result.x, lam, eta, params))
        JACOBIAN_CONDITION.set(condition)
        G = _equation(self.operator, K, lam, omega, v, eta, params)
        u = self.operator.embed(v)
        point = SolutionPoint(
            lam=lam,
            eta=float(eta),
            b=params,
            omega=omega,
            u=u,
            residual_norm=self.operator.weighted_norm_of_equation(G),
            gauge_residual=gauge_residual(u, self.base.u, self.operator),
            freq_relation_residual=0.0,
            iterations=result.iterations,
            condition=condition,
            operator=self.operator,
            kinetics=K,
        )
        point = replace(point, freq_relation_residual=frequency_relation_residual(point, K))
        logger.debug(
            f"Solved eta={eta:.6g} b={params.tolist()} lambda={lam:.6g}: omega={omega:.12g}, "
            f"{result.iterations} iterations, cond={condition:.3e}"
        )
        return point

    def quadrature_sensitivities(self) -> Tuple[float, np.ndarray]:
        """d Omega / d eta and d Omega / d b at (0, 0) as weighted averages over the base profile."""
        op, K = self.operator, self.kinetics
        u0 = op.restrict(self.base.u)
        y0 = u0 * u0
        zero = np.zeros(K.param_dim)
        mass = np.sum(op.weights * y0)
        d_eta = float(np.sum(op.weights * K.real(y0, zero) * y0) / mass)
        d_b = -np.sum(op.weights * K.db_imag(y0, zero) * y0, axis=-1) / mass
        return d_eta, np.asarray(d_b, dtype=float)

    def sensitivities(self, h: float = FD_STEP) -> FrequencySensitivities:
        """Quadrature derivatives of Omega at (0, 0) with centred finite differences alongside."""
        K = self.kinetics
        zero = np.zeros(K.param_dim)
        d_eta, d_b = self.quadrature_sensitivities()

        d_eta_fd = (self.solve(h, zero).omega - self.solve(-h, zero).omega) / (2.0 * h)
        d_b_fd = np.empty(K.param_dim)
        for k in range(K.param_dim):
            shift = np.zeros(K.param_dim)
            shift[k] = h
            d_b_fd[k] = (self.solve(0.0, shift).omega - self.solve(0.0, -shift).omega) / (2.0 * h)
        return FrequencySensitivities(d_eta=d_eta, d_b=np.asarray(d_b, dtype=float), d_eta_fd=float(d_eta_fd), d_b_fd=d_b_fd)


def frequency_relation_residual(pt: SolutionPoint, K: Optional[KineticsSpec] = None) -> float:
    """
    Normalized weighted integral of (Omega - eta f_R + f_I)|u|^2.

    Vanishes at every solution of the discrete equation.
    """
    K = K or pt.kinetics
    op = pt.operator
    v = op.restrict(pt.u)
    y = np.abs(v) ** 2
    mass = float(np.sum(op.weights * y))
    if mass == 0.0:
        return 0.0
    integrand = (pt.omega - pt.eta * K.real(y, pt.b) + K.imag(y, pt.b)) * y
    return float(np.sum(op.weights * integrand) / mass)


@instrument(SOLVER_LATENCY, operation="solve_perturbed")
def solve_perturbed(
    base: BranchPoint,
    eta: float,
    b=None,
    lam: Optional[float] = None,
    guess: Optional[np.ndarray] = None,
    omega_guess: float = 0.0,
    K: Optional[KineticsSpec] = None,
) -> SolutionPoint:
    return ComplexBranchSolver(base, K).solve(eta, b, lam=lam, guess=guess, omega_guess=omega_guess)


def frequency_sensitivities(base: BranchPoint, K: Optional[KineticsSpec] = None, h: float = FD_STEP) -> FrequencySensitivities:
    return ComplexBranchSolver(base, K).sensitivities(h)
