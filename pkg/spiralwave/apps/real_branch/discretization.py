"""
Finite-volume discretisation of Delta_m on a RadialGrid.

Each unknown node i owns the dual cell between the neighbouring midpoints.
Integrating a (Delta_m u + g) over that cell gives

    (K u)_i + W_i g_i = 0,   W_i = a(s_i) dV_i,

where K is symmetric tridiagonal with off-diagonal flux coefficients
a(s_{i+1/2}) / h_i and diagonal -(neighbouring fluxes) - m^2 dV_i / a(s_i).
Tip nodes carry u = 0 (the s^m closure evaluated at s = 0). A Robin end adds
-a(s_star) alpha1 / alpha2 to its own diagonal and owns a half cell; a
Dirichlet end is fixed at zero.
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from spiralwave.apps.eigensolver.spectrum import nodal_count
from spiralwave.apps.geometry.boundary import BoundaryCondition, default_boundary
from spiralwave.apps.geometry.grid import RadialGrid
from spiralwave.apps.geometry.surface import SurfaceOfRevolution
from spiralwave.core.exceptions import ConvergenceError, NodalCountError

logger = logging.getLogger(__name__)

RAYLEIGH_MAX_ITER = 12
# Relative shift offset used when the Rayleigh quotient lands on an eigenvalue
SHIFT_NUDGE = 1e-10


@dataclass(frozen=True, eq=False)
class RadialOperator:
    surface: SurfaceOfRevolution
    grid: RadialGrid
    m: int
    bc: BoundaryCondition
    index: np.ndarray
    weights: np.ndarray
    flux: np.ndarray
    diagonal: np.ndarray
    stiffness: sp.csc_matrix
    _cache: Dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(
        cls,
        S: SurfaceOfRevolution,
        grid: RadialGrid,
        m: int,
        bc: BoundaryCondition,
    ) -> "RadialOperator":
        if m < 1:
            raise ValueError("Winding number m must be at least 1")
        bc.check_surface(S)
        nodes = grid.nodes
        N = nodes.size
        h = np.diff(nodes)
        a_mid = S.a(0.5 * (nodes[1:] + nodes[:-1]))
        flux = a_mid / h

        robin_end = S.has_boundary and not bc.is_dirichlet
        last = N - 1 if robin_end else N - 2
        index = np.arange(1, last + 1)

        dual = np.zeros(N)
        dual[1:-1] = 0.5 * (h[:-1] + h[1:])
        dual[-1] = 0.5 * h[-1]
        a_nodes = S.a(nodes[index])
        dV = dual[index]
        weights = a_nodes * dV

        diagonal = -m * m * dV / a_nodes
        diagonal -= flux[index - 1]
        inner = index < N - 1
        diagonal[inner] -= flux[index[inner]]
        if robin_end:
            diagonal[-1] -= float(S.a(S.s_star)) * bc.alpha1 / bc.alpha2
        off = flux[index[:-1]]
        stiffness = sp.diags([off, diagonal, off], [-1, 0, 1], format="csc")

        logger.debug(f"Radial operator on {S.name}: m={m}, {index.size} unknowns, bc={bc.label()}")
        return cls(
            surface=S,
            grid=grid,
            m=m,
            bc=bc,
            index=index,
            weights=weights,
            flux=flux,
            diagonal=diagonal,
            stiffness=stiffness,
        )

    @property
    def size(self) -> int:
        return int(self.index.size)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes[self.index]

    def restrict(self, profile: np.ndarray) -> np.ndarray:
        return np.asarray(profile)[self.index]

    def embed(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values)
        full = np.zeros(self.grid.size, dtype=values.dtype)
        full[self.index] = values
        return full

    def apply(self, values: np.ndarray) -> np.ndarray:
        """K u on the unknowns."""
        return self.stiffness @ values

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        """Discrete Delta_m u = W^{-1} K u on the unknowns."""
        return self.apply(values) / self.weights

    def inner(self, first: np.ndarray, second: np.ndarray) -> float:
        """Weighted inner product sum W u v (real part for complex input)."""
        return float(np.real(np.sum(self.weights * np.conj(first) * second)))

    def norm(self, profile: np.ndarray) -> float:
        """Weighted L2 norm of a profile on the unknowns."""
        return float(np.sqrt(np.sum(self.weights * np.abs(profile) ** 2)))

    def weighted_norm_of_equation(self, equation: np.ndarray) -> float:
        """Norm of W^{-1} G measured in the weighted L2 norm."""
        return float(np.sqrt(np.sum(np.abs(equation) ** 2 / self.weights)))

    def discrete_eigenpair(self, n: int, guess_lambda: float, guess: np.ndarray) -> Tuple[float, np.ndarray]:
        """
        Eigenpair of -K v = mu W v nearest the guess, by Rayleigh quotient iteration.

        Args:
            n: expected number of sign changes of v
            guess_lambda: starting shift (the shooting eigenvalue)
            guess: starting vector on the unknowns

        Returns:
            (mu, v) with sum W v^2 = 1 and v positive near s = 0

        Raises:
            NodalCountError: if the converged vector has the wrong nodal count
        """
        key = ("eigen", n)
        if key in self._cache:
            return self._cache[key]

        W = sp.diags(self.weights, format="csc")
        v = np.asarray(guess, dtype=float)
        v = v / np.sqrt(np.sum(self.weights * v * v))
        mu = guess_lambda
        for _ in range(RAYLEIGH_MAX_ITER):
            x = self._shifted_solve(W, mu, self.weights * v)
            if not np.all(np.isfinite(x)):
                break
            v = x / np.sqrt(np.sum(self.weights * x * x))
            updated = float(-v @ (self.stiffness @ v))
            converged = abs(updated - mu) <= 1e-13 * max(1.0, abs(mu))
            mu = updated
            if converged:
                break

        significant = np.nonzero(np.abs(v) > 1e-8 * np.max(np.abs(v)))[0]
        if v[significant[0]] < 0.0:
            v = -v
        if nodal_count(v) != n:
            raise NodalCountError(
                f"Discrete eigenvector has {nodal_count(v)} sign changes, expected {n}",
                details={"n": n, "mu": mu},
            )
        self._cache[key] = (mu, v)
        return mu, v

    def _shifted_solve(self, W: sp.spmatrix, mu: float, rhs: np.ndarray) -> np.ndarray:
        """Solve (-K - mu W) x = rhs, stepping the shift off an exact eigenvalue."""
        for shift in (mu, mu + SHIFT_NUDGE * max(1.0, abs(mu))):
            with warnings.catch_warnings():
                warnings.simplefilter("error", MatrixRankWarning)
                try:
                    return spsolve((-self.stiffness - shift * W).tocsc(), rhs)
                except (MatrixRankWarning, RuntimeError) as exc:
                    logger.debug(f"Singular shifted solve at mu={shift:.17g}: {exc}")
        raise ConvergenceError(f"Shifted solve stayed singular near mu={mu}", details={"mu": mu})


def build_operator(
    S: SurfaceOfRevolution,
    grid: RadialGrid,
    m: int,
    bc: Optional[BoundaryCondition] = None,
) -> RadialOperator:
    return RadialOperator.build(S, grid, m, bc or default_boundary(S))
