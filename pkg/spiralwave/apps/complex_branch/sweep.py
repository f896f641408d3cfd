import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from spiralwave.apps.kinetics.reaction import KineticsSpec
from spiralwave.apps.real_branch.branch import BranchPoint
from spiralwave.core import settings
from spiralwave.core.exceptions import SolverFailure
from spiralwave.core.instrumentation import track_latency
from spiralwave.core.metrics import SOLVER_LATENCY

from .solver import ComplexBranchSolver, SolutionPoint

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]


@dataclass
class SolutionSheet:
    """Solutions over an (eta, b) grid, keyed by cell index (i_eta, i_b)."""

    base: BranchPoint
    eta_values: np.ndarray
    b_values: np.ndarray
    points: Dict[Cell, SolutionPoint] = field(default_factory=dict)
    failures: List[Dict] = field(default_factory=list)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.eta_values), len(self.b_values)

    def get(self, eta: float, b) -> Optional[SolutionPoint]:
        """Point stored at the cell whose parameters match (eta, b)."""
        target = np.atleast_1d(np.asarray(b, dtype=float))
        for (i, j), point in self.points.items():
            if np.isclose(self.eta_values[i], eta) and np.allclose(self.b_values[j], target):
                return point
        return None

    def omega_grid(self) -> np.ndarray:
        """Omega per cell with NaN where the solve failed."""
        grid = np.full(self.shape, np.nan)
        for (i, j), point in self.points.items():
            grid[i, j] = point.omega
        return grid

    def max_neighbor_jump(self) -> float:
        grid = self.omega_grid()
        jumps = [np.abs(np.diff(grid, axis=0)), np.abs(np.diff(grid, axis=1))]
        values = np.concatenate([jump[np.isfinite(jump)] for jump in jumps])
        return float(values.max()) if values.size else 0.0


def _origin(eta_values: np.ndarray, b_values: np.ndarray) -> Cell:
    return int(np.argmin(np.abs(eta_values))), int(np.argmin(np.linalg.norm(b_values, axis=1)))


def _wavefronts(shape: Tuple[int, int], origin: Cell) -> List[List[Cell]]:
    fronts: Dict[int, List[Cell]] = {}
    for i in range(shape[0]):
        for j in range(shape[1]):
            fronts.setdefault(abs(i - origin[0]) + abs(j - origin[1]), []).append((i, j))
    return [fronts[k] for k in sorted(fronts)]


def _parent(cell: Cell, origin: Cell, sheet: SolutionSheet) -> Optional[SolutionPoint]:
    """Converged neighbour one step closer to the origin, eta direction first."""
    i, j = cell
    candidates = []
    if i != origin[0]:
        candidates.append((i - int(np.sign(i - origin[0])), j))
    if j != origin[1]:
        candidates.append((i, j - int(np.sign(j - origin[1]))))
    for candidate in candidates:
        if candidate in sheet.points:
            return sheet.points[candidate]
    return None


def sweep_parameters(
    base: BranchPoint,
    eta_grid: Sequence[float],
    b_grid: Sequence,
    K: Optional[KineticsSpec] = None,
    threads: Optional[int] = None,
) -> SolutionSheet:
    """
    Warm-started solves over eta_grid x b_grid spreading outward from (0, 0).

    Cells are processed in Manhattan wavefronts around the cell nearest the
    origin; each one starts from a converged neighbour of the previous front.
    Cells within one front are independent and run in a thread pool.
    Failed cells are recorded and block only the cells that would start from them.

    Args:
        base: real branch point supplying lambda, the grid and the gauge
        eta_grid: eta values
        b_grid: kinetic parameter values (scalars for d = 1 or vectors)
        K: kinetics; the base point's kinetics when omitted
        threads: pool size; settings.THREADS when omitted
    """
    solver = ComplexBranchSolver(base, K)
    param_dim = solver.kinetics.param_dim
    eta_values = np.asarray(eta_grid, dtype=float).ravel()
    b_values = np.array([solver.kinetics.params(b) for b in b_grid], dtype=float).reshape(len(b_grid), param_dim)
    sheet = SolutionSheet(base=base, eta_values=eta_values, b_values=b_values)
    if eta_values.size == 0 or b_values.shape[0] == 0:
        return sheet

    origin = _origin(eta_values, b_values)
    workers = max(1, threads or settings.THREADS)

    def run(cell: Cell):
        i, j = cell
        parent = None if cell == origin else _parent(cell, origin, sheet)
        if cell != origin and parent is None:
            return cell, None, {"reason": "no converged neighbour to start from"}
        guess = base.u if parent is None else parent.u
        omega_guess = 0.0 if parent is None else parent.omega
        try:
            point = solver.solve(eta_values[i], b_values[j], guess=guess, omega_guess=omega_guess)
        except SolverFailure as exc:
            return cell, None, {"reason": exc.message, **exc.details}
        return cell, point, None

    with track_latency(SOLVER_LATENCY, operation="sweep_parameters"):
        with ThreadPoolExecutor(max_workers=workers) as executor:
            for front in _wavefronts(sheet.shape, origin):
                # the sheet is written only after the whole front finished
                results = list(executor.map(run, front))
                for cell, point, failure in results:
                    if point is not None:
                        sheet.points[cell] = point
                    else:
                        i, j = cell
                        sheet.failures.append(
                            {"cell": [i, j], "eta": float(eta_values[i]), "b": b_values[j].tolist(), **failure}
                        )
                        logger.warning(f"Sweep cell eta={eta_values[i]:.6g} b={b_values[j].tolist()} failed: {failure['reason']}")

    logger.info(
        f"Sweep {sheet.shape[0]}x{sheet.shape[1]}: {len(sheet.points)} converged, {len(sheet.failures)} failed"
    )
    return sheet
