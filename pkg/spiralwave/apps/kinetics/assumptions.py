import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from spiralwave.core import settings

from .reaction import KineticsSpec

logger = logging.getLogger(__name__)

# Box sampled for parameter-dependent checks
DEFAULT_PARAMETER_BOX = (-1.0, 1.0)
# Fallback sampling range when f_R(., 0) has no zero
DEFAULT_Y_MAX = 4.0


def locate_zero(func: Callable[[float], float], y_max: Optional[float] = None) -> Optional[float]:
    """
    Locate the first sign change of func on (0, y_max] and bisect it.

    The search interval doubles from 1 up to settings.C_SEARCH_MAX.

    Returns:
        The zero to settings.C_BISECTION_XTOL, or None if no sign change exists
    """
    if func(0.0) <= 0.0:
        return None
    limit = y_max or settings.C_SEARCH_MAX
    upper = 1.0
    lower_bound = 0.0
    while upper <= limit * (1.0 + 1e-12):
        grid = np.linspace(lower_bound, upper, settings.ASSUMPTION_SAMPLES + 1)
        values = np.array([func(y) for y in grid])
        hits = np.nonzero(values <= 0.0)[0]
        if hits.size:
            k = int(hits[0])
            if values[k] == 0.0:
                return float(grid[k])
            return float(bisect(func, grid[k - 1], grid[k], xtol=settings.C_BISECTION_XTOL, rtol=4 * np.finfo(float).eps))
        lower_bound = upper
        upper *= 2.0
    return None


@dataclass
class AssumptionResult:
    name: str
    passed: Optional[bool]
    margin: float = float("nan")
    witness: Optional[float] = None
    detail: str = ""


@dataclass
class AssumptionReport:
    """Pass/fail for the standing hypotheses on f and the auxiliary ones on its parameters."""

    kinetics: str
    C: Optional[float]
    results: List[AssumptionResult] = field(default_factory=list)

    # Standing assumptions gate acceptance; the parameter checks are only reported
    STANDING = ("single_zero", "decreasing", "fI_zero")

    def get(self, name: str) -> AssumptionResult:
        for result in self.results:
            if result.name == name:
                return result
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(self.get(name).passed for name in self.STANDING)

    def failed_names(self) -> List[str]:
        return [r.name for r in self.results if r.passed is False]

    def as_dict(self) -> Dict:
        return {
            "kinetics": self.kinetics,
            "C": self.C,
            "passed": self.passed,
            "results": [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "margin": r.margin,
                    "witness": r.witness,
                    "detail": r.detail,
                }
                for r in self.results
            ],
        }


def _first_violation(y: np.ndarray, bad: np.ndarray) -> Optional[float]:
    index = np.nonzero(bad)[0]
    return float(y[index[0]]) if index.size else None


def check_assumptions(
    K: KineticsSpec,
    samples: Optional[int] = None,
    parameter_box: Tuple[float, float] = DEFAULT_PARAMETER_BOX,
) -> AssumptionReport:
    """
    Sampled check of every kinetic hypothesis.

    y is sampled on (0, 4C] (midpoint rule, so the endpoints are excluded) and
    the parameters on a uniform grid of parameter_box per component.
    """
    samples = samples or settings.ASSUMPTION_SAMPLES
    zero = np.zeros(K.param_dim)

    def f_R0(y):
        return float(K.f_R(np.asarray(y, dtype=float), zero))

    C = locate_zero(f_R0)
    report = AssumptionReport(kinetics=K.name, C=C)

    f00 = f_R0(0.0)
    y_top = settings.ASSUMPTION_Y_FACTOR * (C if C else DEFAULT_Y_MAX / settings.ASSUMPTION_Y_FACTOR)
    y = y_top * (np.arange(samples) + 0.5) / samples

    f_R_vals = K.real(y, zero)
    if C is None:
        report.results.append(
            AssumptionResult("single_zero", False, detail=f"no zero crossing of f_R(., 0); f_R(0, 0) = {f00:.6g}")
        )
    else:
        above = y > C
        normalized = abs(f00 - 1.0) <= 1e-12
        negative_beyond = bool(np.all(f_R_vals[above] < 0.0))
        margin = float(-np.max(f_R_vals[above])) if np.any(above) else float("inf")
        detail = []
        if not normalized:
            detail.append(f"f_R(0, 0) = {f00:.12g} != 1")
        if not negative_beyond:
            detail.append("f_R(y, 0) >= 0 for some y > C")
        report.results.append(
            AssumptionResult(
                "single_zero",
                normalized and negative_beyond,
                margin=margin,
                witness=_first_violation(y[above], f_R_vals[above] >= 0.0),
                detail="; ".join(detail) or f"C = {C:.12g}",
            )
        )

    d0 = float(K.dy_real(0.0, zero))
    inside = y < (C if C else y_top)
    dy_vals = K.dy_real(y[inside], zero)
    decreasing = d0 < 0.0 and bool(np.all(dy_vals <= 0.0))
    report.results.append(
        AssumptionResult(
            "decreasing",
            decreasing,
            margin=float(-np.max(np.append(dy_vals, d0))),
            witness=_first_violation(y[inside], dy_vals > 0.0),
            detail=f"dy f_R(0, 0) = {d0:.6g}",
        )
    )

    y_all = np.concatenate([[0.0], y])
    f_I_vals = K.imag(y_all, zero)
    scale = max(1.0, float(np.max(np.abs(f_R_vals))))
    fi_zero = bool(np.all(np.abs(f_I_vals) <= 1e-14 * scale))
    report.results.append(
        AssumptionResult(
            "fI_zero",
            fi_zero,
            margin=float(np.max(np.abs(f_I_vals))),
            witness=_first_violation(y_all, np.abs(f_I_vals) > 1e-14 * scale),
            detail="f_I(y, 0) = 0",
        )
    )

    if K.param_dim == 1:
        db = K.db_imag(y[inside], zero)[0]
        nonzero = bool(db.size) and bool(np.all(np.abs(db) > 1e-14))
        report.results.append(
            AssumptionResult(
                "param_sensitive",
                nonzero,
                margin=float(np.min(np.abs(db))) if db.size else 0.0,
                witness=_first_violation(y[inside], np.abs(db) <= 1e-14),
                detail="d_beta f_I(y, 0) != 0 on (0, C)",
            )
        )
    else:
        report.results.append(AssumptionResult("param_sensitive", None, detail="defined for a single parameter only"))

    if K.param_dim >= 1:
        betas = np.linspace(parameter_box[0], parameter_box[1], 33)
        tip_values = np.array([float(K.imag(0.0, np.full(K.param_dim, beta))) for beta in betas])
        tip_real = bool(np.all(np.abs(tip_values) <= 1e-14))
        report.results.append(
            AssumptionResult(
                "tip_real",
                tip_real,
                margin=float(np.max(np.abs(tip_values))),
                witness=_first_violation(betas, np.abs(tip_values) > 1e-14),
                detail="f_I(0, b) = 0",
            )
        )
    else:
        report.results.append(AssumptionResult("tip_real", None, detail="no kinetic parameters"))

    logger.debug(f"Assumption report for {K.name}: failed={report.failed_names()}")
    return report


def derivative_agreement(
    K: KineticsSpec,
    points: int = 100,
    seed: int = 0,
    parameter_box: Sequence[float] = (-0.5, 0.5),
    step: float = 1e-6,
) -> float:
    """
    Largest relative gap between the derivative handles and central differences.

    Sample points are drawn in (0, C) x parameter_box.
    """
    rng = np.random.default_rng(seed)
    top = K.C if np.isfinite(K.C) else 1.0
    worst = 0.0
    for _ in range(points):
        y = float(rng.uniform(0.05 * top, 0.95 * top))
        b = rng.uniform(parameter_box[0], parameter_box[1], size=K.param_dim)
        pairs = [
            (K.dy_real(y, b), (K.real(y + step, b) - K.real(y - step, b)) / (2 * step)),
            (K.dy_imag(y, b), (K.imag(y + step, b) - K.imag(y - step, b)) / (2 * step)),
        ]
        for j in range(K.param_dim):
            shift = np.zeros(K.param_dim)
            shift[j] = step
            pairs.append(
                (K.db_imag(y, b)[j], (K.imag(y, b + shift) - K.imag(y, b - shift)) / (2 * step))
            )
        for exact, approx in pairs:
            exact = float(exact)
            approx = float(approx)
            worst = max(worst, abs(exact - approx) / max(abs(exact), 1e-3))
    return worst
