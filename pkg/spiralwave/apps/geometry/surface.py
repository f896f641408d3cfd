import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from spiralwave.core import settings
from spiralwave.core.exceptions import GeometryError

logger = logging.getLogger(__name__)

Profile = Callable[[np.ndarray], np.ndarray]

# a(s_*) below this counts as a tip
TIP_TOL = 1e-8


@dataclass(frozen=True)
class SurfaceOfRevolution:
    """
    Compact surface of revolution in arc-length parametrization.

    The surface is the image of (s, phi) -> (a(s) cos phi, a(s) sin phi, atilde(s))
    for s in [0, s_star]. All profile handles accept scalars or arrays.
    """

    name: str
    s_star: float
    profile_a: Profile
    profile_a_prime: Profile
    profile_atilde: Profile
    profile_atilde_prime: Profile
    has_boundary: bool
    reflection_symmetric: bool
    tolerance: float = 1e-8

    def a(self, s):
        return self.profile_a(np.asarray(s, dtype=float))

    def a_prime(self, s):
        return self.profile_a_prime(np.asarray(s, dtype=float))

    def atilde(self, s):
        return self.profile_atilde(np.asarray(s, dtype=float))

    def atilde_prime(self, s):
        return self.profile_atilde_prime(np.asarray(s, dtype=float))

    def embed(self, s, phi) -> np.ndarray:
        """Map (s, phi) samples to points in R^3, stacked on the last axis."""
        s = np.asarray(s, dtype=float)
        phi = np.asarray(phi, dtype=float)
        radius = self.a(s)
        return np.stack(
            [radius * np.cos(phi), radius * np.sin(phi), np.broadcast_to(self.atilde(s), np.broadcast(s, phi).shape)],
            axis=-1,
        )


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass
class ValidationReport:
    """Outcome of every geometric invariant check for one surface."""

    surface: str
    checks: List[CheckResult] = field(default_factory=list)
    reflection_symmetric: bool = False
    reflection_residual: float = float("nan")

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def check(self, name: str) -> CheckResult:
        for item in self.checks:
            if item.name == name:
                return item
        raise KeyError(name)

    def as_dict(self) -> Dict:
        return {
            "surface": self.surface,
            "passed": self.passed,
            "reflection_symmetric": self.reflection_symmetric,
            "reflection_residual": self.reflection_residual,
            "checks": [
                {"name": c.name, "passed": c.passed, "residual": c.residual, "detail": c.detail}
                for c in self.checks
            ],
        }


def _reflection_residual(a: Profile, s_star: float, samples: int) -> float:
    s = np.linspace(0.0, s_star, samples)
    return float(np.max(np.abs(a(s) - a(s_star - s))))


def make_disk() -> SurfaceOfRevolution:
    """Flat unit disk: a(s) = s, atilde(s) = 0 on [0, 1]."""
    return SurfaceOfRevolution(
        name="disk",
        s_star=1.0,
        profile_a=lambda s: np.asarray(s, dtype=float) * 1.0,
        profile_a_prime=lambda s: np.ones_like(np.asarray(s, dtype=float)),
        profile_atilde=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
        profile_atilde_prime=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
        has_boundary=True,
        reflection_symmetric=False,
    )


def make_sphere() -> SurfaceOfRevolution:
    """Unit 2-sphere: a(s) = sin s, atilde(s) = cos s on [0, pi]."""
    return SurfaceOfRevolution(
        name="sphere",
        s_star=float(np.pi),
        profile_a=np.sin,
        profile_a_prime=np.cos,
        profile_atilde=np.cos,
        profile_atilde_prime=lambda s: -np.sin(s),
        has_boundary=False,
        reflection_symmetric=True,
    )


def make_custom(samples, name: str = "custom") -> SurfaceOfRevolution:
    """
    Build a surface from sampled (s, a, atilde) rows.

    The profile is a monotone piecewise cubic (PCHIP) through the samples and
    stays between neighbouring sample values. Derivatives are the analytic
    derivatives of the interpolant. Knot slopes are second order accurate, so
    passing the arc-length check takes a sample spacing near 1e-3.

    Args:
        samples: array-like of shape (N, 3) with columns s, a, atilde
        name: label carried into reports

    Returns:
        A validated SurfaceOfRevolution

    Raises:
        GeometryError: if the samples or the interpolated profile violate
            the surface hypotheses
    """
    table = np.asarray(samples, dtype=float)
    if table.ndim != 2 or table.shape[1] != 3 or table.shape[0] < 4:
        raise GeometryError(
            "Profile samples must be an (N, 3) table with N >= 4",
            details={"shape": list(table.shape)},
        )
    s, a_values, atilde_values = table[:, 0], table[:, 1], table[:, 2]
    if not np.all(np.isfinite(table)):
        raise GeometryError("Profile samples contain non-finite values")
    if abs(s[0]) > TIP_TOL or np.any(np.diff(s) <= 0.0):
        raise GeometryError(
            "Profile samples must start at s = 0 and be strictly increasing in s",
            details={"s0": float(s[0])},
        )
    if abs(a_values[0]) > TIP_TOL:
        raise GeometryError("a(0) must vanish", details={"a0": float(a_values[0])})
    if np.any(a_values[1:-1] <= 0.0):
        raise GeometryError(
            "a(s) must be positive in the interior",
            details={"min_interior_a": float(np.min(a_values[1:-1]))},
        )

    s_star = float(s[-1])
    a_interp = PchipInterpolator(s, a_values)
    atilde_interp = PchipInterpolator(s, atilde_values)
    a_prime = a_interp.derivative()
    atilde_prime = atilde_interp.derivative()

    has_boundary = bool(a_values[-1] > TIP_TOL)
    samples_count = settings.SURFACE_SAMPLES
    surface = SurfaceOfRevolution(
        name=name,
        s_star=s_star,
        profile_a=a_interp,
        profile_a_prime=a_prime,
        profile_atilde=atilde_interp,
        profile_atilde_prime=atilde_prime,
        has_boundary=has_boundary,
        reflection_symmetric=_reflection_residual(a_interp, s_star, samples_count) <= settings.REFLECTION_TOL,
        tolerance=settings.ARC_LENGTH_TOL,
    )

    report = validate_surface(surface)
    if not report.passed:
        logger.warning(f"Rejected custom surface {name}: {[c.name for c in report.failures]}")
        raise GeometryError(
            f"Custom surface {name} failed validation",
            details=report.as_dict(),
        )
    logger.info(f"Accepted custom surface {name} with s_star={s_star:.6g}, has_boundary={has_boundary}")
    return surface


def read_profile_csv(path: Union[str, Path]) -> np.ndarray:
    """Read an `s,a,atilde` CSV file into an (N, 3) array."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            header = handle.readline().strip().replace(" ", "").lower()
            if header != "s,a,atilde":
                raise GeometryError(
                    f"Profile {path} must start with the header 's,a,atilde'",
                    details={"path": str(path), "header": header},
                )
            table = np.loadtxt(handle, delimiter=",", ndmin=2)
    except OSError as exc:
        raise GeometryError(f"Cannot read profile {path}: {exc}", details={"path": str(path)}) from exc
    except ValueError as exc:
        raise GeometryError(f"Malformed profile {path}: {exc}", details={"path": str(path)}) from exc
    return table


def validate_surface(S: SurfaceOfRevolution, samples: Optional[int] = None) -> ValidationReport:
    """
    Check every geometric hypothesis on a dense sample of [0, s_star].

    Failures are reported, never raised.
    """
    samples = samples or settings.SURFACE_SAMPLES
    s = np.linspace(0.0, S.s_star, samples)
    a = S.a(s)
    a_prime = S.a_prime(s)
    atilde_prime = S.atilde_prime(s)
    tol = S.tolerance

    report = ValidationReport(surface=S.name)

    report.checks.append(CheckResult("tip_zero", abs(float(a[0])) <= TIP_TOL, abs(float(a[0]))))

    interior_min = float(np.min(a[1:-1]))
    report.checks.append(
        CheckResult("positivity", interior_min > 0.0, interior_min, "minimum of a over the interior")
    )

    arc = float(np.max(np.abs(a_prime**2 + atilde_prime**2 - 1.0)))
    report.checks.append(CheckResult("arc_length", arc <= tol, arc, f"tolerance {tol:g}"))

    slope0 = abs(float(a_prime[0]) - 1.0)
    report.checks.append(CheckResult("tip_slope", slope0 <= tol, slope0, "a'(0) = 1"))

    end_value = float(a[-1])
    if S.has_boundary:
        report.checks.append(
            CheckResult("boundary_flag", end_value > TIP_TOL, end_value, "a(s_star) > 0")
        )
    else:
        report.checks.append(
            CheckResult("far_tip_zero", abs(end_value) <= TIP_TOL, abs(end_value), "a(s_star) = 0")
        )
        slope_end = abs(float(a_prime[-1]) + 1.0)
        report.checks.append(CheckResult("far_tip_slope", slope_end <= tol, slope_end, "a'(s_star) = -1"))

    report.reflection_residual = _reflection_residual(S.profile_a, S.s_star, samples)
    report.reflection_symmetric = report.reflection_residual <= settings.REFLECTION_TOL
    return report
