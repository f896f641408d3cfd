import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from spiralwave.core.exceptions import KineticsError

logger = logging.getLogger(__name__)

Handle = Callable[[np.ndarray, np.ndarray], np.ndarray]

REQUIRED_HANDLES = ("f_R", "f_I", "dy_f_R", "dy_f_I", "db_f_I")


def as_params(b, param_dim: int) -> np.ndarray:
    """Normalize a scalar or sequence parameter into a vector of length param_dim."""
    vector = np.atleast_1d(np.asarray(b if b is not None else 0.0, dtype=float)).ravel()
    if param_dim == 0:
        return np.zeros(0)
    if vector.size == 1 and param_dim > 1:
        vector = np.full(param_dim, float(vector[0]))
    if vector.size != param_dim:
        raise KineticsError(
            f"Expected {param_dim} kinetic parameters, got {vector.size}",
            details={"param_dim": param_dim, "received": vector.tolist()},
        )
    return vector


@dataclass(frozen=True)
class KineticsSpec:
    """
    Reaction term f(y, b) = f_R(y, b) + i f_I(y, b) with y = |u|^2.

    Handles take (y, b) with y an array and b a parameter vector of length
    param_dim. db_f_I returns an array whose leading axis runs over the
    parameter components. `b` holds the nominal parameter used when a caller
    does not pass one.
    """

    name: str
    f_R: Handle
    f_I: Handle
    dy_f_R: Handle
    dy_f_I: Handle
    db_f_I: Handle
    param_dim: int
    C: float = float("nan")
    b: Sequence[float] = field(default_factory=tuple)
    definition: Dict = field(default_factory=dict)

    def params(self, b=None) -> np.ndarray:
        return as_params(self.b if b is None else b, self.param_dim)

    def real(self, y, b=None) -> np.ndarray:
        return np.asarray(self.f_R(np.asarray(y, dtype=float), self.params(b)), dtype=float)

    def imag(self, y, b=None) -> np.ndarray:
        return np.asarray(self.f_I(np.asarray(y, dtype=float), self.params(b)), dtype=float)

    def dy_real(self, y, b=None) -> np.ndarray:
        return np.asarray(self.dy_f_R(np.asarray(y, dtype=float), self.params(b)), dtype=float)

    def dy_imag(self, y, b=None) -> np.ndarray:
        return np.asarray(self.dy_f_I(np.asarray(y, dtype=float), self.params(b)), dtype=float)

    def db_imag(self, y, b=None) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        value = np.asarray(self.db_f_I(y, self.params(b)), dtype=float)
        return value.reshape((self.param_dim,) + y.shape)

    def value(self, y, b=None) -> np.ndarray:
        return self.real(y, b) + 1j * self.imag(y, b)

    @property
    def sup_bound(self) -> float:
        """C0 bound sqrt(C) on solution amplitudes."""
        return float(np.sqrt(self.C))


def make_cubic(beta: float = 0.0) -> KineticsSpec:
    """Cubic Ginzburg-Landau kinetics f(y, beta) = 1 - y - i beta y."""
    return KineticsSpec(
        name="cubic",
        f_R=lambda y, b: 1.0 - y,
        f_I=lambda y, b: -b[0] * y,
        dy_f_R=lambda y, b: -np.ones_like(y),
        dy_f_I=lambda y, b: -b[0] * np.ones_like(y),
        db_f_I=lambda y, b: np.expand_dims(-y, 0),
        param_dim=1,
        C=1.0,
        b=(float(beta),),
        definition={"kind": "cubic", "beta": float(beta)},
    )


def make_cubic_omega(beta: float = 0.0) -> KineticsSpec:
    """Cubic real part with f_I(y, beta) = beta y (1 - y)."""
    return KineticsSpec(
        name="cubic-omega",
        f_R=lambda y, b: 1.0 - y,
        f_I=lambda y, b: b[0] * y * (1.0 - y),
        dy_f_R=lambda y, b: -np.ones_like(y),
        dy_f_I=lambda y, b: b[0] * (1.0 - 2.0 * y),
        db_f_I=lambda y, b: np.expand_dims(y * (1.0 - y), 0),
        param_dim=1,
        C=1.0,
        b=(float(beta),),
        definition={"kind": "cubic-omega", "beta": float(beta)},
    )


def make_custom_kinetics(
    handles: Dict[str, Handle],
    param_dim: int,
    name: str = "custom",
    b: Optional[Sequence[float]] = None,
    definition: Optional[Dict] = None,
) -> KineticsSpec:
    """
    Wrap user handles, locate C and verify the standing hypotheses.

    Args:
        handles: mapping with keys f_R, f_I, dy_f_R, dy_f_I, db_f_I
        param_dim: number of kinetic parameters d
        name: label for reports
        b: nominal parameter vector (defaults to zeros)

    Returns:
        KineticsSpec with C set

    Raises:
        KineticsError: if a handle is missing, f_R(., 0) has no sign change,
            or a standing assumption fails
    """
    from .assumptions import check_assumptions, locate_zero

    missing = [key for key in REQUIRED_HANDLES if key not in handles]
    if missing:
        raise KineticsError(f"Missing kinetics handles: {missing}", details={"missing": missing})
    if param_dim < 0:
        raise KineticsError("param_dim must be nonnegative")

    nominal = tuple(as_params(b if b is not None else np.zeros(param_dim), param_dim).tolist())
    draft = KineticsSpec(
        name=name,
        param_dim=param_dim,
        b=nominal,
        definition=definition or {"kind": name},
        **{key: handles[key] for key in REQUIRED_HANDLES},
    )
    zero = np.zeros(param_dim)
    C = locate_zero(lambda y: float(draft.f_R(np.asarray(y, dtype=float), zero)))
    if C is None:
        raise KineticsError(
            f"f_R(., 0) of {name} has no sign change on the search interval",
            details={"assumption": "single_zero"},
        )
    spec = KineticsSpec(
        name=name,
        param_dim=param_dim,
        C=C,
        b=nominal,
        definition=draft.definition,
        **{key: handles[key] for key in REQUIRED_HANDLES},
    )
    report = check_assumptions(spec)
    if not report.passed:
        logger.warning(f"Rejected kinetics {name}: {report.failed_names()}")
        raise KineticsError(
            f"Kinetics {name} violates {', '.join(report.failed_names())}",
            details=report.as_dict(),
        )
    logger.info(f"Accepted kinetics {name} with C={C:.12g}")
    return spec


def make_polynomial_kinetics(
    f_R_coefficients: Sequence[Sequence[float]],
    f_I_coefficients: Sequence[Sequence[float]],
    b: Optional[Sequence[float]] = None,
    name: str = "poly",
) -> KineticsSpec:
    """
    Polynomial kinetics with parameter-linear coefficients.

    Row k of each table holds [c0, c1, ..., cd] and contributes
    (c0 + c1 b1 + ... + cd bd) y^k.
    """
    table_R = np.atleast_2d(np.asarray(f_R_coefficients, dtype=float))
    table_I = np.atleast_2d(np.asarray(f_I_coefficients, dtype=float))
    if table_R.shape[1] != table_I.shape[1]:
        raise KineticsError(
            "f_R and f_I coefficient rows must have equal length",
            details={"f_R": list(table_R.shape), "f_I": list(table_I.shape)},
        )
    param_dim = table_R.shape[1] - 1

    def coefficients(table, b):
        return table[:, 0] + table[:, 1:] @ b

    def f_R(y, b):
        return P.polyval(y, coefficients(table_R, b))

    def f_I(y, b):
        return P.polyval(y, coefficients(table_I, b))

    def dy_f_R(y, b):
        return P.polyval(y, P.polyder(coefficients(table_R, b))) * np.ones_like(y)

    def dy_f_I(y, b):
        return P.polyval(y, P.polyder(coefficients(table_I, b))) * np.ones_like(y)

    def db_f_I(y, b):
        if param_dim == 0:
            return np.zeros((0,) + np.shape(y))
        return np.stack([P.polyval(y, table_I[:, j + 1]) * np.ones_like(y) for j in range(param_dim)])

    return make_custom_kinetics(
        {"f_R": f_R, "f_I": f_I, "dy_f_R": dy_f_R, "dy_f_I": dy_f_I, "db_f_I": db_f_I},
        param_dim=param_dim,
        name=name,
        b=b,
        definition={"kind": "poly", "f_R": table_R.tolist(), "f_I": table_I.tolist()},
    )


def parse_kinetics(text: str, polynomial: Optional[Dict] = None) -> KineticsSpec:
    """
    Build kinetics from a command-line selector.

    `cubic:0.05`, `cubic-omega:0.05` or `poly` / `poly:0.05` (with coefficient
    tables supplied through `polynomial`).
    """
    name, _, raw = text.strip().partition(":")
    name = name.lower()
    try:
        beta = float(raw) if raw else 0.0
    except ValueError as exc:
        raise KineticsError(f"Cannot parse kinetic parameter in {text!r}") from exc
    if name == "cubic":
        return make_cubic(beta)
    if name == "cubic-omega":
        return make_cubic_omega(beta)
    if name == "poly":
        if not polynomial:
            raise KineticsError("Polynomial kinetics require coefficient tables f_R and f_I")
        return make_polynomial_kinetics(
            polynomial["f_R"], polynomial["f_I"], b=polynomial.get("b", beta if raw else None)
        )
    raise KineticsError(
        f"Unknown kinetics {name!r}",
        details={"expected": ["cubic", "cubic-omega", "poly"]},
    )
