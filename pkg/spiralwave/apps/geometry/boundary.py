from dataclasses import dataclass

import numpy as np

from spiralwave.core.exceptions import BoundaryConditionError

from .surface import SurfaceOfRevolution

NO_BOUNDARY = "none"
ROBIN = "robin"


@dataclass(frozen=True)
class BoundaryCondition:
    """
    Boundary data at s_star.

    Robin reads alpha1 u(s_star) + alpha2 u'(s_star) = 0 with alpha1, alpha2 >= 0,
    not both zero. Dirichlet and Neumann are the special cases alpha2 = 0 and
    alpha1 = 0.
    """

    kind: str
    alpha1: float = 0.0
    alpha2: float = 0.0

    def __post_init__(self):
        if self.kind == NO_BOUNDARY:
            return
        if self.kind != ROBIN:
            raise BoundaryConditionError(f"Unknown boundary kind {self.kind!r}")
        if not (np.isfinite(self.alpha1) and np.isfinite(self.alpha2)):
            raise BoundaryConditionError("Robin coefficients must be finite")
        if self.alpha1 < 0.0 or self.alpha2 < 0.0:
            raise BoundaryConditionError(
                "Robin coefficients must be nonnegative",
                details={"alpha1": self.alpha1, "alpha2": self.alpha2},
            )
        if self.alpha1 == 0.0 and self.alpha2 == 0.0:
            raise BoundaryConditionError("Robin coefficients must not both vanish")

    @classmethod
    def none(cls) -> "BoundaryCondition":
        return cls(NO_BOUNDARY)

    @classmethod
    def robin(cls, alpha1: float, alpha2: float) -> "BoundaryCondition":
        return cls(ROBIN, float(alpha1), float(alpha2))

    @classmethod
    def dirichlet(cls) -> "BoundaryCondition":
        return cls.robin(1.0, 0.0)

    @classmethod
    def neumann(cls) -> "BoundaryCondition":
        return cls.robin(0.0, 1.0)

    @classmethod
    def parse(cls, text: str) -> "BoundaryCondition":
        """Parse `none`, `dirichlet`, `neumann` or `robin:alpha1,alpha2`."""
        value = text.strip().lower()
        if value == NO_BOUNDARY:
            return cls.none()
        if value == "dirichlet":
            return cls.dirichlet()
        if value == "neumann":
            return cls.neumann()
        if value.startswith("robin:"):
            parts = value[len("robin:"):].split(",")
            if len(parts) == 2:
                try:
                    return cls.robin(float(parts[0]), float(parts[1]))
                except ValueError:
                    pass
        raise BoundaryConditionError(
            f"Cannot parse boundary condition {text!r}",
            details={"expected": "none | dirichlet | neumann | robin:alpha1,alpha2"},
        )

    @property
    def is_none(self) -> bool:
        return self.kind == NO_BOUNDARY

    @property
    def is_dirichlet(self) -> bool:
        return self.kind == ROBIN and self.alpha2 == 0.0

    def label(self) -> str:
        if self.is_none:
            return NO_BOUNDARY
        return f"robin:{self.alpha1:.17g},{self.alpha2:.17g}"

    def check_surface(self, S: SurfaceOfRevolution) -> "BoundaryCondition":
        """Raise unless this condition fits the surface's boundary flag."""
        if S.has_boundary and self.is_none:
            raise BoundaryConditionError(
                f"Surface {S.name} has a boundary; a Robin condition is required",
                details={"surface": S.name},
            )
        if not S.has_boundary and not self.is_none:
            raise BoundaryConditionError(
                f"Surface {S.name} is boundaryless; only 'none' is admissible",
                details={"surface": S.name},
            )
        return self


def default_boundary(S: SurfaceOfRevolution) -> BoundaryCondition:
    return BoundaryCondition.neumann() if S.has_boundary else BoundaryCondition.none()
