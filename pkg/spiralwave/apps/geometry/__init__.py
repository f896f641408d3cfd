from .boundary import BoundaryCondition, default_boundary
from .grid import RadialGrid, make_grid
from .surface import (
    SurfaceOfRevolution,
    ValidationReport,
    make_custom,
    make_disk,
    make_sphere,
    read_profile_csv,
    validate_surface,
)

__all__ = [
    "BoundaryCondition",
    "RadialGrid",
    "SurfaceOfRevolution",
    "ValidationReport",
    "default_boundary",
    "make_custom",
    "make_disk",
    "make_grid",
    "make_sphere",
    "read_profile_csv",
    "validate_surface",
]
