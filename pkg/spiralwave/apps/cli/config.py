import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError, field_validator, model_validator

from spiralwave.apps.geometry.boundary import BoundaryCondition
from spiralwave.apps.geometry.surface import make_disk, make_sphere
from spiralwave.core.exceptions import BoundaryConditionError, ConfigError
from spiralwave.utils.serialization import render_json, sha256

logger = logging.getLogger(__name__)


def _float_list(value: Any) -> Any:
    if isinstance(value, str):
        try:
            return [float(part) for part in value.split(",") if part.strip()]
        except ValueError as exc:
            raise ValueError(f"expected comma separated numbers, got {value!r}") from exc
    if isinstance(value, (int, float)):
        return [float(value)]
    return value


class ParameterRange(BaseModel):
    """Evenly spaced samples lo..hi; written as `lo,hi,count` on the command line."""

    model_config = ConfigDict(extra="forbid")

    lo: float
    hi: float
    count: int = Field(ge=1)

    @model_validator(mode="before")
    @classmethod
    def from_triple(cls, value: Any) -> Any:
        value = _float_list(value)
        if isinstance(value, list):
            if len(value) != 3 or value[2] != int(value[2]):
                raise ValueError("a range is lo,hi,count with an integer count")
            return {"lo": value[0], "hi": value[1], "count": int(value[2])}
        return value

    @model_validator(mode="after")
    def ordered(self) -> "ParameterRange":
        if self.hi < self.lo:
            raise ValueError("range upper end lies below its lower end")
        return self

    def values(self) -> List[float]:
        if self.count == 1:
            return [self.lo]
        step = (self.hi - self.lo) / (self.count - 1)
        return [self.lo + k * step for k in range(self.count - 1)] + [self.hi]


class PolynomialTables(BaseModel):
    """
    Coefficients of polynomial kinetics, carried inside the run config.

    Row k of each table holds [c0, c1, ..., cd] for the y^k term, whose
    coefficient is c0 + c1 b1 + ... + cd bd.
    """

    model_config = ConfigDict(extra="forbid")

    f_R: List[List[float]] = Field(min_length=1)
    f_I: List[List[float]] = Field(min_length=1)
    b: Optional[List[float]] = None

    @model_validator(mode="after")
    def rectangular(self) -> "PolynomialTables":
        widths = {len(row) for row in self.f_R + self.f_I}
        if len(widths) != 1 or 0 in widths:
            raise ValueError("every f_R and f_I row needs the same nonzero number of coefficients")
        if self.b is not None and len(self.b) != widths.pop() - 1:
            raise ValueError("b must hold one value per parameter column")
        return self


class RunConfig(BaseModel):
    """
    Complete description of one command line run.

    Unset numerical fields fall back to the defaults in core.settings.
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    command: str
    surface: Literal["disk", "sphere", "custom"] = "sphere"
    profile: Optional[str] = None
    bc: Optional[str] = None
    kinetics: str = "cubic:0"
    polynomial: Optional[PolynomialTables] = None
    m: int = Field(1, ge=1)
    n: int = Field(0, ge=0)
    nmax: int = Field(3, ge=0)
    lam: Optional[PositiveFloat] = Field(None, alias="lambda")
    lambda_max: Optional[PositiveFloat] = None
    step: Optional[PositiveFloat] = None
    sigma_sign: Literal[1, -1] = 1
    eta: float = 0.0
    b: Optional[List[float]] = None
    eta_range: Optional[ParameterRange] = None
    b_range: Optional[ParameterRange] = None
    beta_range: Optional[ParameterRange] = None
    t: float = 0.0
    points_per_arm: int = Field(200, ge=2)
    omega_tol: Optional[PositiveFloat] = None
    p_tol: Optional[PositiveFloat] = None
    newton_tol: Optional[PositiveFloat] = None
    threads: Optional[int] = Field(None, ge=1)
    out: str = "out"
    metrics_file: Optional[str] = None

    @field_validator("b", mode="before")
    @classmethod
    def parse_b(cls, value: Any) -> Any:
        return _float_list(value)

    @field_validator("bc")
    @classmethod
    def parse_bc(cls, value: Optional[str]) -> Optional[str]:
        if value is not None:
            try:
                BoundaryCondition.parse(value)
            except BoundaryConditionError as exc:
                raise ValueError(exc.message) from exc
        return value

    @model_validator(mode="after")
    def custom_needs_profile(self) -> "RunConfig":
        if self.surface == "custom" and not self.profile:
            raise ValueError("surface 'custom' needs --profile")
        return self

    @model_validator(mode="after")
    def boundary_fits_surface(self) -> "RunConfig":
        bc = self.boundary()
        if bc is None or self.surface == "custom":
            return self
        try:
            bc.check_surface(make_disk() if self.surface == "disk" else make_sphere())
        except BoundaryConditionError as exc:
            raise ValueError(exc.message) from exc
        return self

    @model_validator(mode="after")
    def polynomial_matches_kinetics(self) -> "RunConfig":
        is_poly = self.kinetics.strip().lower() == "poly"
        if is_poly and self.polynomial is None:
            raise ValueError("poly kinetics need coefficient tables: --kinetics poly:FILE")
        if self.polynomial is not None and not is_poly:
            raise ValueError("polynomial tables are only used with poly kinetics")
        return self

    def boundary(self) -> Optional[BoundaryCondition]:
        return BoundaryCondition.parse(self.bc) if self.bc else None

    def require(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            flags = ", ".join("--" + ("lambda" if name == "lam" else name.replace("_", "-")) for name in missing)
            raise ConfigError(f"{self.command} needs {flags}", details={"missing": missing})

    def canonical(self) -> Dict[str, Any]:
        """
        Config as written to the manifest.

        Output locations are left out, so the hash identifies the computation
        and passing the dump back with --config reproduces it.
        """
        return self.model_dump(mode="json", by_alias=True, exclude={"out", "metrics_file"})

    def digest(self) -> str:
        return sha256(render_json(self.canonical()))


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"Cannot read config file {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    return data


def build_config(command: str, file_values: Dict[str, Any], flag_values: Dict[str, Any]) -> RunConfig:
    """
    Merge config file values with command line flags; flags win.

    Raises:
        ConfigError: on unknown keys or invalid values
    """
    merged = {("lam" if key == "lambda" else key): value for key, value in file_values.items() if key != "command"}
    flags = {key: value for key, value in flag_values.items() if value is not None}
    if "kinetics" in flags:
        # tables from a config file belong to the kinetics they were written with
        merged.pop("polynomial", None)
    merged.update(flags)
    merged["command"] = command
    _embed_polynomial(merged)
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as exc:
        problems = [f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}" for error in exc.errors()]
        raise ConfigError(f"Invalid configuration: {'; '.join(problems)}", details={"errors": problems}) from exc


def _embed_polynomial(merged: Dict[str, Any]) -> None:
    """Replace `poly:FILE` by `poly` plus the file's coefficient tables."""
    kinetics = merged.get("kinetics")
    if not isinstance(kinetics, str):
        return
    name, _, path = kinetics.partition(":")
    if name.strip().lower() != "poly":
        return
    if path:
        merged["polynomial"] = read_config_file(path)
        logger.debug(f"Loaded polynomial kinetics from {path}")
    merged["kinetics"] = "poly"
