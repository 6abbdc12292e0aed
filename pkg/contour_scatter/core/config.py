"""
Experiment configuration: pydantic models for problems, grids and solvers,
plus the angle-expression parser used by both config files and CLI flags.
"""
import json
import logging
import math
import re
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union, get_args

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigurationError

logger = logging.getLogger(__name__)

ProblemName = Literal[
    "helmholtz2d-twodots",
    "helmholtz3d-twodots",
    "schrodinger2d-benchmark",
    "schrodinger3d-benchmark",
]
PROBLEM_NAMES = get_args(ProblemName)

_PI_EXPR = re.compile(
    r"^\s*(?P<sign>[+-]?)\s*(?:(?P<num>\d+(?:\.\d*)?)\s*\*?\s*)?pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$"
)
_DEG_EXPR = re.compile(r"^\s*(?P<value>[+-]?\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)\s*(?:deg|°)\s*$")


def parse_angle(value: Union[str, float, int, None]) -> Optional[float]:
    """
    Parse an angle in radians.

    Accepts plain numbers, ``"pi/6"``, ``"-pi/4"``, ``"2*pi/3"``, ``"0.3"``
    and degree strings such as ``"15deg"``.

    Args:
        value: Number, expression string or None

    Returns:
        Angle in radians, or None when value is None
    """
    if value is None:
        return None
    if isinstance(value, bool):
        raise ConfigurationError(f"Not an angle: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)

    text = str(value).strip().lower()
    match = _PI_EXPR.match(text)
    if match:
        numerator = float(match.group("num")) if match.group("num") else 1.0
        denominator = float(match.group("den")) if match.group("den") else 1.0
        if denominator == 0.0:
            raise ConfigurationError(f"Division by zero in angle: {value!r}")
        angle = numerator * math.pi / denominator
        return -angle if match.group("sign") == "-" else angle

    match = _DEG_EXPR.match(text)
    if match:
        return math.radians(float(match.group("value")))

    try:
        return float(text)
    except ValueError:
        raise ConfigurationError(f"Cannot parse angle expression: {value!r}") from None


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class GridConfig(_Section):
    """Grid description: intervals per axis and contour angles."""
    n: int = Field(64, ge=2)
    gamma: Optional[float] = None
    theta: Optional[float] = None
    n_ecs: Optional[int] = Field(None, ge=0)

    @field_validator("gamma", "theta", mode="before")
    @classmethod
    def _angle(cls, value: Any) -> Optional[float]:
        return parse_angle(value)

    @field_validator("gamma", "theta")
    @classmethod
    def _angle_range(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not 0.0 <= value < math.pi / 2:
            raise ValueError(f"angle {value} outside [0, pi/2)")
        return value

    def rotation_angle(self) -> float:
        """Rotation angle γ, derived from θ when only θ is given."""
        from .contour_grid import theta_to_gamma

        if self.gamma is not None:
            return self.gamma
        if self.theta is not None:
            return theta_to_gamma(self.theta)
        return 0.0


class SolverConfig(_Section):
    """Multigrid and outer-solver parameters."""
    smoother: Literal["gmres", "jacobi"] = "gmres"
    m: int = Field(3, ge=1)
    omega: float = Field(2.0 / 3.0, gt=0.0, le=1.0)
    nu1: int = Field(1, ge=0)
    nu2: int = Field(1, ge=0)
    tol: float = Field(1e-6, gt=0.0)
    max_iters: int = Field(50, ge=0)
    coarsest_interior: int = Field(7, ge=1, le=7)
    cycles_per_level: Optional[int] = Field(None, ge=1)
    method: Literal["multigrid", "direct", "krylov"] = "multigrid"

    @model_validator(mode="after")
    def _smoothing(self) -> "SolverConfig":
        if self.nu1 + self.nu2 < 1:
            raise ValueError("nu1 + nu2 must be at least 1")
        return self


class ProblemConfig(_Section):
    """Named built-in problem with parameter overrides."""
    problem: ProblemName = "helmholtz2d-twodots"
    k0: float = Field(1.0, gt=0.0)
    eta: Optional[List[float]] = None
    energy: float = 1.0
    params: Dict[str, float] = Field(default_factory=dict)

    @field_validator("eta")
    @classmethod
    def _unit_eta(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is None:
            return value
        norm = math.sqrt(sum(component * component for component in value))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"eta must be a unit vector, got norm {norm}")
        return value

    @property
    def dimension(self) -> int:
        return 3 if "3d" in self.problem else 2

    @property
    def is_schrodinger(self) -> bool:
        return self.problem.startswith("schrodinger")


class ExperimentConfig(_Section):
    """Top-level experiment file: shared sections plus per-command sections."""
    problem: ProblemConfig = Field(default_factory=ProblemConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    threads: int = Field(1, ge=1)
    commands: Dict[str, Dict[str, Any]] = Field(default_factory=dict)

    def with_overrides(self, overrides: Dict[str, Any]) -> "ExperimentConfig":
        """
        Return a copy with dotted-key overrides applied.

        Args:
            overrides: Mapping such as ``{"grid.n": 128, "solver.tol": 1e-8}``;
                None values are ignored

        Returns:
            Validated new configuration
        """
        data = self.model_dump()
        for key, value in overrides.items():
            if value is None:
                continue
            target = data
            parts = key.split(".")
            for part in parts[:-1]:
                if not isinstance(target.get(part), dict):
                    raise ConfigurationError(f"Unknown configuration section in override: {key}")
                target = target[part]
            target[parts[-1]] = value
        return _validate(data)

    def command_section(self, command: str) -> Dict[str, Any]:
        return dict(self.commands.get(command, {}))

    def echo(self) -> Dict[str, Any]:
        """JSON-serializable copy of the configuration for metadata sidecars."""
        return json.loads(self.model_dump_json())


def _validate(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid configuration: {e}") from e


def load_config(path: Optional[Union[str, Path]] = None) -> ExperimentConfig:
    """
    Load an experiment configuration file.

    Args:
        path: JSON file; None yields the defaults

    Returns:
        Validated configuration
    """
    if path is None:
        return ExperimentConfig()

    config_path = Path(path)
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigurationError(f"Config file not found: {config_path}") from None
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Config file {config_path} is not valid JSON: {e}") from e

    if not isinstance(data, dict):
        raise ConfigurationError(f"Config file {config_path} must hold a JSON object")

    logger.debug(f"Loaded configuration from {config_path}")
    return _validate(data)
