"""
Analytic model problems evaluated at complex coordinates.

Every field is a closed-form expression, so evaluating it on a rotated
contour is its analytic continuation.
"""
import logging
from dataclasses import dataclass, replace
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .config import ProblemConfig
from .contour_grid import ContourKind, Field, TensorGrid, build_grid
from .errors import ConfigurationError

logger = logging.getLogger(__name__)

Coordinates = Sequence[Union[np.ndarray, complex, float]]

# Helmholtz two-dots object
DOT_AMPLITUDE = 0.2
DOT_OFFSET = 4.0
HELMHOLTZ_HALF_WIDTH = 20.0

# Three-particle benchmark
WELL_DEPTH = 4.5
REPULSION = 2.0
SOURCE_WIDTH = 3.0
SCHRODINGER_RADIUS = 15.0


def chi_2d(z1, z2, amplitude: float = DOT_AMPLITUDE, offset: float = DOT_OFFSET):
    """k0²χ of two Gaussian dots at (0, ±offset)."""
    return -amplitude * (np.exp(-(z1 ** 2 + (z2 - offset) ** 2)) + np.exp(-(z1 ** 2 + (z2 + offset) ** 2)))


def chi_3d(z1, z2, z3, amplitude: float = DOT_AMPLITUDE, offset: float = DOT_OFFSET):
    """k0²χ of two Gaussian spheres at (0, ±offset, 0)."""
    r2 = z1 ** 2 + z3 ** 2
    return -amplitude * (np.exp(-(r2 + (z2 - offset) ** 2)) + np.exp(-(r2 + (z2 + offset) ** 2)))


def incoming_wave(z: Coordinates, k0: float, eta: Sequence[float]):
    """Plane wave e^{i k0 η·z}, evaluated at real or complex points."""
    if len(z) != len(eta):
        raise ConfigurationError(f"Point has {len(z)} coordinates, direction has {len(eta)}")
    phase = sum(e * zc for e, zc in zip(eta, z))
    return np.exp(1j * k0 * phase)


def one_body_potential(z, depth: float = WELL_DEPTH):
    return -depth * np.exp(-z ** 2)


def two_body_potential(za, zb, strength: float = REPULSION):
    return strength * np.exp(-(za + zb) ** 2)


def benchmark_rhs(z: Coordinates, width: float = SOURCE_WIDTH):
    total = sum(z)
    return np.exp(-width * total ** 2)


@dataclass(frozen=True)
class HelmholtzProblem:
    """
    (−Δ − k0²(1 + χ))u = k0²χ u_in on the box [a, b]^d.

    ``k0`` only scales the background; the object term k0²χ is fixed by
    ``amplitude`` and ``offset``.
    """
    dim: int = 2
    k0: float = 1.0
    eta: Tuple[float, ...] = (1.0, 0.0)
    amplitude: float = DOT_AMPLITUDE
    offset: float = DOT_OFFSET
    domain: Tuple[float, float] = (-HELMHOLTZ_HALF_WIDTH, HELMHOLTZ_HALF_WIDTH)
    name: str = "helmholtz2d-twodots"

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigurationError(f"Helmholtz model problems are 2D or 3D, got {self.dim}")
        if len(self.eta) != self.dim:
            raise ConfigurationError(f"eta has {len(self.eta)} components for a {self.dim}D problem")

    def object_term(self, coords: Coordinates):
        """k0²χ(z)."""
        if self.dim == 2:
            return chi_2d(coords[0], coords[1], self.amplitude, self.offset)
        return chi_3d(coords[0], coords[1], coords[2], self.amplitude, self.offset)

    def object_function(self, coords: Coordinates):
        return self.object_term(coords) / self.k0 ** 2

    def k_squared(self, coords: Coordinates):
        return self.k0 ** 2 + self.object_term(coords)

    def incoming(self, coords: Coordinates):
        return incoming_wave(coords, self.k0, self.eta)

    def source(self, coords: Coordinates):
        return self.object_term(coords) * self.incoming(coords)

    def rotated_grid(self, n: int, gamma: float, multigrid: bool = True) -> TensorGrid:
        a, b = self.domain
        return build_grid(self.dim, ContourKind.ROTATED, a, b, n, gamma, multigrid=multigrid)

    def ecs_grid(self, n: int, theta: float, n_ecs: Optional[int] = None) -> TensorGrid:
        """Real grid with ECS layers at both ends of every axis."""
        a, b = self.domain
        return build_grid(self.dim, ContourKind.ECS_REAL, a, b, n, theta, n_ecs=n_ecs, two_sided=True)


@dataclass(frozen=True)
class SchrodingerProblem:
    """
    Diagonal partial-wave block (−½Δ + ΣV_i + ΣV_ij − E)u = φ on [0, R]^d.

    Multiplied by two, it reads (−Δ − k²)u = 2φ with k² = 2(E − ΣV).
    """
    dim: int = 2
    energy: float = 1.0
    depth: float = WELL_DEPTH
    repulsion: float = REPULSION
    source_width: float = SOURCE_WIDTH
    radius: float = SCHRODINGER_RADIUS
    rotated_extent: float = 1.5 * SCHRODINGER_RADIUS
    name: str = "schrodinger2d-benchmark"

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigurationError(f"Schrodinger model problems are 2D or 3D, got {self.dim}")

    def one_body(self, z):
        return one_body_potential(z, self.depth)

    def two_body(self, za, zb):
        return two_body_potential(za, zb, self.repulsion)

    def two_body_sum(self, coords: Coordinates):
        total = 0.0
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                total = total + self.two_body(coords[i], coords[j])
        return total

    def potential(self, coords: Coordinates):
        return sum(self.one_body(z) for z in coords) + self.two_body_sum(coords)

    def k_squared(self, coords: Coordinates):
        return 2.0 * (self.energy - self.potential(coords))

    def rhs(self, coords: Coordinates):
        """φ(z), the undoubled right-hand side."""
        return benchmark_rhs(coords, self.source_width)

    def source(self, coords: Coordinates):
        return 2.0 * self.rhs(coords)

    def with_energy(self, energy: float) -> "SchrodingerProblem":
        return replace(self, energy=float(energy))

    def rotated_grid(self, n: int, gamma: float, multigrid: bool = True) -> TensorGrid:
        return build_grid(self.dim, ContourKind.ROTATED, 0.0, self.rotated_extent, n, gamma, multigrid=multigrid)

    def ecs_grid(self, n: int, theta: float, n_ecs: Optional[int] = None) -> TensorGrid:
        """Real grid on [0, R] with a one-sided ECS layer after R."""
        return build_grid(self.dim, ContourKind.ECS_REAL, 0.0, self.radius, n, theta, n_ecs=n_ecs)

    def real_grid(self, n: int) -> TensorGrid:
        return build_grid(self.dim, ContourKind.ROTATED, 0.0, self.radius, n, 0.0)


def helmholtz_rhs(problem: HelmholtzProblem, grid: TensorGrid) -> Field:
    """Right-hand side k0²χ u_in at every interior node of the grid."""
    if grid.dim != problem.dim:
        raise ConfigurationError(f"{grid.dim}D grid used with a {problem.dim}D problem")
    coords = grid.coordinates()
    return np.broadcast_to(problem.source(coords), grid.interior_shape).astype(complex)


def model_potentials_2d3d(dim: int = 2, energy: float = 1.0, **params) -> SchrodingerProblem:
    """Benchmark three-particle model reduced to ``dim`` radial coordinates."""
    problem = SchrodingerProblem(dim=dim, energy=energy, name=f"schrodinger{dim}d-benchmark")
    if dim == 3:
        problem = replace(problem, rotated_extent=SCHRODINGER_RADIUS)
    return replace(problem, **params) if params else problem


def model_potentials_3d(energy: float = 1.0, **params) -> SchrodingerProblem:
    return model_potentials_2d3d(3, energy, **params)


_HELMHOLTZ_PARAMS = {"amplitude", "offset"}
_SCHRODINGER_PARAMS = {"depth", "repulsion", "source_width", "radius", "rotated_extent"}


def problem_from_config(config: ProblemConfig) -> Union[HelmholtzProblem, SchrodingerProblem]:
    """Instantiate a named built-in problem with its parameter overrides."""
    params: Dict[str, float] = dict(config.params)
    dim = config.dimension

    if config.is_schrodinger:
        unknown = set(params) - _SCHRODINGER_PARAMS
        if unknown:
            raise ConfigurationError(f"Unknown parameters for {config.problem}: {sorted(unknown)}")
        return model_potentials_2d3d(dim, config.energy, **params)

    unknown = set(params) - _HELMHOLTZ_PARAMS - {"half_width"}
    if unknown:
        raise ConfigurationError(f"Unknown parameters for {config.problem}: {sorted(unknown)}")
    half_width = params.pop("half_width", HELMHOLTZ_HALF_WIDTH)
    eta = tuple(config.eta) if config.eta else (1.0,) + (0.0,) * (dim - 1)
    logger.debug(f"Problem {config.problem}: k0={config.k0}, eta={eta}")
    return HelmholtzProblem(
        dim=dim,
        k0=config.k0,
        eta=eta,
        domain=(-half_width, half_width),
        name=config.problem,
        **params,
    )
