"""
Far-field amplitude maps F(α) = I1(α) + I2(α).

I1 integrates the incoming-wave source over the real domain; I2 integrates
the scattered wave either along the rotated contour (complex path) or over
the real section of an ECS grid (reference path). Both use tensor trapezoid
quadrature with separable direction exponentials.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import GridConfig, SolverConfig
from ..core.contour_grid import ContourKind, Field, TensorGrid
from ..core.errors import ConfigurationError, RotationAngleTooLargeError
from ..core.model_problems import HelmholtzProblem
from ..core.multigrid import ConvergenceReport, solve_vcycles, specs_from_config
from ..core.reference_solver import solve_direct, solve_ecs_krylov

logger = logging.getLogger(__name__)

OVERFLOW_EXPONENT = math.log(1e300)
SOLVER_CHOICES = ("complex", "reference", "reference-krylov")
_EINSUM = {2: "ki,kj,ij->k", 3: "ki,kj,kl,ijl->k"}


@dataclass
class Directions:
    """Unit vectors plus the angles that generated them."""
    vectors: np.ndarray
    angles: Tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]


def directions_2d(n: int = 360) -> Directions:
    """n equispaced angles on [0, 2π)."""
    alpha = 2.0 * np.pi * np.arange(n) / n
    return Directions(np.stack([np.cos(alpha), np.sin(alpha)], axis=1), (alpha,))


def directions_3d(n_polar: int = 64, n_azimuth: int = 128) -> Directions:
    """Midpoint polar angles times equispaced azimuths, polar index slowest."""
    polar = np.pi * (np.arange(n_polar) + 0.5) / n_polar
    azimuth = 2.0 * np.pi * np.arange(n_azimuth) / n_azimuth
    theta, phi = np.meshgrid(polar, azimuth, indexing="ij")
    theta, phi = theta.ravel(), phi.ravel()
    vectors = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=1)
    return Directions(vectors, (theta, phi))


def default_directions(dim: int) -> Directions:
    return directions_2d() if dim == 2 else directions_3d()


def asymptotic_prefactor(dim: int, k0: float, rho: float) -> complex:
    """D(ρ) such that u_sc ≈ D(ρ)F(α) far from the object."""
    if dim == 2:
        return complex(
            0.25j * math.sqrt(2.0 / math.pi) * np.exp(-0.25j * math.pi) * np.exp(1j * k0 * rho) / math.sqrt(k0 * rho)
        )
    if dim == 3:
        return complex(np.exp(1j * k0 * rho) / (4.0 * math.pi * rho))
    raise ConfigurationError(f"No far-field asymptotics for dimension {dim}")


def far_field_wave(values: np.ndarray, dim: int, k0: float, rho: float) -> np.ndarray:
    return asymptotic_prefactor(dim, k0, rho) * values


def _fourier_sum(
    nodes: Sequence[np.ndarray],
    weights: Sequence[np.ndarray],
    values: np.ndarray,
    directions: Directions,
    k0: float,
    chunk: int = 256,
) -> np.ndarray:
    """Σ_x w(x) e^{−ik0 α·x} g(x) for every direction, axis-separable."""
    dim = len(nodes)
    if directions.dim != dim:
        raise ConfigurationError(f"{directions.dim}D directions used on a {dim}D grid")

    result = np.empty(len(directions), dtype=complex)
    for start in range(0, len(directions), chunk):
        block = directions.vectors[start:start + chunk]
        factors = [
            np.exp(-1j * k0 * np.multiply.outer(block[:, a], nodes[a])) * weights[a]
            for a in range(dim)
        ]
        result[start:start + chunk] = np.einsum(_EINSUM[dim], *factors, values, optimize=True)
    return result


def integral_I1(problem: HelmholtzProblem, real_grid: TensorGrid, directions: Directions) -> np.ndarray:
    """Trapezoid quadrature of ∫ e^{−ik0 x·α} k0²χ(x) u_in(x) dx on the real domain."""
    if not all(axis.kind is ContourKind.ROTATED and axis.gamma == 0.0 for axis in real_grid.axes):
        raise ConfigurationError("I1 needs a real uniform grid")
    nodes = [axis.interior_nodes.real for axis in real_grid.axes]
    weights = [axis.interior_weights().real for axis in real_grid.axes]
    source = np.broadcast_to(problem.source(np.meshgrid(*nodes, indexing="ij")), real_grid.interior_shape)
    return _fourier_sum(nodes, weights, source, directions, problem.k0)


def _check_overflow(nodes: Sequence[np.ndarray], directions: Directions, k0: float):
    exponent = 0.0
    for a, z in enumerate(nodes):
        exponent += k0 * np.max(np.abs(np.multiply.outer(directions.vectors[:, a], z.imag)))
    if exponent > OVERFLOW_EXPONENT:
        raise RotationAngleTooLargeError(
            f"Far-field exponential reaches e^{exponent:.0f}; reduce the rotation angle or the domain"
        )


def integral_I2_complex(
    u_contour: Field,
    problem: HelmholtzProblem,
    rotated_grid: TensorGrid,
    directions: Directions,
) -> np.ndarray:
    """
    Scattered-wave integral along the rotated contour.

    Quadrature of k0²χ(z) u(z) e^{−ik0 α·z} with the Jacobian e^{idγ}h^d of
    the rotated cells.
    """
    rotated_grid.check_field(u_contour, "u_contour")
    if not rotated_grid.is_rotated:
        raise ConfigurationError("I2 on the contour needs a rotated grid")
    nodes = [axis.interior_nodes for axis in rotated_grid.axes]
    _check_overflow(nodes, directions, problem.k0)

    integrand = problem.object_term(rotated_grid.coordinates()) * u_contour
    if not np.all(np.isfinite(integrand)):
        raise RotationAngleTooLargeError("Object function overflows on the rotated contour")
    weights = [axis.interior_weights() for axis in rotated_grid.axes]
    return _fourier_sum(nodes, weights, integrand, directions, problem.k0)


def integral_I2_real(
    u_ecs: Field,
    problem: HelmholtzProblem,
    ecs_grid: TensorGrid,
    directions: Directions,
) -> np.ndarray:
    """Scattered-wave integral over the real section of an ECS solution."""
    ecs_grid.check_field(u_ecs, "u_ecs")
    index = [np.nonzero(axis.real_mask)[0] for axis in ecs_grid.axes]
    nodes = [axis.interior_nodes[i].real for axis, i in zip(ecs_grid.axes, index)]
    weights = []
    for axis, i in zip(ecs_grid.axes, index):
        w = np.full(len(i), axis.h)
        # The section endpoints are bend nodes of the ECS contour
        if axis.n_ecs_left:
            w[0] *= 0.5
        if axis.n_ecs:
            w[-1] *= 0.5
        weights.append(w)
    u_real = u_ecs[np.ix_(*index)]
    integrand = problem.object_term(np.meshgrid(*nodes, indexing="ij")) * u_real
    return _fourier_sum(nodes, weights, integrand, directions, problem.k0)


def normalized_difference(values_a: np.ndarray, values_b: np.ndarray, reference: Optional[np.ndarray] = None) -> float:
    """‖F_a − F_b‖₂ / ‖F_ref‖₂, with F_ref defaulting to F_b."""
    denominator = np.linalg.norm(values_b if reference is None else reference)
    difference = np.linalg.norm(np.asarray(values_a) - np.asarray(values_b))
    if denominator == 0.0:
        return 0.0 if difference == 0.0 else math.inf
    return float(difference / denominator)


@dataclass
class FarFieldMap:
    """Far-field amplitudes F per direction."""
    dimension: int
    directions: Directions
    values: np.ndarray
    k0: float
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def prefactor_descriptor(self) -> str:
        if self.dimension == 2:
            return "(i/4) sqrt(2/pi) exp(-i pi/4) exp(i k0 rho) / sqrt(k0 rho)"
        return "exp(i k0 rho) / (4 pi rho)"

    @property
    def header(self) -> List[str]:
        if self.dimension == 2:
            return ["alpha_rad", "re_F", "im_F", "abs_F"]
        return ["polar_rad", "azimuth_rad", "re_F", "im_F", "abs_F"]

    def rows(self) -> List[List[float]]:
        columns = list(self.directions.angles) + [self.values.real, self.values.imag, np.abs(self.values)]
        return [[float(c[i]) for c in columns] for i in range(len(self.values))]


def farfield_map(
    problem: HelmholtzProblem,
    solver_choice: str,
    grid_spec: GridConfig,
    directions: Optional[Directions] = None,
    solver: Optional[SolverConfig] = None,
) -> FarFieldMap:
    """
    Solve the scattering problem and assemble F = I1 + I2.

    Args:
        problem: Helmholtz model problem
        solver_choice: "complex" (multigrid on the rotated grid),
            "reference" (direct LU on the ECS grid) or "reference-krylov"
        grid_spec: Intervals per axis over the real domain plus angles; the
            complex path uses γ, the reference paths θ
        directions: Sampling of α; defaults by dimension
        solver: Solver parameters

    Returns:
        Far-field map whose metadata carries grid, angles and solve report
    """
    if solver_choice not in SOLVER_CHOICES:
        raise ConfigurationError(f"Unknown far-field solver {solver_choice!r}, expected one of {SOLVER_CHOICES}")
    solver = solver or SolverConfig()
    directions = directions or default_directions(problem.dim)
    n = grid_spec.n
    a, b = problem.domain
    real_grid = problem.rotated_grid(n, 0.0, multigrid=False)

    report: ConvergenceReport
    if solver_choice == "complex":
        gamma = grid_spec.rotation_angle()
        grid = problem.rotated_grid(n, gamma)
        if solver.method == "direct":
            u, report = solve_direct(problem, grid)
        else:
            cycle, smoother = specs_from_config(solver)
            u, report = solve_vcycles(problem, grid, solver.tol, solver.max_iters, cycle, smoother)
        i2 = integral_I2_complex(u, problem, grid, directions)
        angles = {"gamma": gamma}
    else:
        theta = grid_spec.theta if grid_spec.theta is not None else math.pi / 4
        grid = problem.ecs_grid(n, theta, grid_spec.n_ecs)
        if solver_choice == "reference":
            u, report = solve_direct(problem, grid)
        else:
            cycle, smoother = specs_from_config(solver)
            u, report = solve_ecs_krylov(problem, grid, solver.tol, cycle=cycle, smoother=smoother)
        i2 = integral_I2_real(u, problem, grid, directions)
        angles = {"theta": theta}

    i1 = integral_I1(problem, real_grid, directions)
    logger.info(f"Far field ({solver_choice}) on {grid.interior_shape}: {len(directions)} directions")
    return FarFieldMap(
        dimension=problem.dim,
        directions=directions,
        values=i1 + i2,
        k0=problem.k0,
        metadata={
            "solver": solver_choice,
            "domain": [a, b],
            "grid": grid.describe(),
            **angles,
            "report": report.to_dict(),
            "converged": report.converged,
        },
    )
