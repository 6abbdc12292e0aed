"""
Three-particle Schrödinger model: bound states, continuum waves, rotated-grid
solves, single and double ionization amplitudes, and energy scans.

Conventions:
    - bound states are normalized by Σ φ² h = 1 on the real grid and by the
      unconjugated Σ φ(z)² h̃ = 1 on a rotated contour;
    - continuum waves have asymptotic amplitude 1/√k on the real axis;
    - σ(k1, k2) uses k0 = √(2E) and the prefactor 8π²/k0²; the reduced total
      cross section divides σ_tot by 4π²;
    - the single-ionization value reported per channel is |s_n|².
"""
import asyncio
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..core.config import SolverConfig
from ..core.contour_grid import Contour1D, ContourKind, Field, TensorGrid, theta_to_gamma
from ..core.errors import ChannelClosedError, ConfigurationError, ConvergenceFailure, NumericalError
from ..core.helmholtz_operator import axis_stencil, build_operator
from ..core.model_problems import SchrodingerProblem
from ..core.multigrid import (
    ConvergenceReport,
    CycleSpec,
    SmootherSpec,
    fmg,
    measure_rate,
    solve_vcycles,
    specs_from_config,
)
from ..core.reference_solver import solve_direct

logger = logging.getLogger(__name__)

Potential = Callable[[np.ndarray], np.ndarray]

CONVENTIONS = {
    "sigma_k0": "sqrt(2E)",
    "single_reported": "abs(s_n)^2",
    "continuum_normalization": "amplitude 1/sqrt(k)",
    "bound_normalization": "sum(phi^2 h) = 1",
    "sigma_prefactor": "8 pi^2 / k0^2",
    "sigma_tot_reduced": "sigma_tot / (4 pi^2)",
}
MATCH_FRACTION = 0.1
POTENTIAL_FREE = 1e-10
THRESHOLD_TOL = 1e-12
IONIZATION_PATHS = ("complex", "real")

# Reference setups of the 2D model
ECS_THETA = math.pi / 7
ECS_REAL_INTERVALS = 300
ECS_LAYER_INTERVALS = 150
# Rotated grid with the mesh width of the ECS grid; 512 when multigrid needs a power of two
COMPLEX_INTERVALS = 450
COMPLEX_MULTIGRID_INTERVALS = 512


@dataclass
class BoundState:
    """Eigenpair of −½ d²/dx² + V on [0, R] with Dirichlet ends."""
    n: int
    energy: float
    x: np.ndarray
    values: np.ndarray

    @property
    def h(self) -> float:
        return float(self.x[1] - self.x[0])

    def residual(self, potential: Potential) -> float:
        """‖(H − λ)φ‖ on interior nodes."""
        phi = self.values
        h = self.h
        interior = phi[1:-1]
        laplacian = (phi[:-2] - 2.0 * interior + phi[2:]) / h ** 2
        hphi = -0.5 * laplacian + np.real(potential(self.x[1:-1])) * interior
        return float(np.linalg.norm(hphi - self.energy * interior) * math.sqrt(h))


@dataclass
class ContinuumWave:
    """Regular solution of (−½ d²/dx² + V − k²/2)φ = 0 along a contour."""
    k: float
    contour: Contour1D
    values: np.ndarray
    delta: float
    amplitude: float
    scale: complex
    convention: str = CONVENTIONS["continuum_normalization"]


@dataclass
class ChannelAmplitude:
    n: int
    threshold: float
    is_open: bool
    k: float = 0.0
    amplitude: complex = 0j

    @property
    def s_abs2(self) -> float:
        return float(abs(self.amplitude) ** 2)


@dataclass
class DoubleIonization:
    alphas: np.ndarray
    f: np.ndarray
    sigma: np.ndarray
    sigma_tot: float
    is_open: bool


@dataclass
class IonizationResult:
    """Ionization observables at one total energy."""
    energy: float
    path: str
    channels: List[ChannelAmplitude]
    double: DoubleIonization
    report: Dict[str, Any] = field(default_factory=dict)
    conventions: Dict[str, str] = field(default_factory=lambda: dict(CONVENTIONS))
    solve_report: Optional[ConvergenceReport] = None

    @property
    def sigma_tot(self) -> float:
        return self.double.sigma_tot

    @property
    def sigma_tot_reduced(self) -> float:
        """σ_tot with the prefactor 2/k0² in place of 8π²/k0²."""
        return self.double.sigma_tot / (4.0 * math.pi ** 2)


@dataclass
class ScanPoint:
    energy: float
    report: Optional[ConvergenceReport] = None
    ionization: Optional[IonizationResult] = None
    error: Optional[str] = None


# ----------------------------------------------------------------- 1D states

def bound_states_1d(potential: Potential, R: float, n_grid: int) -> List[BoundState]:
    """
    All negative eigenpairs of the 1D Hamiltonian on [0, R].

    Sturm-sequence bisection (LAPACK stebz) on the symmetric tridiagonal
    discretization, with eigenvectors from inverse iteration (stein).

    Args:
        potential: Real, decaying V(x)
        R: Box length
        n_grid: Number of intervals

    Returns:
        Bound states ordered by energy; empty when there are none
    """
    if R <= 0.0 or n_grid < 3:
        raise ConfigurationError(f"Need R > 0 and at least 3 intervals, got R={R}, n={n_grid}")
    h = R / n_grid
    x = h * np.arange(n_grid + 1)
    d = 1.0 / h ** 2 + np.real(potential(x[1:-1]))
    e = np.full(n_grid - 2, -0.5 / h ** 2)
    lower = float(np.min(d) - 2.0 * abs(e[0]) - 1.0)
    if lower >= 0.0:
        return []

    negative = la.eigh_tridiagonal(
        d, e, eigvals_only=True, select="v", select_range=(lower, 0.0), lapack_driver="stebz"
    )
    if negative.size == 0:
        return []
    energies, vectors = la.eigh_tridiagonal(
        d, e, select="i", select_range=(0, negative.size - 1), lapack_driver="stebz"
    )
    states = []
    for n, (energy, vector) in enumerate(zip(energies, vectors.T)):
        if energy >= 0.0:
            continue
        values = np.zeros(n_grid + 1)
        values[1:-1] = vector / math.sqrt(h)
        leading = np.flatnonzero(np.abs(values) > 1e-6 * np.max(np.abs(values)))[0]
        if values[leading] < 0.0:
            values = -values
        states.append(BoundState(n, float(energy), x, values))

    logger.debug(f"{len(states)} bound states on [0, {R}] with {n_grid} intervals")
    return states


def _require_origin(contour: Contour1D):
    if contour.kind is not ContourKind.ROTATED or contour.a != 0.0:
        raise ConfigurationError("Radial functions need a rotated (or real) contour starting at 0")


def bound_state_on_contour(bound: BoundState, potential: Potential, contour: Contour1D) -> np.ndarray:
    """
    Continue a bound state onto a rotated contour.

    Inverse iteration with shift λ_n on the complex-symmetric contour
    discretization; normalized by the unconjugated Σ φ² h̃ = 1 with
    Re(φ(z₁)/z₁) > 0.

    Returns:
        Values at every contour node (zero at both ends)
    """
    _require_origin(contour)
    z = contour.interior_nodes
    lower, center, upper = axis_stencil(contour.steps)
    n = len(z)
    banded = np.zeros((3, n), dtype=complex)
    banded[0, 1:] = 0.5 * upper[:-1]
    banded[2, :-1] = 0.5 * lower[1:]

    v = np.interp(contour.parameter_nodes[1:-1], bound.x, bound.values).astype(complex)
    shift = bound.energy
    for attempt in range(3):
        banded[1] = 0.5 * center + potential(z) - shift
        try:
            for _ in range(4):
                v = la.solve_banded((1, 1), banded, v)
                v /= np.linalg.norm(v)
            break
        except la.LinAlgError:
            shift += 1e-10 * (1.0 + abs(shift))
    else:
        raise ConvergenceFailure(f"Inverse iteration for bound state {bound.n} failed on the contour")

    weights = contour.interior_weights()
    v = v / np.sqrt(np.sum(v * v * weights))
    if (v[0] / z[0]).real < 0.0:
        v = -v
    values = np.zeros(n + 2, dtype=complex)
    values[1:-1] = v
    return values


def _numerov(nodes: np.ndarray, q: np.ndarray) -> np.ndarray:
    """
    Numerov recurrence for φ'' = −q φ with φ(0) = 0, φ'(0) = 1.

    ``q`` has shape (..., len(nodes)); the step is nodes[1] − nodes[0].
    """
    s = nodes[1] - nodes[0]
    s2 = s * s
    q = np.asarray(q, dtype=complex)
    phi = np.zeros(q.shape, dtype=complex)
    c = 1.0 + s2 * q / 12.0
    phi[..., 1] = s * (1.0 - q[..., 0] * s2 / 6.0)
    for j in range(1, q.shape[-1] - 1):
        phi[..., j + 1] = (
            2.0 * (1.0 - 5.0 * s2 * q[..., j] / 12.0) * phi[..., j] - c[..., j - 1] * phi[..., j - 1]
        ) / c[..., j + 1]
    return phi


def _match_amplitude(x: np.ndarray, phi: np.ndarray, ks: np.ndarray, potential: Potential):
    """Least-squares fit φ ≈ a sin(kx) + b cos(kx) on the outer potential-free window."""
    start = int(math.floor((1.0 - MATCH_FRACTION) * len(x)))
    window = np.zeros(len(x), dtype=bool)
    window[start:] = True
    window &= np.abs(potential(x)) < POTENTIAL_FREE
    if window.sum() < 2:
        raise ConfigurationError("No potential-free matching window on the outer part of the contour")

    xw = x[window]
    amplitudes = np.empty(len(ks))
    deltas = np.empty(len(ks))
    for i, k in enumerate(ks):
        basis = np.stack([np.sin(k * xw), np.cos(k * xw)], axis=1)
        (a, b), *_ = np.linalg.lstsq(basis, phi[i, window].real, rcond=None)
        amplitudes[i] = math.hypot(a, b)
        deltas[i] = math.atan2(b, a)
    return amplitudes, deltas


def continuum_waves(potential: Potential, ks: Sequence[float], contour: Contour1D) -> List[ContinuumWave]:
    """Batched continuum_wave for several momenta on one contour."""
    ks = np.asarray(ks, dtype=float)
    if np.any(ks <= 0.0):
        raise ChannelClosedError(f"Continuum waves need k > 0, got min k = {ks.min()}")
    _require_origin(contour)

    real = contour if contour.gamma == 0.0 else contour.unrotated()
    x = real.nodes.real
    phi_real = _numerov(real.nodes, ks[:, None] ** 2 - 2.0 * potential(x)[None, :])
    amplitudes, deltas = _match_amplitude(x, phi_real, ks, potential)
    scales = 1.0 / (amplitudes * np.sqrt(ks))

    if contour.gamma == 0.0:
        values = phi_real
    else:
        z = contour.nodes
        values = _numerov(z, ks[:, None] ** 2 - 2.0 * potential(z)[None, :])
    values = values * scales[:, None]
    if not np.all(np.isfinite(values)):
        raise NumericalError("Continuum wave overflowed on the contour")

    return [
        ContinuumWave(float(k), contour, values[i], float(deltas[i]), float(amplitudes[i]), complex(scales[i]))
        for i, k in enumerate(ks)
    ]


def continuum_wave(potential: Potential, k: float, contour: Contour1D) -> ContinuumWave:
    """
    Regular continuum wave by Numerov integration along the contour.

    The real-axis solution is matched to A sin(kx + δ) on the outer tenth of
    the contour where |V| < 1e−10 and rescaled to amplitude 1/√k; a rotated
    contour reuses that scale factor.
    """
    return continuum_waves(potential, [k], contour)[0]


# ----------------------------------------------------------------- 2D/3D solves

def solve_schrodinger(
    problem: SchrodingerProblem,
    rotated_grid: TensorGrid,
    tol: float = 1e-6,
    max_iters: int = 50,
    cycle: Optional[CycleSpec] = None,
    smoother: Optional[SmootherSpec] = None,
    method: str = "multigrid",
) -> Tuple[Field, ConvergenceReport]:
    """
    Solve (−Δ − 2(E − ΣV))u = 2φ on a rotated grid anchored at the origin.

    ``method`` is "multigrid" (V-cycles, or full multigrid when
    ``cycle.cycles_per_level`` is set) or "direct".
    """
    for axis in rotated_grid.axes:
        _require_origin(axis)
    if rotated_grid.dim != problem.dim:
        raise ConfigurationError(f"{rotated_grid.dim}D grid used with a {problem.dim}D problem")

    if method == "direct":
        return solve_direct(problem, rotated_grid)
    if method != "multigrid":
        raise ConfigurationError(f"Unknown Schrodinger solve method {method!r}")
    if cycle is not None and cycle.cycles_per_level is not None:
        return fmg(problem, rotated_grid, tol, max_iters, cycle, smoother)
    return solve_vcycles(problem, rotated_grid, tol, max_iters, cycle, smoother)


def bound_state_2d(
    problem: SchrodingerProblem,
    grid: Optional[TensorGrid] = None,
    shift_guess: Optional[float] = None,
    max_iter: int = 50,
    tol: float = 1e-10,
) -> Tuple[float, Field]:
    """
    Ground state of the 2D subsystem by shifted inverse iteration.

    The operator −Δ − 2(σ − ΣV) equals 2(H − σ), so the eigenvalue estimate
    is σ + ⟨v, Av⟩ / (2⟨v, v⟩).

    Args:
        problem: 2D benchmark (its energy is ignored)
        grid: Real grid on [0, R]²; defaults to 128 intervals per axis
        shift_guess: Shift σ; defaults to just below 2λ0
        max_iter: Iteration limit
        tol: Change in the eigenvalue estimate that ends the iteration

    Returns:
        (μ0, state normalized by Σ|v|² h² = 1)
    """
    if problem.dim != 2:
        raise ConfigurationError("bound_state_2d needs the 2D subsystem")
    grid = grid or problem.real_grid(128)
    if shift_guess is None:
        axis = grid.axes[0]
        states = bound_states_1d(problem.one_body, axis.b, axis.n_intervals)
        if not states:
            raise ConvergenceFailure("No 1D bound state to seed the 2D shift")
        shift_guess = 2.0 * states[0].energy - 0.05

    op = build_operator(grid, problem.with_energy(shift_guess).k_squared)
    lu = spla.splu(sp.csc_matrix(op.assemble()))
    v = np.ones(grid.interior_shape, dtype=complex)
    v /= np.linalg.norm(v)
    mu_previous = math.inf
    for iteration in range(1, max_iter + 1):
        v = lu.solve(v.ravel()).reshape(grid.interior_shape)
        v /= np.linalg.norm(v)
        mu = shift_guess + float(np.vdot(v, op.apply(v)).real) / (2.0 * float(np.vdot(v, v).real))
        if abs(mu - mu_previous) < tol:
            break
        mu_previous = mu
    else:
        raise ConvergenceFailure(f"Shifted inverse iteration did not converge in {max_iter} iterations")

    cell = float(np.prod([axis.h for axis in grid.axes]))
    v = v / math.sqrt(float(np.sum(np.abs(v) ** 2)) * cell)
    if np.sum(v).real < 0.0:
        v = -v
    logger.info(f"2D bound state mu0 = {mu:.6f} after {iteration} iterations")
    return mu, v


def bound_state_3d(problem: SchrodingerProblem, grid: Optional[TensorGrid] = None, tol: float = 1e-10) -> Tuple[float, Field]:
    """
    Ground state ν0 of the 3D model.

    Lanczos iteration (ARPACK) for the smallest eigenvalue of the real
    operator 2H; a 3D sparse factorization for inverse iteration does not
    fit in memory at useful resolutions.

    Returns:
        (ν0, state normalized by Σ|v|² h³ = 1)
    """
    if problem.dim != 3:
        raise ConfigurationError("bound_state_3d needs the 3D model")
    grid = grid or problem.real_grid(128)
    if not grid.is_rotated or grid.gamma != 0.0:
        raise ConfigurationError("bound_state_3d needs a real grid")
    op = build_operator(grid, problem.with_energy(0.0).k_squared)
    matrix = sp.csr_matrix(op.assemble().real)
    try:
        values, vectors = spla.eigsh(matrix, k=1, which="SA", tol=tol, ncv=40)
    except spla.ArpackNoConvergence as e:
        raise ConvergenceFailure(f"Lanczos iteration for the 3D ground state did not converge: {e}") from e

    nu0 = 0.5 * float(values[0])
    v = vectors[:, 0].reshape(grid.interior_shape)
    cell = float(np.prod([axis.h for axis in grid.axes]))
    v = v / math.sqrt(float(np.sum(v ** 2)) * cell)
    if np.sum(v) < 0.0:
        v = -v
    logger.info(f"3D bound state nu0 = {nu0:.6f} on {grid.interior_shape}")
    return nu0, v


def estimate_nu0(mu0: float, lambda0: float) -> float:
    """3D ground-state estimate ν0 ≈ μ0 + λ0; bound_state_3d solves for it."""
    return mu0 + lambda0


def scattering_regimes(energy: float, lambda0: float, mu0: float, nu0: Optional[float] = None) -> Dict[str, bool]:
    """
    Open scattering regimes at total energy E.

    2D model: indefinite above μ0, single ionization above λ0, double above 0.
    3D model (nu0 given): indefinite above ν0, single above μ0, double above
    λ0, triple above 0.
    """
    if nu0 is None:
        return {"indefinite": energy > mu0, "single": energy > lambda0, "double": energy > 0.0}
    return {
        "indefinite": energy > nu0,
        "single": energy > mu0,
        "double": energy > lambda0,
        "triple": energy > 0.0,
    }


# ----------------------------------------------------------------- ionization

def _radial_axes(grid: TensorGrid):
    """Per-axis (node indices, contour for waves, weights) used by the integrals."""
    axes = []
    for axis in grid.axes:
        if axis.kind is ContourKind.ROTATED:
            _require_origin(axis)
            axes.append((np.arange(axis.n_interior), axis, axis.interior_weights()))
        else:
            index = np.nonzero(axis.real_mask)[0]
            real = Contour1D(ContourKind.ROTATED, 0.0, axis.b, axis.n_intervals)
            weights = np.full(len(index), axis.h, dtype=complex)
            weights[-1] *= 0.5
            axes.append((index, real, weights))
    return axes


def _effective_source(u: Field, problem: SchrodingerProblem, grid: TensorGrid, source: Optional[Field]) -> Tuple:
    axes = _radial_axes(grid)
    index = [a[0] for a in axes]
    coords = [contour.interior_nodes[i] if contour is axis else contour.nodes[i + 1]
              for (i, contour, _), axis in zip(axes, grid.axes)]
    mesh = np.meshgrid(*coords, indexing="ij")
    rhs = problem.rhs(mesh) if source is None else source[np.ix_(*index)]
    g = rhs - problem.two_body(mesh[0], mesh[1]) * u[np.ix_(*index)]
    return g, axes


def _node_values(values: np.ndarray, contour: Contour1D, index: np.ndarray, grid_axis: Contour1D) -> np.ndarray:
    # Rotated axes use interior nodes; ECS real sections map to nodes of the real contour
    return values[1:-1][index] if contour is grid_axis else values[index + 1]


def single_ionization(
    u_contour: Field,
    problem: SchrodingerProblem,
    bound_state: BoundState,
    grid: TensorGrid,
    source: Optional[Field] = None,
) -> complex:
    """
    Single-ionization amplitude s_n.

    Quadrature of φ_{k_n}(x) φ_n(y) [φ(x,y) − V12(x,y) u(x,y)] over a rotated
    grid (complex path) or over the real section of an ECS grid (real path),
    with k_n = √(2(E − λ_n)).

    Args:
        u_contour: Solution on the grid
        problem: 2D benchmark at the solve energy
        bound_state: Real-grid bound state φ_n with energy λ_n
        grid: Rotated or ECS grid the solution lives on
        source: Optional φ values on the grid replacing the problem's own
    """
    if problem.dim != 2:
        raise ConfigurationError("Ionization amplitudes are defined for the 2D model")
    grid.check_field(u_contour, "u_contour")
    gap = problem.energy - bound_state.energy
    if gap < -THRESHOLD_TOL:
        raise ChannelClosedError(f"Channel {bound_state.n} closed: E={problem.energy} <= lambda={bound_state.energy}")
    if gap <= THRESHOLD_TOL:
        return 0j

    g, axes = _effective_source(u_contour, problem, grid, source)
    (ix, cx, wx), (iy, cy, wy) = axes
    k_n = math.sqrt(2.0 * gap)
    wave = _node_values(continuum_wave(problem.one_body, k_n, cx).values, cx, ix, grid.axes[0])
    if cy is grid.axes[1]:
        bound = bound_state_on_contour(bound_state, problem.one_body, cy)[1:-1][iy]
    else:
        bound = np.interp(cy.nodes.real[iy + 1], bound_state.x, bound_state.values)
    return complex(np.einsum("x,y,xy->", wave * wx, bound * wy, g))


def double_ionization(
    u_contour: Field,
    problem: SchrodingerProblem,
    grid: TensorGrid,
    n_alpha: int = 64,
    source: Optional[Field] = None,
) -> DoubleIonization:
    """
    Double-ionization amplitudes f(k1, k2) and cross sections.

    f is sampled at midpoint angles α in (0, π/2) with k1 = √(2E) sin α,
    k2 = √(2E) cos α; σ = (8π²/k0²)|f|²/(k1 k2) with k0 = √(2E); σ_tot uses
    the midpoint rule in ε on (0, E). Below E = 0 the block is empty.
    """
    energy = problem.energy
    if energy <= 0.0:
        empty = np.zeros(0)
        return DoubleIonization(empty, empty.astype(complex), empty, 0.0, False)
    if n_alpha < 8:
        raise ConfigurationError(f"Need at least 8 breakup angles, got {n_alpha}")

    g, axes = _effective_source(u_contour, problem, grid, source)
    (ix, cx, wx), (iy, cy, wy) = axes
    k_max = math.sqrt(2.0 * energy)

    def amplitudes(k1: np.ndarray, k2: np.ndarray) -> np.ndarray:
        w1 = np.stack([_node_values(w.values, cx, ix, grid.axes[0]) for w in continuum_waves(problem.one_body, k1, cx)])
        w2 = np.stack([_node_values(w.values, cy, iy, grid.axes[1]) for w in continuum_waves(problem.one_body, k2, cy)])
        return np.einsum("kx,xy,ky->k", w1 * wx, g, w2 * wy)

    alphas = 0.5 * math.pi * (np.arange(n_alpha) + 0.5) / n_alpha
    k1 = k_max * np.sin(alphas)
    k2 = k_max * np.cos(alphas)
    f = amplitudes(k1, k2)
    prefactor = 8.0 * math.pi ** 2 / k_max ** 2
    sigma = prefactor * np.abs(f) ** 2 / (k1 * k2)

    eps = energy * (np.arange(n_alpha) + 0.5) / n_alpha
    e1 = np.sqrt(2.0 * eps)
    e2 = np.sqrt(2.0 * (energy - eps))
    f_eps = amplitudes(e1, e2)
    sigma_tot = float(np.sum(prefactor * np.abs(f_eps) ** 2 / (e1 * e2)) * energy / n_alpha)
    return DoubleIonization(alphas, f, sigma, sigma_tot, True)


def default_ionization_grid(
    problem: SchrodingerProblem, path: str, n: Optional[int] = None, multigrid: bool = False
) -> TensorGrid:
    """
    Rotated grid with γ = theta_to_gamma(π/7), or the 300 + 150 ECS grid.

    The direct-solve rotated grid shares the ECS mesh width 0.05; with
    ``multigrid`` set it takes 512 intervals and builds coarse levels.
    """
    if path == "complex":
        default = COMPLEX_MULTIGRID_INTERVALS if multigrid else COMPLEX_INTERVALS
        return problem.rotated_grid(n or default, theta_to_gamma(ECS_THETA), multigrid=multigrid)
    if path == "real":
        real = n or ECS_REAL_INTERVALS
        return problem.ecs_grid(real, ECS_THETA, real // 2 if n else ECS_LAYER_INTERVALS)
    raise ConfigurationError(f"Unknown ionization path {path!r}, expected 'complex' or 'real'")


def ionization_at_energy(
    problem: SchrodingerProblem,
    path: str = "complex",
    grid: Optional[TensorGrid] = None,
    n_alpha: int = 64,
    solver: Optional[SolverConfig] = None,
) -> IonizationResult:
    """
    Solve at the problem's energy and evaluate every ionization channel.

    The complex path solves on a rotated grid (direct solve unless the
    solver config asks for multigrid); the real path solves the ECS system
    directly and integrates over its real section.
    """
    if path not in IONIZATION_PATHS:
        raise ConfigurationError(f"Unknown ionization path {path!r}, expected one of {IONIZATION_PATHS}")
    solver = solver or SolverConfig(method="direct")
    grid = grid or default_ionization_grid(problem, path, multigrid=path == "complex" and solver.method == "multigrid")
    axis = grid.axes[0]
    states = bound_states_1d(problem.one_body, axis.b, axis.n_intervals)

    if path == "complex" and solver.method == "multigrid":
        cycle, smoother = specs_from_config(solver)
        u, report = solve_schrodinger(problem, grid, solver.tol, solver.max_iters, cycle, smoother)
    else:
        u, report = solve_direct(problem, grid)

    channels = []
    for state in states:
        is_open = problem.energy > state.energy
        channel = ChannelAmplitude(state.n, state.energy, is_open)
        if is_open:
            channel.k = math.sqrt(2.0 * (problem.energy - state.energy))
            channel.amplitude = single_ionization(u, problem, state, grid)
        channels.append(channel)

    double = double_ionization(u, problem, grid, n_alpha)
    logger.info(
        f"E={problem.energy:+.4f} ({path}): "
        + ", ".join(f"|s_{c.n}|^2={c.s_abs2:.3e}" for c in channels)
        + f", sigma_tot={double.sigma_tot:.3e}"
    )
    return IonizationResult(problem.energy, path, channels, double, report=report.to_dict(), solve_report=report)


# ----------------------------------------------------------------- scans

def _scan_point(
    problem: SchrodingerProblem,
    energy: float,
    grid: TensorGrid,
    cycle: CycleSpec,
    smoother: SmootherSpec,
    rate_cycles: Optional[int],
    fmg_start: bool,
    ionization_path: Optional[str],
    solver: Optional[SolverConfig],
    n_alpha: int,
) -> ScanPoint:
    point_problem = problem.with_energy(energy)
    point = ScanPoint(energy)
    try:
        if ionization_path is not None:
            point.ionization = ionization_at_energy(point_problem, ionization_path, grid, n_alpha, solver)
            point.report = point.ionization.solve_report
        elif rate_cycles is not None:
            point.report = measure_rate(point_problem, grid, rate_cycles, fmg_start, cycle, smoother)
        else:
            tol = solver.tol if solver else 1e-6
            max_iters = solver.max_iters if solver else 50
            _, point.report = solve_schrodinger(point_problem, grid, tol, max_iters, cycle, smoother)
    except NumericalError as e:
        logger.error(f"Scan point E={energy} failed: {e}")
        point.error = str(e)

    if point.report is not None:
        logger.info(f"E={energy:+.4f}: factor {point.report.avg_factor:.3f}, converged={point.report.converged}")
    return point


async def _run_scan(points: List[Callable[[], ScanPoint]], threads: int) -> List[ScanPoint]:
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        tasks = [loop.run_in_executor(pool, point) for point in points]
        return list(await asyncio.gather(*tasks))


def energy_scan(
    problem: SchrodingerProblem,
    energies: Sequence[float],
    grid: TensorGrid,
    cycle: Optional[CycleSpec] = None,
    smoother: Optional[SmootherSpec] = None,
    rate_cycles: Optional[int] = None,
    fmg_start: bool = False,
    ionization_path: Optional[str] = None,
    solver: Optional[SolverConfig] = None,
    n_alpha: int = 64,
    threads: int = 1,
) -> List[ScanPoint]:
    """
    Evaluate a problem family over a monotone list of energies.

    Each point either measures the average V-cycle factor over
    ``rate_cycles`` cycles, evaluates ionization observables along
    ``ionization_path``, or runs a plain solve. Points are independent and
    run on a pool of ``threads`` workers; results keep the input order and
    failures are recorded per point.
    """
    energies = [float(e) for e in energies]
    if any(b < a for a, b in zip(energies, energies[1:])):
        raise ConfigurationError("Energy list must be monotone non-decreasing")
    if not energies:
        return []

    cycle = cycle or CycleSpec()
    smoother = smoother or SmootherSpec()
    points = [
        partial(_scan_point, problem, e, grid, cycle, smoother, rate_cycles, fmg_start, ionization_path, solver, n_alpha)
        for e in energies
    ]
    return asyncio.run(_run_scan(points, max(1, threads)))
