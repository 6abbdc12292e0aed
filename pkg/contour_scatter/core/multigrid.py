"""
Geometric multigrid on rediscretized complex-grid operators.

Full-weighting restriction, linear prolongation (tensorized per axis),
ω-Jacobi and GMRES(m) smoothers, V(ν1,ν2)-cycles with a dense LU solve on the
coarsest level, full multigrid in tolerance and F(s) modes, and work-unit
accounting.

Work units count operator-sized node visits: every stencil application,
residual, restriction, prolongation and the coarsest solve costs the number
of cells of its level. One WU is one V-cycle iteration (cycle plus residual
check) on the 16-interval 3D calibration hierarchy with the same specs.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg as la

from .config import SolverConfig
from .contour_grid import Field, TensorGrid
from .errors import ConfigurationError, ShapeMismatchError, SingularSmootherError, SingularSystemError
from .helmholtz_operator import KSquaredFn, StencilOperator, build_operator, norm

logger = logging.getLogger(__name__)

CALIBRATION_INTERVALS = 16
MAX_DENSE_UNKNOWNS = 4096
DIVERGENCE_LIMIT = 1e8


class SmootherKind(Enum):
    """Available smoothers."""
    OMEGA_JACOBI = "jacobi"
    GMRES_M = "gmres"


@dataclass(frozen=True)
class SmootherSpec:
    kind: SmootherKind = SmootherKind.GMRES_M
    omega: float = 2.0 / 3.0
    m: int = 3

    def __post_init__(self):
        if not 0.0 < self.omega <= 1.0:
            raise ConfigurationError(f"Jacobi weight must lie in (0, 1], got {self.omega}")
        if self.m < 1:
            raise ConfigurationError(f"GMRES smoother needs m >= 1, got {self.m}")

    @property
    def applications(self) -> int:
        """Operator applications per smoothing step."""
        return self.m + 1 if self.kind is SmootherKind.GMRES_M else 1


@dataclass(frozen=True)
class CycleSpec:
    nu1: int = 1
    nu2: int = 1
    cycles_per_level: Optional[int] = None
    coarsest_interior: int = 7

    def __post_init__(self):
        if self.nu1 < 0 or self.nu2 < 0 or self.nu1 + self.nu2 < 1:
            raise ConfigurationError(f"Need nu1, nu2 >= 0 and nu1 + nu2 >= 1, got ({self.nu1}, {self.nu2})")
        if not 1 <= self.coarsest_interior <= 7:
            raise ConfigurationError(f"Coarsest level must have 1 to 7 unknowns per axis, got {self.coarsest_interior}")
        if self.cycles_per_level is not None and self.cycles_per_level < 1:
            raise ConfigurationError("cycles_per_level must be positive")


def specs_from_config(config: SolverConfig) -> Tuple[CycleSpec, SmootherSpec]:
    cycle = CycleSpec(
        nu1=config.nu1,
        nu2=config.nu2,
        cycles_per_level=config.cycles_per_level,
        coarsest_interior=config.coarsest_interior,
    )
    smoother = SmootherSpec(kind=SmootherKind(config.smoother), omega=config.omega, m=config.m)
    return cycle, smoother


@dataclass
class ConvergenceReport:
    """Outcome of an iterative solve."""
    iterations: int = 0
    residual_history: List[float] = field(default_factory=list)
    work_units: float = 0.0
    avg_factor: float = 0.0
    converged: bool = False
    method: str = "vcycle"
    level_iterations: List[int] = field(default_factory=list)
    wall_time: Optional[float] = None
    # "true" or "preconditioned"; preconditioned histories are relative to 1
    residual_kind: str = "true"
    true_relative_residual: Optional[float] = None

    @property
    def initial_residual(self) -> float:
        return self.residual_history[0] if self.residual_history else 0.0

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1] if self.residual_history else 0.0

    @property
    def relative_residual(self) -> float:
        r0 = self.initial_residual
        return self.final_residual / r0 if r0 > 0.0 else 0.0

    def finalize(self):
        """Derive the average factor (‖r_k‖/‖r_0‖)^{1/k} from the history."""
        k = self.iterations
        r0 = self.initial_residual
        if k > 0 and r0 > 0.0:
            ratio = self.residual_history[k] / r0 if len(self.residual_history) > k else self.relative_residual
            self.avg_factor = float(ratio ** (1.0 / k)) if math.isfinite(ratio) else math.inf
        else:
            self.avg_factor = 0.0
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "iterations": self.iterations,
            "converged": self.converged,
            "avg_factor": self.avg_factor,
            "work_units": self.work_units,
            "initial_residual": self.initial_residual,
            "final_residual": self.final_residual,
            "relative_residual": self.relative_residual,
            "level_iterations": list(self.level_iterations),
            "residual_history": list(self.residual_history),
            "residual_kind": self.residual_kind,
            "true_relative_residual": self.true_relative_residual,
        }

    def residual_rows(self) -> List[Tuple[int, float]]:
        return list(enumerate(self.residual_history))


# ----------------------------------------------------------------- transfers

def _restrict_axis(v: np.ndarray, axis: int) -> np.ndarray:
    v = np.moveaxis(v, axis, 0)
    if v.shape[0] % 2 == 0 or v.shape[0] < 3:
        raise ShapeMismatchError(f"Cannot restrict axis with {v.shape[0]} unknowns")
    coarse = 0.25 * v[0:-2:2] + 0.5 * v[1:-1:2] + 0.25 * v[2::2]
    return np.moveaxis(coarse, 0, axis)


def _prolong_axis(c: np.ndarray, axis: int) -> np.ndarray:
    c = np.moveaxis(c, axis, 0)
    n = c.shape[0]
    fine = np.zeros((2 * n + 1,) + c.shape[1:], dtype=np.result_type(c, float))
    fine[1::2] = c
    fine[2:-1:2] = 0.5 * (c[:-1] + c[1:])
    fine[0] = 0.5 * c[0]
    fine[-1] = 0.5 * c[-1]
    return np.moveaxis(fine, 0, axis)


def restrict(fine: Field) -> Field:
    """Full weighting, tensor product of [1/4, 1/2, 1/4]."""
    for axis in range(fine.ndim):
        fine = _restrict_axis(fine, axis)
    return fine


def prolong(coarse: Field) -> Field:
    """Linear (bi-/trilinear) interpolation to the next finer level."""
    for axis in range(coarse.ndim):
        coarse = _prolong_axis(coarse, axis)
    return coarse


# ----------------------------------------------------------------- hierarchy

class Level:
    """One grid level; counts its operator applications in node visits."""

    def __init__(self, operator: StencilOperator, source: Optional[Field] = None):
        self.operator = operator
        self.grid = operator.grid
        self.source = source
        self.cells = operator.grid.cells
        self.visits = 0

    def apply(self, u: Field) -> Field:
        self.visits += self.cells
        return self.operator.apply(u)

    def diagonal(self) -> np.ndarray:
        return self.operator.diagonal()

    def charge(self, count: int = 1):
        self.visits += count * self.cells


class Hierarchy:
    """Levels from finest (index 0) to coarsest, with the coarsest LU factors."""

    def __init__(self, levels: List[Level]):
        self.levels = levels
        coarse = levels[-1].operator
        matrix = coarse.assemble().toarray()
        lu, piv = la.lu_factor(matrix, check_finite=True)
        if np.any(np.diag(lu) == 0.0):
            raise SingularSystemError(f"Coarsest operator ({matrix.shape[0]} unknowns) is singular")
        self._lu = (lu, piv)

    @property
    def coarsest(self) -> int:
        return len(self.levels) - 1

    @property
    def visits(self) -> int:
        return sum(level.visits for level in self.levels)

    def reset_work(self):
        for level in self.levels:
            level.visits = 0

    def coarse_solve(self, f: Field) -> Field:
        level = self.levels[-1]
        level.charge()
        return la.lu_solve(self._lu, f.ravel()).reshape(f.shape)


def build_hierarchy(
    grid: TensorGrid,
    k_squared_fn: KSquaredFn,
    cycle: CycleSpec = CycleSpec(),
    source_fn: Optional[Callable[[List[np.ndarray]], np.ndarray]] = None,
) -> Hierarchy:
    """
    Rediscretize −Δ − k² on successively coarsened grids.

    Coarsening stops once every axis has at most ``coarsest_interior``
    unknowns or an axis can no longer be halved.
    """
    levels: List[Level] = []
    current = grid
    while True:
        operator = build_operator(current, k_squared_fn)
        source = None
        if source_fn is not None:
            source = np.broadcast_to(source_fn(current.coordinates()), current.interior_shape).astype(complex)
        levels.append(Level(operator, source))
        coarse_enough = max(current.interior_shape) <= cycle.coarsest_interior
        if coarse_enough or not current.can_coarsen():
            break
        current = current.coarsen()

    if levels[-1].grid.size > MAX_DENSE_UNKNOWNS:
        raise ConfigurationError(
            f"Coarsest level has {levels[-1].grid.size} unknowns; "
            f"grid {grid.interior_shape} does not coarsen far enough"
        )
    logger.debug(f"Hierarchy of {len(levels)} levels, coarsest {levels[-1].grid.interior_shape}")
    return Hierarchy(levels)


# ----------------------------------------------------------------- smoothers

def _jacobi(op, u: Field, f: Field, omega: float, sweeps: int) -> Field:
    diagonal = op.diagonal()
    if np.any(diagonal == 0.0):
        raise SingularSmootherError("Operator diagonal has zero entries")
    for _ in range(sweeps):
        u = u + omega * (f - op.apply(u)) / diagonal
    return u


def gmres_cycle(op, u: Field, f: Field, m: int) -> Field:
    """
    One restart cycle of GMRES(m) for A u = f started from u.

    Arnoldi with modified Gram-Schmidt and conjugated inner products; the
    small least-squares problem is solved directly.
    """
    shape = u.shape
    r = (f - op.apply(u)).ravel()
    beta = np.linalg.norm(r)
    if beta == 0.0:
        return u

    m = min(m, r.size)
    basis = np.zeros((m + 1, r.size), dtype=complex)
    hessenberg = np.zeros((m + 1, m), dtype=complex)
    basis[0] = r / beta
    steps = m
    for j in range(m):
        w = op.apply(basis[j].reshape(shape)).ravel()
        for i in range(j + 1):
            hessenberg[i, j] = np.vdot(basis[i], w)
            w = w - hessenberg[i, j] * basis[i]
        hessenberg[j + 1, j] = np.linalg.norm(w)
        if abs(hessenberg[j + 1, j]) <= 1e-14 * beta:
            # Lucky breakdown: the Krylov space holds the exact solution
            steps = j + 1
            break
        basis[j + 1] = w / hessenberg[j + 1, j]

    rhs = np.zeros(steps + 1, dtype=complex)
    rhs[0] = beta
    y = la.lstsq(hessenberg[: steps + 1, :steps], rhs)[0]
    return u + (basis[:steps].T @ y).reshape(shape)


def smooth(op, u: Field, f: Field, spec: SmootherSpec, sweeps: int) -> Field:
    """
    Apply ``sweeps`` smoothing steps.

    Args:
        op: StencilOperator or hierarchy Level
        u: Current iterate
        f: Right-hand side
        spec: Smoother choice
        sweeps: Number of steps (GMRES: restart cycles)
    """
    if sweeps <= 0:
        return u
    if spec.kind is SmootherKind.OMEGA_JACOBI:
        return _jacobi(op, u, f, spec.omega, sweeps)
    for _ in range(sweeps):
        u = gmres_cycle(op, u, f, spec.m)
    return u


# ----------------------------------------------------------------- cycles

def vcycle(
    hierarchy: Hierarchy,
    u: Field,
    f: Field,
    cycle: CycleSpec = CycleSpec(),
    smoother: SmootherSpec = SmootherSpec(),
    level: int = 0,
) -> Field:
    """One V(ν1,ν2)-cycle starting at ``level``."""
    if level == hierarchy.coarsest:
        return hierarchy.coarse_solve(f)

    current = hierarchy.levels[level]
    u = smooth(current, u, f, smoother, cycle.nu1)
    r = f - current.apply(u)
    current.charge()
    r_coarse = restrict(r)
    e_coarse = vcycle(hierarchy, np.zeros_like(r_coarse), r_coarse, cycle, smoother, level + 1)
    current.charge()
    u = u + prolong(e_coarse)
    return smooth(current, u, f, smoother, cycle.nu2)


def calibration_visits(cycle: CycleSpec, smoother: SmootherSpec) -> float:
    """Node visits of one V-cycle iteration on the 3D calibration hierarchy."""
    per_level = cycle.nu1 * smoother.applications + 3 + cycle.nu2 * smoother.applications
    n = CALIBRATION_INTERVALS
    visits = n ** 3  # residual check
    while n - 1 > cycle.coarsest_interior and n % 2 == 0:
        visits += per_level * n ** 3
        n //= 2
    return float(visits + n ** 3)


def work_units(visits: float, cycle: CycleSpec = CycleSpec(), smoother: SmootherSpec = SmootherSpec()) -> float:
    """Node visits normalized by the calibration V-cycle."""
    return visits / calibration_visits(cycle, smoother)


def run_vcycles(
    hierarchy: Hierarchy,
    u: Field,
    f: Field,
    tol: float,
    max_iters: int,
    cycle: CycleSpec = CycleSpec(),
    smoother: SmootherSpec = SmootherSpec(),
    level: int = 0,
    fixed_cycles: Optional[int] = None,
) -> Tuple[Field, ConvergenceReport]:
    """
    Iterate V-cycles on one level of a hierarchy.

    Stops when ‖r_k‖/‖r_0‖ ≤ tol, after max_iters cycles, or when the
    residual blows up. With ``fixed_cycles`` exactly that many cycles run.
    Work units are not filled in here.
    """
    current = hierarchy.levels[level]
    report = ConvergenceReport()
    # A zero initial guess needs no operator application
    r0 = norm(f - current.apply(u)) if np.any(u) else norm(f)
    report.residual_history.append(r0)
    if r0 == 0.0:
        report.converged = True
        return u, report

    limit = fixed_cycles if fixed_cycles is not None else max_iters
    rk = r0
    while report.iterations < limit:
        if fixed_cycles is None and rk / r0 <= tol:
            break
        u = vcycle(hierarchy, u, f, cycle, smoother, level)
        rk = norm(f - current.apply(u))
        report.iterations += 1
        report.residual_history.append(rk)
        logger.debug(f"level {level} cycle {report.iterations}: |r|/|r0| = {rk / r0:.3e}")
        if not math.isfinite(rk) or rk / r0 > DIVERGENCE_LIMIT:
            logger.warning(f"V-cycles diverged after {report.iterations} cycles")
            break

    report.converged = math.isfinite(rk) and rk / r0 <= tol
    return u, report.finalize()


def _specs(cycle: Optional[CycleSpec], smoother: Optional[SmootherSpec]) -> Tuple[CycleSpec, SmootherSpec]:
    return cycle or CycleSpec(), smoother or SmootherSpec()


def solve_vcycles(
    problem,
    grid: TensorGrid,
    tol: float = 1e-6,
    max_iters: int = 50,
    cycle: Optional[CycleSpec] = None,
    smoother: Optional[SmootherSpec] = None,
    u0: Optional[Field] = None,
) -> Tuple[Field, ConvergenceReport]:
    """
    Solve a problem with repeated V-cycles from a zero initial guess.

    Args:
        problem: Object providing ``k_squared(coords)`` and ``source(coords)``
        grid: Finest grid
        tol: Relative residual reduction target
        max_iters: Cycle limit; non-convergence is reported, not raised
        cycle: Cycle parameters
        smoother: Smoother parameters
        u0: Optional initial guess

    Returns:
        Solution on the interior nodes and its convergence report
    """
    if tol <= 0.0:
        raise ConfigurationError(f"Tolerance must be positive, got {tol}")
    cycle, smoother = _specs(cycle, smoother)
    hierarchy = build_hierarchy(grid, problem.k_squared, cycle, problem.source)
    f = hierarchy.levels[0].source
    u = np.zeros(grid.interior_shape, dtype=complex) if u0 is None else u0.astype(complex)

    u, report = run_vcycles(hierarchy, u, f, tol, max_iters, cycle, smoother)
    report.work_units = work_units(hierarchy.visits, cycle, smoother)
    logger.info(
        f"V-cycles on {grid.interior_shape}: {report.iterations} iterations, "
        f"factor {report.avg_factor:.3f}, {report.work_units:.1f} WU, converged={report.converged}"
    )
    return u, report


def fmg(
    problem,
    finest_grid: TensorGrid,
    tol: float = 1e-6,
    max_iters: int = 50,
    cycle: Optional[CycleSpec] = None,
    smoother: Optional[SmootherSpec] = None,
) -> Tuple[Field, ConvergenceReport]:
    """
    Full multigrid: solve the coarsest level exactly, then on every finer
    level start from the prolongated solution and run V-cycles.

    In tolerance mode each level iterates until its residual drops by
    ``tol`` relative to the prolongated initial guess; with
    ``cycle.cycles_per_level = s`` exactly s cycles run per level (F(s)).
    The report history holds the finest level's residuals, starting with the
    norm of the right-hand side.
    """
    cycle, smoother = _specs(cycle, smoother)
    hierarchy = build_hierarchy(finest_grid, problem.k_squared, cycle, problem.source)
    levels = hierarchy.levels

    u = hierarchy.coarse_solve(levels[-1].source)
    level_iterations = [0]
    finest_report = ConvergenceReport()
    for index in range(hierarchy.coarsest - 1, -1, -1):
        levels[index].charge()
        u = prolong(u)
        u, finest_report = run_vcycles(
            hierarchy,
            u,
            levels[index].source,
            tol,
            max_iters,
            cycle,
            smoother,
            level=index,
            fixed_cycles=cycle.cycles_per_level,
        )
        level_iterations.append(finest_report.iterations)

    report = finest_report
    report.method = "fmg" if cycle.cycles_per_level is None else f"F({cycle.cycles_per_level})"
    report.level_iterations = level_iterations[::-1]
    f_norm = norm(levels[0].source)
    if hierarchy.coarsest == 0:
        report.residual_history = [f_norm, norm(levels[0].source - levels[0].apply(u))]
        report.converged = True
    else:
        report.residual_history = [f_norm] + report.residual_history
        if cycle.cycles_per_level is not None:
            report.converged = math.isfinite(report.final_residual) and report.final_residual <= tol * f_norm
    report.avg_factor = _fmg_factor(report)
    report.work_units = work_units(hierarchy.visits, cycle, smoother)
    logger.info(
        f"{report.method} on {finest_grid.interior_shape}: {report.iterations} finest cycles, "
        f"|r|/|f| = {report.relative_residual:.2e}, {report.work_units:.1f} WU"
    )
    return u, report


def _fmg_factor(report: ConvergenceReport) -> float:
    # history = [|f|, |r| after prolongation, |r_1|, ...]; factor over finest cycles only
    history = report.residual_history
    k = report.iterations
    if k == 0 or len(history) < k + 2 or history[1] == 0.0:
        return 0.0
    return float((history[-1] / history[1]) ** (1.0 / k))


def measure_rate(
    problem,
    grid: TensorGrid,
    cycles: int = 4,
    fmg_start: bool = False,
    cycle: Optional[CycleSpec] = None,
    smoother: Optional[SmootherSpec] = None,
) -> ConvergenceReport:
    """
    Average V-cycle convergence factor over ``cycles`` consecutive cycles.

    The measurement starts from zero, or from an F(5) full multigrid solution when
    ``fmg_start`` is set. ``converged`` reports a factor below one.
    """
    cycle, smoother = _specs(cycle, smoother)
    u = None
    if fmg_start:
        start_cycle = CycleSpec(cycle.nu1, cycle.nu2, 5, cycle.coarsest_interior)
        u, _ = fmg(problem, grid, cycle=start_cycle, smoother=smoother)

    hierarchy = build_hierarchy(grid, problem.k_squared, cycle, problem.source)
    f = hierarchy.levels[0].source
    if u is None:
        u = np.zeros(grid.interior_shape, dtype=complex)
    u, report = run_vcycles(hierarchy, u, f, 0.0, cycles, cycle, smoother, fixed_cycles=cycles)
    report.method = "rate"
    report.converged = report.avg_factor < 1.0
    report.work_units = work_units(hierarchy.visits, cycle, smoother)
    return report


def dense_solve(op: StencilOperator, f: Field) -> Field:
    """Dense LU solve, used for tiny systems and as a test oracle."""
    if op.grid.size > MAX_DENSE_UNKNOWNS:
        raise ConfigurationError(f"Dense solve limited to {MAX_DENSE_UNKNOWNS} unknowns")
    matrix = op.assemble().toarray()
    try:
        return la.solve(matrix, f.ravel()).reshape(f.shape)
    except la.LinAlgError as e:
        raise SingularSystemError(str(e)) from e

