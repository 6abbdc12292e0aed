"""
Reference solves of the classical real-grid + ECS formulation.

Small problems are factorized directly; larger ones use restarted GMRES
preconditioned by a V-cycle on the rotated companion grid.
"""
import logging
import math
from typing import List, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .contour_grid import Field, TensorGrid, rotated_companion
from .errors import ConfigurationError, ProblemTooLargeError, SingularSystemError
from .helmholtz_operator import StencilOperator, build_operator, norm
from .multigrid import (
    ConvergenceReport,
    CycleSpec,
    SmootherSpec,
    build_hierarchy,
    vcycle,
    work_units,
)

logger = logging.getLogger(__name__)

MAX_DIRECT_UNKNOWNS = 300_000
PRECONDITIONERS = ("multigrid", "exact", "none")


def _factorize(matrix: sp.spmatrix):
    try:
        # Default COLAMD column ordering keeps 2D fill manageable
        return spla.splu(sp.csc_matrix(matrix, dtype=complex))
    except RuntimeError as e:
        raise SingularSystemError(f"Direct factorization failed: {e}") from e


def direct_solve_small(op: Union[StencilOperator, sp.spmatrix], f: Field) -> Field:
    """
    Sparse LU solve of A u = f.

    Args:
        op: Operator (assembled here) or an already assembled sparse matrix
        f: Right-hand side; its shape is kept for the solution

    Returns:
        Solution with the shape of f
    """
    n = op.grid.size if isinstance(op, StencilOperator) else op.shape[0]
    if n > MAX_DIRECT_UNKNOWNS:
        raise ProblemTooLargeError(f"{n} unknowns exceed the direct-solve limit of {MAX_DIRECT_UNKNOWNS}")
    matrix = op.assemble() if isinstance(op, StencilOperator) else sp.csr_matrix(op, dtype=complex)
    if f.size != n:
        raise ConfigurationError(f"Right-hand side has {f.size} entries, matrix has {n} rows")

    rhs = f.ravel().astype(complex)
    u = _factorize(matrix).solve(rhs)
    if not np.all(np.isfinite(u)):
        raise SingularSystemError("Direct solve produced non-finite values")

    f_norm = np.linalg.norm(rhs)
    if f_norm > 0.0:
        rel = np.linalg.norm(rhs - matrix @ u) / f_norm
        logger.debug(f"Direct solve of {n} unknowns, relative residual {rel:.2e}")
    return u.reshape(f.shape)


def solve_direct(problem, grid: TensorGrid) -> Tuple[Field, ConvergenceReport]:
    """Direct solve of a problem on any grid, with a one-step report."""
    op = build_operator(grid, problem.k_squared)
    f = np.broadcast_to(problem.source(grid.coordinates()), grid.interior_shape).astype(complex)
    u = direct_solve_small(op, f)
    f_norm = norm(f)
    report = ConvergenceReport(
        iterations=1,
        residual_history=[f_norm, norm(f - op.apply(u))],
        converged=True,
        method="direct",
    )
    return u, report.finalize()


def solve_ecs_krylov(
    problem,
    ecs_grid: TensorGrid,
    tol: float = 1e-6,
    restart: int = 20,
    max_iters: int = 300,
    preconditioner: str = "multigrid",
    cycle: Optional[CycleSpec] = None,
    smoother: Optional[SmootherSpec] = None,
) -> Tuple[Field, ConvergenceReport]:
    """
    Restarted GMRES on the ECS system.

    Args:
        problem: Object providing ``k_squared`` and ``source``
        ecs_grid: Real grid with ECS layers
        tol: Relative residual target
        restart: GMRES restart length
        max_iters: Limit on inner iterations
        preconditioner: "multigrid" (one V-cycle of the rotated companion
            grid), "exact" (LU of the ECS matrix) or "none"
        cycle: V-cycle parameters of the preconditioner
        smoother: Smoother of the preconditioner

    Returns:
        Solution and report; breakdown or stagnation sets converged=False
    """
    if tol <= 0.0:
        raise ConfigurationError(f"Tolerance must be positive, got {tol}")
    if preconditioner not in PRECONDITIONERS:
        raise ConfigurationError(f"Unknown preconditioner {preconditioner!r}, expected one of {PRECONDITIONERS}")

    cycle = cycle or CycleSpec()
    smoother = smoother or SmootherSpec()
    op = build_operator(ecs_grid, problem.k_squared)
    shape = ecs_grid.interior_shape
    f = np.broadcast_to(problem.source(ecs_grid.coordinates()), shape).astype(complex)
    report = ConvergenceReport(method=f"gmres({restart})+{preconditioner}")

    f_norm = norm(f)
    if f_norm == 0.0:
        report.residual_history = [0.0]
        report.converged = True
        return np.zeros(shape, dtype=complex), report

    n = ecs_grid.size
    matrix = spla.LinearOperator((n, n), matvec=lambda v: op.apply(v.reshape(shape)).ravel(), dtype=complex)

    hierarchy = None
    M = None
    if preconditioner == "multigrid":
        companion = rotated_companion(ecs_grid)
        hierarchy = build_hierarchy(companion, problem.k_squared, cycle)
        zeros = np.zeros(shape, dtype=complex)
        M = spla.LinearOperator(
            (n, n),
            matvec=lambda v: vcycle(hierarchy, zeros, v.reshape(shape), cycle, smoother).ravel(),
            dtype=complex,
        )
    elif preconditioner == "exact":
        lu = _factorize(op.assemble())
        M = spla.LinearOperator((n, n), matvec=lu.solve, dtype=complex)

    history: List[float] = [1.0]
    u, info = spla.gmres(
        matrix,
        f.ravel(),
        M=M,
        rtol=tol,
        atol=0.0,
        restart=restart,
        maxiter=max(1, math.ceil(max_iters / restart)),
        callback=history.append,
        callback_type="pr_norm",
    )

    true_residual = norm(f - op.apply(u.reshape(shape)))
    report.iterations = len(history) - 1
    report.residual_history = history
    report.residual_kind = "preconditioned"
    report.true_relative_residual = true_residual / f_norm
    report.converged = info == 0
    report.finalize()
    if info != 0:
        logger.warning(f"ECS GMRES stopped with info={info} after {report.iterations} iterations")
    if hierarchy is not None:
        report.work_units = work_units(hierarchy.visits, cycle, smoother)
    logger.info(
        f"ECS GMRES on {shape}: {report.iterations} iterations, "
        f"true relative residual {true_residual / f_norm:.2e}, converged={report.converged}"
    )
    return u.reshape(shape), report
