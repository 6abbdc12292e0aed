"""
Direct and Krylov reference solves of the ECS formulation.
"""
import math

import numpy as np
import pytest
import scipy.sparse as sp

from ..core.contour_grid import ContourKind, build_grid
from ..core.errors import ConfigurationError, ProblemTooLargeError, SingularSystemError
from ..core.helmholtz_operator import StencilOperator, build_operator
from ..core.model_problems import HelmholtzProblem
from ..core.multigrid import dense_solve
from ..core.reference_solver import direct_solve_small, solve_direct, solve_ecs_krylov


def _relative_error(u, reference):
    return np.linalg.norm(u - reference) / np.linalg.norm(reference)


class TestDirectSolve:

    def test_matches_dense_solve(self, rng):
        grid = build_grid(2, ContourKind.ECS_REAL, -1.0, 1.0, 8, math.pi / 4, two_sided=True)
        op = StencilOperator(grid, 1.0 + rng.standard_normal(grid.interior_shape))
        f = rng.standard_normal(grid.interior_shape) + 1j * rng.standard_normal(grid.interior_shape)
        np.testing.assert_allclose(direct_solve_small(op, f), dense_solve(op, f), rtol=1e-10, atol=1e-12)

    def test_accepts_assembled_matrix(self):
        matrix = sp.diags([2.0, 4.0, 8.0])
        u = direct_solve_small(matrix, np.array([2.0, 2.0, 2.0]))
        np.testing.assert_allclose(u, [1.0, 0.5, 0.25])
        u = direct_solve_small(sp.identity(2, format="csr"), np.array([1.0j, 2.0]))
        np.testing.assert_allclose(u, [1.0j, 2.0])

    def test_errors(self):
        with pytest.raises(ProblemTooLargeError):
            direct_solve_small(sp.identity(300_001, format="csr"), np.ones(300_001))
        with pytest.raises(ConfigurationError):
            direct_solve_small(sp.identity(3, format="csr"), np.ones(4))
        with pytest.raises(SingularSystemError):
            direct_solve_small(sp.csr_matrix((3, 3)), np.ones(3))

    def test_solve_direct_report(self):
        problem = HelmholtzProblem()
        grid = problem.ecs_grid(32, math.pi / 4)
        u, report = solve_direct(problem, grid)
        assert u.shape == grid.interior_shape
        assert report.method == "direct"
        assert report.converged and report.iterations == 1
        assert report.relative_residual < 1e-10


class TestKrylovSolve:
    """Test preconditioned GMRES on the ECS system."""

    def test_exact_preconditioner_converges_at_once(self):
        problem = HelmholtzProblem()
        grid = problem.ecs_grid(32, math.pi / 4)
        u, report = solve_ecs_krylov(problem, grid, tol=1e-8, preconditioner="exact")
        reference, _ = solve_direct(problem, grid)
        assert report.converged
        assert report.iterations <= 3
        assert _relative_error(u, reference) <= 1e-6

    def test_multigrid_preconditioner(self):
        problem = HelmholtzProblem(k0=0.25)
        grid = problem.ecs_grid(32, math.pi / 6)
        u, report = solve_ecs_krylov(problem, grid, tol=1e-8)
        reference, _ = solve_direct(problem, grid)
        assert report.converged
        assert report.method == "gmres(20)+multigrid"
        assert report.work_units > 0.0
        assert report.residual_kind == "preconditioned"
        assert report.residual_history[0] == 1.0
        op = build_operator(grid, problem.k_squared)
        f = np.broadcast_to(problem.source(grid.coordinates()), grid.interior_shape).astype(complex)
        true_residual = np.linalg.norm(f - op.apply(u)) / np.linalg.norm(f)
        assert report.to_dict()["true_relative_residual"] == pytest.approx(true_residual, rel=1e-6)
        assert _relative_error(u, reference) <= 1e-4

    def test_zero_source(self):
        problem = HelmholtzProblem(amplitude=0.0)
        u, report = solve_ecs_krylov(problem, problem.ecs_grid(16, math.pi / 4))
        assert not u.any()
        assert report.converged and report.iterations == 0

    def test_invalid_arguments(self):
        problem = HelmholtzProblem()
        grid = problem.ecs_grid(16, math.pi / 4)
        with pytest.raises(ConfigurationError):
            solve_ecs_krylov(problem, grid, preconditioner="ilu")
        with pytest.raises(ConfigurationError):
            solve_ecs_krylov(problem, grid, tol=-1.0)
