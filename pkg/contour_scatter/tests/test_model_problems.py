"""
Built-in Helmholtz and Schrödinger model problems.
"""
import numpy as np
import pytest

from ..core.config import ProblemConfig
from ..core.errors import ConfigurationError
from ..core.model_problems import (
    HelmholtzProblem,
    SchrodingerProblem,
    chi_2d,
    helmholtz_rhs,
    incoming_wave,
    model_potentials_2d3d,
    model_potentials_3d,
    problem_from_config,
)


class TestHelmholtzProblem:
    """Test the two-dots scattering object."""

    def test_object_at_dot_centers(self):
        assert chi_2d(0.0, 4.0) == pytest.approx(-0.2, abs=1e-12)
        assert chi_2d(0.0, -4.0) == pytest.approx(-0.2, abs=1e-12)
        assert abs(chi_2d(15.0, 0.0)) < 1e-30

    def test_incoming_wave_on_real_points(self, rng):
        points = rng.uniform(-20.0, 20.0, size=(2, 50))
        values = incoming_wave(points, 1.5, (0.6, 0.8))
        np.testing.assert_allclose(np.abs(values), 1.0, rtol=1e-14)
        with pytest.raises(ConfigurationError):
            incoming_wave(points, 1.0, (1.0, 0.0, 0.0))

    def test_k_squared_and_source(self):
        problem = HelmholtzProblem(k0=2.0)
        coords = [np.array([0.0]), np.array([4.0])]
        assert problem.k_squared(coords)[0] == pytest.approx(4.0 - 0.2)
        assert problem.object_function(coords)[0] == pytest.approx(-0.05)
        assert problem.source(coords)[0] == pytest.approx(-0.2)

    def test_rhs_on_rotated_grid(self):
        problem = HelmholtzProblem()
        grid = problem.rotated_grid(16, 0.2)
        rhs = helmholtz_rhs(problem, grid)
        assert rhs.shape == (15, 15)
        assert rhs.dtype == complex
        with pytest.raises(ConfigurationError):
            helmholtz_rhs(HelmholtzProblem(dim=3, eta=(1.0, 0.0, 0.0)), grid)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            HelmholtzProblem(dim=4)
        with pytest.raises(ConfigurationError):
            HelmholtzProblem(dim=3)

    def test_ecs_grid_is_two_sided(self):
        grid = HelmholtzProblem().ecs_grid(64, np.pi / 4)
        axis = grid.axes[0]
        assert axis.n_ecs == 16 and axis.n_ecs_left == 16
        assert grid.interior_shape == (95, 95)


class TestSchrodingerProblem:
    """Test the three-particle benchmark potentials."""

    def test_potentials(self):
        problem = SchrodingerProblem()
        assert problem.one_body(0.0) == pytest.approx(-4.5)
        assert problem.two_body(1.0, -1.0) == pytest.approx(2.0)
        coords = [np.array([0.0]), np.array([0.0])]
        assert problem.potential(coords)[0] == pytest.approx(-9.0 + 2.0)

    def test_k_squared_is_twice_kinetic_energy(self, rng):
        problem = SchrodingerProblem(energy=0.7)
        coords = list(rng.uniform(0.0, 3.0, size=(2, 20)))
        np.testing.assert_allclose(problem.k_squared(coords), 2.0 * (0.7 - problem.potential(coords)))

    def test_source_is_doubled_rhs(self):
        problem = SchrodingerProblem()
        coords = [np.array([0.1, 0.5]), np.array([0.2, 0.0])]
        np.testing.assert_allclose(problem.source(coords), 2.0 * problem.rhs(coords))
        assert problem.rhs([0.0, 0.0]) == pytest.approx(1.0)

    def test_grids(self):
        problem = model_potentials_2d3d(2, energy=0.5)
        rotated = problem.rotated_grid(32, 0.1)
        assert rotated.axes[0].a == 0.0 and rotated.axes[0].b == pytest.approx(22.5)
        ecs = problem.ecs_grid(40, np.pi / 7)
        assert ecs.axes[0].n_ecs == 20 and ecs.axes[0].n_ecs_left == 0
        assert problem.real_grid(10).axes[0].b == 15.0
        assert problem.with_energy(-1.0).energy == -1.0

    def test_three_dimensional_model(self):
        problem = model_potentials_3d(energy=-0.5)
        assert problem.dim == 3
        assert problem.rotated_extent == 15.0
        coords = [np.array([0.0])] * 3
        # three wells plus three pair repulsions at the origin
        assert problem.potential(coords)[0] == pytest.approx(-13.5 + 6.0)


class TestProblemFromConfig:

    def test_helmholtz_defaults(self):
        problem = problem_from_config(ProblemConfig(problem="helmholtz3d-twodots", k0=0.5))
        assert isinstance(problem, HelmholtzProblem)
        assert problem.dim == 3
        assert problem.eta == (1.0, 0.0, 0.0)
        assert problem.domain == (-20.0, 20.0)

    def test_parameter_overrides(self):
        config = ProblemConfig(problem="helmholtz2d-twodots", params={"half_width": 10.0, "amplitude": 0.1})
        problem = problem_from_config(config)
        assert problem.domain == (-10.0, 10.0)
        assert problem.amplitude == 0.1

        schrodinger = problem_from_config(ProblemConfig(problem="schrodinger2d-benchmark", params={"repulsion": 0.0}))
        assert schrodinger.repulsion == 0.0

    @pytest.mark.parametrize("name, params", [
        ("helmholtz2d-twodots", {"depth": 1.0}),
        ("schrodinger2d-benchmark", {"amplitude": 1.0}),
    ])
    def test_unknown_parameter(self, name, params):
        with pytest.raises(ConfigurationError):
            problem_from_config(ProblemConfig(problem=name, params=params))
