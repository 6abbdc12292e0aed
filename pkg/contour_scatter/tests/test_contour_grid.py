"""
Contours, tensor grids and the angle relations between them.
"""
import math

import numpy as np
import pytest

from ..core.contour_grid import (
    ContourKind,
    TensorGrid,
    build_contour,
    build_grid,
    min_gamma,
    rotated_companion,
    theta_to_gamma,
)
from ..core.errors import ConfigurationError, DomainError, ShapeMismatchError


class TestAngles:

    @pytest.mark.parametrize("theta, gamma_deg", [
        (math.pi / 8, 7.5),
        (math.pi / 7, 8.5),
        (math.pi / 6, 9.9),
        (math.pi / 5, 11.8),
        (math.pi / 4, 14.6),
        (math.pi / 3, 19.1),
    ])
    def test_theta_to_gamma_table(self, theta, gamma_deg):
        assert math.degrees(theta_to_gamma(theta)) == pytest.approx(gamma_deg, abs=0.1)

    def test_theta_to_gamma_edges(self):
        assert theta_to_gamma(0.0) == 0.0
        with pytest.raises(DomainError):
            theta_to_gamma(math.pi / 2)
        with pytest.raises(DomainError):
            theta_to_gamma(-0.1)

    def test_far_endpoint_on_rotated_ray(self):
        # ECS layer of a quarter of the real length ends on the ray e^{iγ}
        theta = math.pi / 5
        contour = build_contour(ContourKind.ECS_REAL, 0.0, 4.0, 8, theta, n_ecs=4)
        end = contour.nodes[-1]
        assert math.atan2(end.imag, end.real) == pytest.approx(theta_to_gamma(theta), abs=1e-12)

    def test_min_gamma(self):
        assert min_gamma(0.5) == pytest.approx(0.2318, abs=1e-4)
        assert min_gamma(0.0) == 0.0
        assert min_gamma(1.0) == pytest.approx(math.pi / 8)
        with pytest.raises(DomainError):
            min_gamma(-0.1)


class TestContour1D:

    def test_rotated_nodes(self):
        gamma = math.pi / 12
        contour = build_contour(ContourKind.ROTATED, 0.0, 2.0, 8, gamma)
        expected = 0.25 * np.arange(9) * np.exp(1j * gamma)
        np.testing.assert_allclose(contour.nodes, expected, atol=1e-15)
        np.testing.assert_allclose(contour.steps, 0.25 * np.exp(1j * gamma), atol=1e-15)
        assert contour.n_interior == 7
        assert contour.is_uniform

    def test_ecs_nodes(self):
        theta = math.pi / 4
        contour = build_contour(ContourKind.ECS_REAL, -1.0, 1.0, 8, theta, two_sided=True)
        assert contour.n_ecs == 2 and contour.n_ecs_left == 2
        assert contour.total_intervals == 12
        real = contour.nodes[2:11]
        np.testing.assert_allclose(real, np.linspace(-1.0, 1.0, 9), atol=1e-15)
        np.testing.assert_allclose(contour.steps[-1], 0.25 * np.exp(1j * theta), atol=1e-15)
        np.testing.assert_allclose(contour.steps[0], 0.25 * np.exp(1j * theta), atol=1e-15)
        assert contour.nodes[0].imag < 0.0 < contour.nodes[-1].imag
        assert contour.real_mask.sum() == 9
        assert not contour.is_uniform

    def test_one_sided_default_layer(self):
        contour = build_contour(ContourKind.ECS_REAL, 0.0, 15.0, 300, math.pi / 7)
        assert contour.n_ecs == 150
        assert contour.n_ecs_left == 0

    def test_invalid_contours(self):
        with pytest.raises(ConfigurationError):
            build_contour(ContourKind.ROTATED, 1.0, 0.0, 8)
        with pytest.raises(ConfigurationError):
            build_contour(ContourKind.ROTATED, 0.0, 1.0, 12, multigrid=True)
        with pytest.raises(DomainError):
            build_contour(ContourKind.ROTATED, 0.0, 1.0, 8, math.pi / 2)

    def test_coarsen(self):
        contour = build_contour(ContourKind.ECS_REAL, 0.0, 1.0, 16, 0.3, n_ecs=16, multigrid=True)
        coarse = contour.coarsen()
        assert coarse.n_intervals == 8 and coarse.n_ecs == 8
        np.testing.assert_allclose(coarse.nodes, contour.nodes[::2], atol=1e-14)
        with pytest.raises(ConfigurationError):
            build_contour(ContourKind.ROTATED, 0.0, 1.0, 3).coarsen()

    def test_weights_of_rotated_contour(self):
        gamma = 0.2
        contour = build_contour(ContourKind.ROTATED, 0.0, 1.0, 10, gamma)
        np.testing.assert_allclose(contour.interior_weights(), 0.1 * np.exp(1j * gamma), atol=1e-15)

    def test_unrotated(self):
        contour = build_contour(ContourKind.ROTATED, 0.0, 1.0, 4, 0.3).unrotated()
        np.testing.assert_allclose(contour.nodes.imag, 0.0)


class TestTensorGrid:

    def test_shapes_and_coordinates(self):
        grid = build_grid(3, ContourKind.ROTATED, -1.0, 1.0, 8, 0.1)
        assert grid.dim == 3
        assert grid.interior_shape == (7, 7, 7)
        assert grid.size == 343
        assert grid.cells == 512
        x, y, z = grid.coordinates()
        assert x.shape == (7, 7, 7)
        assert x[2, 0, 0] == grid.axes[0].interior_nodes[2]
        assert z[0, 0, 5] == grid.axes[2].interior_nodes[5]
        assert grid.gamma == 0.1

    def test_quadrature_weight(self):
        gamma = math.pi / 12
        grid = build_grid(2, ContourKind.ROTATED, 0.0, 1.0, 4, gamma)
        assert grid.quadrature_weight() == pytest.approx(0.25 ** 2 * np.exp(2j * gamma))
        np.testing.assert_allclose(grid.weights(), grid.quadrature_weight())

    def test_check_field(self):
        grid = build_grid(2, ContourKind.ROTATED, 0.0, 1.0, 4)
        grid.check_field(np.zeros((3, 3)))
        with pytest.raises(ShapeMismatchError):
            grid.check_field(np.zeros((4, 4)), "u")

    def test_mixed_angles_rejected(self):
        grid = TensorGrid((
            build_contour(ContourKind.ROTATED, 0.0, 1.0, 4, 0.1),
            build_contour(ContourKind.ROTATED, 0.0, 1.0, 4, 0.2),
        ))
        with pytest.raises(ConfigurationError):
            grid.gamma

    def test_rotated_companion(self):
        theta = math.pi / 6
        ecs = build_grid(2, ContourKind.ECS_REAL, -20.0, 20.0, 64, theta, two_sided=True)
        companion = rotated_companion(ecs)
        axis = companion.axes[0]
        assert companion.interior_shape == ecs.interior_shape
        assert axis.a == pytest.approx(-30.0) and axis.b == pytest.approx(30.0)
        assert axis.h == pytest.approx(ecs.axes[0].h)
        assert companion.gamma == pytest.approx(theta_to_gamma(theta))

    def test_real_companion_and_mask(self):
        ecs = build_grid(2, ContourKind.ECS_REAL, 0.0, 1.0, 8, 0.4, n_ecs=4)
        mask = ecs.real_mask()
        assert mask.shape == ecs.interior_shape
        assert mask.sum() == 8 * 8
        np.testing.assert_allclose(ecs.real_companion().axes[0].nodes.imag, 0.0)

    def test_describe(self):
        grid = build_grid(2, ContourKind.ECS_REAL, 0.0, 15.0, 300, math.pi / 7)
        described = grid.describe()
        assert described[0]["kind"] == "ecs_real"
        assert described[0]["n_ecs"] == 150
