"""
Configuration models and angle expressions.
"""
import json
import math

import pytest

from ..core.config import ExperimentConfig, GridConfig, load_config, parse_angle
from ..core.contour_grid import theta_to_gamma
from ..core.errors import ConfigurationError


class TestParseAngle:

    @pytest.mark.parametrize("text, expected", [
        ("pi/6", math.pi / 6),
        ("-pi/4", -math.pi / 4),
        ("2*pi/3", 2 * math.pi / 3),
        ("pi", math.pi),
        ("0.3", 0.3),
        ("15deg", math.radians(15)),
        (0.25, 0.25),
        (1, 1.0),
    ])
    def test_accepted_forms(self, text, expected):
        assert parse_angle(text) == pytest.approx(expected, rel=1e-15)

    def test_none_passes_through(self):
        assert parse_angle(None) is None

    @pytest.mark.parametrize("bad", ["pie/6", "pi/0", "six", True])
    def test_rejected(self, bad):
        with pytest.raises(ConfigurationError):
            parse_angle(bad)


class TestExperimentConfig:

    def test_defaults(self):
        config = load_config(None)
        assert config.grid.n == 64
        assert config.solver.smoother == "gmres"
        assert config.solver.m == 3
        assert config.solver.omega == pytest.approx(2.0 / 3.0)
        assert config.solver.coarsest_interior == 7
        assert config.threads == 1

    def test_rotation_angle_from_theta(self):
        grid = GridConfig(theta="pi/6")
        assert grid.rotation_angle() == pytest.approx(theta_to_gamma(math.pi / 6))
        assert GridConfig(theta="pi/6", gamma="pi/12").rotation_angle() == pytest.approx(math.pi / 12)
        assert GridConfig().rotation_angle() == 0.0

    def test_overrides(self):
        config = ExperimentConfig().with_overrides({"grid.n": 128, "solver.tol": 1e-8, "grid.gamma": None})
        assert config.grid.n == 128
        assert config.solver.tol == 1e-8
        assert config.grid.gamma is None

    @pytest.mark.parametrize("overrides", [
        {"grid.gamma": "pi"},
        {"grid.bogus": 1},
        {"nothing.n": 3},
        {"solver.nu1": 0, "solver.nu2": 0},
        {"problem.eta": [1.0, 1.0]},
        {"problem.problem": "helmholtz4d"},
    ])
    def test_invalid_overrides(self, overrides):
        with pytest.raises(ConfigurationError):
            ExperimentConfig().with_overrides(overrides)

    def test_load_file(self, temp_workspace):
        path = temp_workspace / "experiment.json"
        path.write_text(json.dumps({
            "grid": {"n": 32, "theta": "pi/7"},
            "problem": {"problem": "schrodinger2d-benchmark", "energy": 0.5},
            "commands": {"mg-rate-scan": {"emin": -1.0}},
        }))
        config = load_config(path)
        assert config.grid.n == 32
        assert config.grid.theta == pytest.approx(math.pi / 7)
        assert config.problem.is_schrodinger
        assert config.problem.dimension == 2
        assert config.command_section("mg-rate-scan") == {"emin": -1.0}
        assert config.command_section("spectrum") == {}

    def test_load_errors(self, temp_workspace):
        with pytest.raises(ConfigurationError):
            load_config(temp_workspace / "missing.json")

        broken = temp_workspace / "broken.json"
        broken.write_text("{not json")
        with pytest.raises(ConfigurationError):
            load_config(broken)

        listing = temp_workspace / "list.json"
        listing.write_text("[1, 2]")
        with pytest.raises(ConfigurationError):
            load_config(listing)

    def test_echo_is_json(self):
        echo = ExperimentConfig().with_overrides({"grid.theta": "pi/4"}).echo()
        assert json.loads(json.dumps(echo)) == echo
        assert echo["grid"]["theta"] == pytest.approx(math.pi / 4)
