"""
Contour Scatter: complex-contour scattering toolkit

Helmholtz and few-body Schrödinger scattering problems discretized on grids
rotated into the complex plane, solved with geometric multigrid, and reduced
to far-field maps, ionization amplitudes and spectral diagnostics.
"""

__version__ = "0.1.0"

from .core.config import ExperimentConfig, load_config
from .core.contour_grid import Contour1D, ContourKind, TensorGrid, build_contour, build_grid, theta_to_gamma
from .core.errors import ConfigurationError, ContourScatterError, NumericalError
from .core.model_problems import HelmholtzProblem, SchrodingerProblem, problem_from_config
from .core.multigrid import ConvergenceReport, fmg, solve_vcycles
from .scattering.farfield import farfield_map
from .workspace.manager import RunWorkspace

__all__ = [
    "ExperimentConfig",
    "load_config",
    "Contour1D",
    "ContourKind",
    "TensorGrid",
    "build_contour",
    "build_grid",
    "theta_to_gamma",
    "ConfigurationError",
    "ContourScatterError",
    "NumericalError",
    "HelmholtzProblem",
    "SchrodingerProblem",
    "problem_from_config",
    "ConvergenceReport",
    "fmg",
    "solve_vcycles",
    "farfield_map",
    "RunWorkspace",
]
