"""
Matrix-free second-order discretization of (−Δ − k²(z)) on a TensorGrid.

Each axis contributes the nonuniform complex three-point stencil
[−2/(h₋(h₋+h₊)), 2/(h₋h₊), −2/(h₊(h₋+h₊))], which reduces to
[−1, 2, −1]/h̃² on rotated axes. Dirichlet endpoints act as zero ghosts.
"""
import logging
import math
from typing import Callable, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from .contour_grid import Field, TensorGrid
from .errors import ConfigurationError

logger = logging.getLogger(__name__)

KSquaredFn = Callable[[List[np.ndarray]], np.ndarray]


def axis_stencil(steps: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Stencil weights of −d²/dz² at every interior node of one axis.

    Args:
        steps: Complex steps h_j = z_{j+1} − z_j of the contour

    Returns:
        (lower, center, upper) arrays of length len(steps) − 1
    """
    h_minus = steps[:-1]
    h_plus = steps[1:]
    span = h_minus + h_plus
    lower = -2.0 / (h_minus * span)
    center = 2.0 / (h_minus * h_plus)
    upper = -2.0 / (h_plus * span)
    return lower, center, upper


def _along(axis: int, ndim: int, index) -> tuple:
    slices = [slice(None)] * ndim
    slices[axis] = index
    return tuple(slices)


def _broadcast_shape(axis: int, ndim: int) -> List[int]:
    shape = [1] * ndim
    shape[axis] = -1
    return shape


class StencilOperator:
    """
    Discrete (−Δ_h − diag) on the interior nodes of a grid.

    Attributes:
        grid: Grid the operator lives on
        diag: k²(z_j) at every interior node
        stencils: Per-axis (lower, center, upper) weight arrays
    """

    def __init__(self, grid: TensorGrid, diag: np.ndarray):
        self.grid = grid
        self.diag = np.broadcast_to(np.asarray(diag, dtype=complex), grid.interior_shape).copy()
        self.stencils = [axis_stencil(axis.steps) for axis in grid.axes]
        self._diagonal: Optional[np.ndarray] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.grid.interior_shape

    def apply(self, u: Field) -> Field:
        """(−Δ_h − k²)u with zero Dirichlet ghosts."""
        self.grid.check_field(u, "u")
        ndim = u.ndim
        out = -self.diag * u
        for axis, (lower, center, upper) in enumerate(self.stencils):
            shape = _broadcast_shape(axis, ndim)
            out += center.reshape(shape) * u
            out[_along(axis, ndim, slice(1, None))] += (
                lower[1:].reshape(shape) * u[_along(axis, ndim, slice(None, -1))]
            )
            out[_along(axis, ndim, slice(None, -1))] += (
                upper[:-1].reshape(shape) * u[_along(axis, ndim, slice(1, None))]
            )
        return out

    __call__ = apply

    def diagonal(self) -> np.ndarray:
        """Main diagonal of the operator matrix."""
        if self._diagonal is None:
            diagonal = -self.diag.copy()
            for axis, (_, center, _) in enumerate(self.stencils):
                diagonal += center.reshape(_broadcast_shape(axis, self.diag.ndim))
            self._diagonal = diagonal
        return self._diagonal

    def axis_matrix(self, axis: int) -> sp.csr_matrix:
        lower, center, upper = self.stencils[axis]
        return sp.diags([lower[1:], center, upper[:-1]], [-1, 0, 1], format="csr", dtype=complex)

    def assemble(self) -> sp.csr_matrix:
        """Sparse matrix in lexicographic ('ij', C-order) numbering."""
        dims = self.shape
        matrix = sp.csr_matrix((self.grid.size, self.grid.size), dtype=complex)
        for axis in range(len(dims)):
            factor = sp.identity(1, dtype=complex, format="csr")
            for other, n in enumerate(dims):
                block = self.axis_matrix(axis) if other == axis else sp.identity(n, dtype=complex, format="csr")
                factor = sp.kron(factor, block, format="csr")
            matrix = matrix + factor
        matrix = matrix - sp.diags(self.diag.ravel(), 0, format="csr")
        return matrix.tocsr()

    def csl_form(self) -> "StencilOperator":
        """
        Complex shifted Laplacian form of a rotated-grid operator.

        Returns e^{2iγ}·A as an operator on the unrotated grid: real-step
        Laplacian with diagonal e^{2iγ}k².
        """
        alpha, beta = csl_shift_of(self)
        return StencilOperator(self.grid.real_companion(), complex(alpha, beta) * self.diag)


def build_operator(grid: TensorGrid, k_squared_fn: KSquaredFn) -> StencilOperator:
    """Discretize −Δ − k²(z) on a grid by evaluating k² at its interior nodes."""
    return StencilOperator(grid, k_squared_fn(grid.coordinates()))


def residual(op: StencilOperator, u: Field, f: Field) -> Field:
    """r = f − A u."""
    op.grid.check_field(f, "f")
    return f - op.apply(u)


def norm(field: Field) -> float:
    """Euclidean norm over interior nodes."""
    return float(np.linalg.norm(field.ravel()))


def csl_shift_of(op: StencilOperator) -> Tuple[float, float]:
    """(α, β) with e^{2iγ} = α + iβ for an operator on a rotated grid."""
    if not op.grid.is_rotated:
        raise ConfigurationError("CSL shift is only defined for rotated grids")
    gamma = op.grid.gamma
    return math.cos(2.0 * gamma), math.sin(2.0 * gamma)
