"""
Spectral diagnostics of the radial Hamiltonians.

Eigenvalues of the 1D Hamiltonian on real and rotated contours, and the
Kronecker-sum approximation of the 2D spectrum without the two-body term.
"""
import logging
from typing import Dict, List, Sequence

import numpy as np
import scipy.linalg as la

from ..core.contour_grid import Contour1D
from ..core.errors import ConfigurationError, ConvergenceFailure
from ..core.helmholtz_operator import axis_stencil

logger = logging.getLogger(__name__)

MAX_DENSE_SIZE = 1024
DEDUP_TOL = 1e-12
SPECTRUM_HEADER = ["re_lambda", "im_lambda", "tag"]

# Box of the spectral experiments; the smallest positive 1D eigenvalue scales
# like 1/R², which fixes where the Kronecker branch starts
SPECTRUM_RADIUS = 25.0
SPECTRUM_INTERVALS = 1000


def eig_hamiltonian_1d(potential, contour: Contour1D) -> np.ndarray:
    """
    Eigenvalues of −½ d²/dz² + V on the interior nodes of a contour.

    The matrix is tridiagonal and complex symmetric on rotated contours;
    LAPACK's Hessenberg QR computes the eigenvalues without vectors.

    Args:
        potential: V evaluated at complex points
        contour: Real or rotated contour with at most 1024 interior nodes

    Returns:
        Eigenvalues sorted by real part
    """
    n = contour.n_interior
    if n > MAX_DENSE_SIZE:
        raise ConfigurationError(f"Dense spectra are limited to {MAX_DENSE_SIZE} nodes, got {n}")

    lower, center, upper = axis_stencil(contour.steps)
    matrix = np.diag(0.5 * center + potential(contour.interior_nodes))
    matrix += np.diag(0.5 * lower[1:], -1) + np.diag(0.5 * upper[:-1], 1)
    try:
        eigs = la.eigvals(matrix, overwrite_a=True)
    except la.LinAlgError as e:
        raise ConvergenceFailure(f"QR iteration failed on the {n}x{n} Hamiltonian: {e}") from e

    eigs = eigs[np.argsort(eigs.real, kind="stable")]
    logger.debug(f"1D spectrum on {n} nodes (angle {contour.angle:.4f}): lowest {eigs[0]:.6f}")
    return eigs


def kronecker_2d_spectrum(eigs_1d: Sequence[complex]) -> np.ndarray:
    """
    All sums λ_i + λ_j (i ≤ j) of a 1D spectrum, duplicates within 1e−12 merged.

    Approximates the 2D spectrum when the two-body potential is weak.
    """
    eigs = np.asarray(eigs_1d, dtype=complex)
    if eigs.size == 0:
        raise ConfigurationError("Kronecker spectrum needs at least one eigenvalue")

    i, j = np.triu_indices(eigs.size)
    sums = eigs[i] + eigs[j]
    sums = sums[np.lexsort((sums.imag, sums.real))]
    keep = np.ones(sums.size, dtype=bool)
    keep[1:] = np.abs(np.diff(sums)) > DEDUP_TOL
    return sums[keep]


def shifted_spectrum(eigs: Sequence[complex], energy: float) -> np.ndarray:
    """Spectrum of H − E."""
    return np.asarray(eigs, dtype=complex) - energy


def spectrum_summary(eigs_1d: np.ndarray) -> Dict[str, float]:
    """
    Landmarks of a real-contour 1D spectrum.

    Returns:
        lambda0 (lowest eigenvalue), isolated (2λ0) and onset (λ0 plus the
        smallest positive eigenvalue) of the Kronecker 2D spectrum
    """
    real = np.sort(np.asarray(eigs_1d).real)
    lambda0 = float(real[0])
    positive = real[real > 0.0]
    onset = lambda0 + float(positive[0]) if positive.size else float("nan")
    return {
        "lambda0": lambda0,
        "bound_count": int(np.sum(real < 0.0)),
        "isolated": 2.0 * lambda0,
        "onset": onset,
    }


def spectrum_rows(eigs: np.ndarray, tag: str) -> List[list]:
    return [[float(e.real), float(e.imag), tag] for e in np.asarray(eigs, dtype=complex)]
