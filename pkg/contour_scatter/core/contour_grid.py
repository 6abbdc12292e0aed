"""
Complex integration contours and tensor-product grids.

A contour is either a ray rotated by γ into the complex plane, or a real
interval continued by exterior complex scaling (ECS) tails bent by θ.
Unknowns live at interior nodes; both contour endpoints carry homogeneous
Dirichlet values.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from .errors import ConfigurationError, DomainError, ShapeMismatchError

logger = logging.getLogger(__name__)

# Complex values on the interior nodes of a TensorGrid, indexed 'ij'.
Field = np.ndarray


class ContourKind(Enum):
    """Shape of a 1D contour."""
    ROTATED = "rotated"
    ECS_REAL = "ecs_real"


def theta_to_gamma(theta: float) -> float:
    """
    Overall rotation angle γ of the full complex grid matching an ECS angle θ.

    The ECS layer is taken as one quarter of the real domain length, so the
    far contour endpoint lies on the ray e^{iγ}.

    Args:
        theta: ECS angle in [0, π/2)

    Returns:
        arctan(sin θ / (2 + cos θ))
    """
    if not 0.0 <= theta < math.pi / 2:
        raise DomainError(f"ECS angle must lie in [0, pi/2), got {theta}")
    return math.atan(math.sin(theta) / (2.0 + math.cos(theta)))


def min_gamma(beta_min: float) -> float:
    """Smallest rotation angle whose CSL shift e^{2iγ} has imaginary part ≥ beta_min."""
    if beta_min < 0.0:
        raise DomainError(f"Minimal shift must be non-negative, got {beta_min}")
    return math.atan(beta_min) / 2.0


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Contour1D:
    """
    One spatial axis of a grid.

    ``n_intervals`` counts the intervals of the underlying real interval
    [a, b]. EcsReal contours add ``n_ecs`` bent intervals after b and
    ``n_ecs_left`` before a, with the same real spacing h.
    """
    kind: ContourKind
    a: float
    b: float
    n_intervals: int
    gamma: float = 0.0
    theta: float = 0.0
    n_ecs: int = 0
    n_ecs_left: int = 0
    multigrid: bool = False
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    steps: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.a < self.b:
            raise ConfigurationError(f"Contour needs a < b, got [{self.a}, {self.b}]")
        if self.n_intervals < 2:
            raise ConfigurationError(f"Contour needs at least 2 intervals, got {self.n_intervals}")
        if self.n_ecs < 0 or self.n_ecs_left < 0:
            raise ConfigurationError("ECS interval counts must be non-negative")
        angle = self.gamma if self.kind is ContourKind.ROTATED else self.theta
        if not 0.0 <= angle < math.pi / 2:
            raise DomainError(f"Contour angle must lie in [0, pi/2), got {angle}")
        if self.kind is ContourKind.ROTATED and (self.n_ecs or self.n_ecs_left):
            raise ConfigurationError("Rotated contours carry no ECS layer")
        if self.multigrid and not _is_power_of_two(self.total_intervals):
            raise ConfigurationError(
                f"Multigrid axes need a power-of-two interval count, got {self.total_intervals}"
            )

        h = self.h
        if self.kind is ContourKind.ROTATED:
            x = self.a + h * np.arange(self.n_intervals + 1)
            # Pin the far end so that step sums close exactly
            x[-1] = self.b
            nodes = x * np.exp(1j * self.gamma)
        else:
            bend = np.exp(1j * self.theta)
            left = self.a - h * bend * np.arange(self.n_ecs_left, 0, -1)
            real = (self.a + h * np.arange(self.n_intervals + 1)).astype(complex)
            real[-1] = self.b
            right = self.b + h * bend * np.arange(1, self.n_ecs + 1)
            nodes = np.concatenate([left, real, right])

        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "steps", np.diff(nodes))

    @property
    def h(self) -> float:
        """Real grid spacing."""
        return (self.b - self.a) / self.n_intervals

    @property
    def total_intervals(self) -> int:
        return self.n_intervals + self.n_ecs + self.n_ecs_left

    @property
    def n_interior(self) -> int:
        return self.total_intervals - 1

    @property
    def interior_nodes(self) -> np.ndarray:
        return self.nodes[1:-1]

    @property
    def parameter_nodes(self) -> np.ndarray:
        """Real parameter x_j of every node (arc-length along the contour from a)."""
        h = self.h
        return self.a + h * (np.arange(self.total_intervals + 1) - self.n_ecs_left)

    @property
    def real_mask(self) -> np.ndarray:
        """Interior nodes lying on the real section [a, b]."""
        mask = np.zeros(self.total_intervals + 1, dtype=bool)
        if self.kind is ContourKind.ECS_REAL or self.gamma == 0.0:
            mask[self.n_ecs_left:self.n_ecs_left + self.n_intervals + 1] = True
        return mask[1:-1]

    @property
    def is_uniform(self) -> bool:
        return self.kind is ContourKind.ROTATED or (self.n_ecs == 0 and self.n_ecs_left == 0)

    @property
    def angle(self) -> float:
        return self.gamma if self.kind is ContourKind.ROTATED else self.theta

    def interior_weights(self) -> np.ndarray:
        """Trapezoid weights on interior nodes (endpoint values are zero)."""
        return 0.5 * (self.steps[:-1] + self.steps[1:])

    def coarsen(self) -> "Contour1D":
        """Contour with every second node removed."""
        if self.n_intervals % 2 or self.n_ecs % 2 or self.n_ecs_left % 2:
            raise ConfigurationError(f"Cannot coarsen contour with {self.total_intervals} intervals")
        return replace(
            self,
            n_intervals=self.n_intervals // 2,
            n_ecs=self.n_ecs // 2,
            n_ecs_left=self.n_ecs_left // 2,
        )

    def unrotated(self) -> "Contour1D":
        """Same parameter axis on the real line."""
        if self.kind is ContourKind.ROTATED:
            return replace(self, gamma=0.0)
        return replace(self, theta=0.0)


def build_contour(
    kind: ContourKind,
    a: float,
    b: float,
    n_intervals: int,
    angle: float = 0.0,
    n_ecs: Optional[int] = None,
    two_sided: bool = False,
    multigrid: bool = False,
) -> Contour1D:
    """
    Build a 1D contour.

    Args:
        kind: ROTATED or ECS_REAL (accepts the enum value strings too)
        a: Left end of the real interval
        b: Right end of the real interval
        n_intervals: Intervals on [a, b]
        angle: γ for rotated contours, θ for ECS contours
        n_ecs: ECS intervals per tail; defaults to a quarter of the real
            length for two-sided layers and half of it for a one-sided layer
        two_sided: Add an ECS tail before a as well
        multigrid: Enforce a power-of-two total interval count

    Returns:
        Immutable Contour1D
    """
    kind = ContourKind(kind)
    if kind is ContourKind.ROTATED:
        return Contour1D(kind, float(a), float(b), int(n_intervals), gamma=float(angle), multigrid=multigrid)

    if n_ecs is None:
        n_ecs = n_intervals // 4 if two_sided else n_intervals // 2
    return Contour1D(
        kind,
        float(a),
        float(b),
        int(n_intervals),
        theta=float(angle),
        n_ecs=int(n_ecs),
        n_ecs_left=int(n_ecs) if two_sided else 0,
        multigrid=multigrid,
    )


@dataclass(frozen=True)
class TensorGrid:
    """Tensor product of 1 to 3 contours."""
    axes: Tuple[Contour1D, ...]

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if not 1 <= len(self.axes) <= 3:
            raise ConfigurationError(f"Grids have 1 to 3 axes, got {len(self.axes)}")

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def interior_shape(self) -> Tuple[int, ...]:
        return tuple(axis.n_interior for axis in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.interior_shape))

    @property
    def cells(self) -> int:
        return int(np.prod([axis.total_intervals for axis in self.axes]))

    @property
    def is_rotated(self) -> bool:
        return all(axis.kind is ContourKind.ROTATED for axis in self.axes)

    @property
    def gamma(self) -> float:
        if not self.is_rotated:
            raise ConfigurationError("Grid is not a rotated grid")
        gammas = {axis.gamma for axis in self.axes}
        if len(gammas) != 1:
            raise ConfigurationError(f"Axes carry different rotation angles: {sorted(gammas)}")
        return gammas.pop()

    def coordinates(self) -> List[np.ndarray]:
        """Interior complex coordinates, one array per axis, 'ij' meshgrid."""
        return np.meshgrid(*[axis.interior_nodes for axis in self.axes], indexing="ij")

    def weights(self) -> np.ndarray:
        """Tensor trapezoid weights over interior nodes (complex Jacobian included)."""
        weight = np.ones((), dtype=complex)
        for axis in self.axes:
            weight = np.multiply.outer(weight, axis.interior_weights())
        return weight

    def quadrature_weight(self) -> complex:
        """Uniform cell weight e^{idγ}h^d of a rotated grid."""
        if not self.is_rotated:
            raise ConfigurationError("Uniform quadrature weight needs a rotated grid")
        return complex(np.prod([axis.h * np.exp(1j * axis.gamma) for axis in self.axes]))

    def real_mask(self) -> np.ndarray:
        mask = np.ones((), dtype=bool)
        for axis in self.axes:
            mask = np.multiply.outer(mask, axis.real_mask)
        return mask

    def coarsen(self) -> "TensorGrid":
        return TensorGrid(tuple(axis.coarsen() for axis in self.axes))

    def can_coarsen(self) -> bool:
        return all(
            axis.n_intervals % 2 == 0 and axis.n_ecs % 2 == 0 and axis.n_ecs_left % 2 == 0
            for axis in self.axes
        )

    def real_companion(self) -> "TensorGrid":
        """Same parameter axes with every angle set to zero."""
        return TensorGrid(tuple(axis.unrotated() for axis in self.axes))

    def check_field(self, u: np.ndarray, name: str = "field"):
        if u.shape != self.interior_shape:
            raise ShapeMismatchError(
                f"{name} has shape {u.shape}, grid interior is {self.interior_shape}"
            )

    def describe(self):
        """JSON-serializable grid description."""
        return [
            {
                "kind": axis.kind.value,
                "a": axis.a,
                "b": axis.b,
                "n_intervals": axis.n_intervals,
                "angle": axis.angle,
                "n_ecs": axis.n_ecs,
                "n_ecs_left": axis.n_ecs_left,
            }
            for axis in self.axes
        ]


def build_grid(
    dim: int,
    kind: ContourKind,
    a: float,
    b: float,
    n_intervals: int,
    angle: float = 0.0,
    n_ecs: Optional[int] = None,
    two_sided: bool = False,
    multigrid: bool = False,
) -> TensorGrid:
    """Grid with ``dim`` identical axes; arguments as in build_contour."""
    axis = build_contour(kind, a, b, n_intervals, angle, n_ecs, two_sided, multigrid)
    return TensorGrid((axis,) * dim)


def rotated_companion(ecs_grid: TensorGrid, multigrid: bool = False) -> TensorGrid:
    """
    Rotated grid spanning the same parameter range as an ECS grid.

    Every axis keeps its total interval count and spacing h; the rotation
    angle is theta_to_gamma(θ) of the ECS tail.
    """
    axes: List[Contour1D] = []
    for axis in ecs_grid.axes:
        if axis.kind is not ContourKind.ECS_REAL:
            raise ConfigurationError("rotated_companion expects ECS axes")
        h = axis.h
        axes.append(
            Contour1D(
                ContourKind.ROTATED,
                axis.a - axis.n_ecs_left * h,
                axis.b + axis.n_ecs * h,
                axis.total_intervals,
                gamma=theta_to_gamma(axis.theta),
                multigrid=multigrid,
            )
        )
    return TensorGrid(tuple(axes))

