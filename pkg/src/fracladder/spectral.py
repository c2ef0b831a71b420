"""Uniform grids, the momentum/position transform and numeric residual checks.

The transform convention is

    psi(x) = (2 pi)^(-1/2) * integral phi(k) exp(i k x) dk,

discretized on a momentum grid with a half-step offset, so k = 0 is never a
sample, and on the dual position grid with spacing 2 pi / (N dk). The
discrete transform is unitary for the L2 norms sum |v|^2 * spacing.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import fft as sfft

from .errors import DomainError, EmptyCurveError
from .ladder import DEFAULT_MAX_LEVEL, EXCLUSION_STEPS, excited_state, local_energy_exact, node_locations
from .powerexp import PowerExpFunction, check_alpha

logger = logging.getLogger(__name__)

DEFAULT_K_MAX = 20.0
DEFAULT_POINTS = 4096
MIN_POINTS = 16
DECAY_TOL = 1e-12
MAX_ENLARGEMENTS = 4
RESIDUAL_ORIGIN_WINDOW = 0.25

# 8th-order centred stencil for the second derivative
STENCIL_8 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])
STENCIL_REACH = len(STENCIL_8) // 2


class Representation(Enum):
    """Which variable a SampledState is tabulated in."""
    MOMENTUM = "momentum"
    POSITION = "position"


@dataclass(frozen=True)
class UniformGrid:
    """Symmetric momentum grid k_j = (j - N/2 + 1/2) dk and its dual position grid."""
    k_max: float = DEFAULT_K_MAX
    n_points: int = DEFAULT_POINTS

    def __post_init__(self):
        n = int(self.n_points)
        if n < MIN_POINTS or n & (n - 1):
            raise DomainError(f"n_points must be a power of two >= {MIN_POINTS}, got {self.n_points}")
        if not self.k_max > 0:
            raise DomainError(f"k_max must be positive, got {self.k_max}")
        object.__setattr__(self, "n_points", n)
        object.__setattr__(self, "k_max", float(self.k_max))

    @property
    def spacing(self) -> float:
        return 2.0 * self.k_max / self.n_points

    @property
    def x_spacing(self) -> float:
        return 2.0 * np.pi / (self.n_points * self.spacing)

    @property
    def k_points(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points / 2 + 0.5) * self.spacing

    @property
    def x_points(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points / 2 + 0.5) * self.x_spacing

    def refined(self) -> "UniformGrid":
        """Same extent, twice the points."""
        return UniformGrid(self.k_max, 2 * self.n_points)

    def enlarged(self) -> "UniformGrid":
        """Twice the extent at the same spacing."""
        return UniformGrid(2.0 * self.k_max, 2 * self.n_points)


@dataclass(eq=False)
class SampledState:
    """Complex samples of a state on a grid, in one representation."""
    grid: UniformGrid
    values: np.ndarray
    alpha: float
    n: Optional[int] = None
    representation: Representation = Representation.MOMENTUM

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n_points,):
            raise DomainError(
                f"expected {self.grid.n_points} samples, got shape {self.values.shape}")

    @property
    def coordinates(self) -> np.ndarray:
        if self.representation is Representation.MOMENTUM:
            return self.grid.k_points
        return self.grid.x_points

    @property
    def spacing(self) -> float:
        if self.representation is Representation.MOMENTUM:
            return self.grid.spacing
        return self.grid.x_spacing

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.spacing))

    def with_values(self, values: np.ndarray, representation: Optional[Representation] = None) -> "SampledState":
        return SampledState(self.grid, values, self.alpha, self.n, representation or self.representation)


def _require(s: SampledState, representation: Representation) -> None:
    if s.representation is not representation:
        raise DomainError(f"expected a {representation.value}-space state, got {s.representation.value}")


def sample(f: PowerExpFunction, grid: UniformGrid, n: Optional[int] = None) -> SampledState:
    """Evaluate f on the momentum grid."""
    return SampledState(grid, f.evaluate(grid.k_points), f.alpha, n, Representation.MOMENTUM)


def to_position(s: SampledState) -> SampledState:
    """Discrete psi(x_m) = dk (2 pi)^(-1/2) sum_j phi(k_j) exp(i k_j x_m)."""
    _require(s, Representation.MOMENTUM)
    grid = s.grid
    n = grid.n_points
    index = np.arange(n)
    k0, x0 = grid.k_points[0], grid.x_points[0]
    weighted = s.values * np.exp(1j * index * grid.spacing * x0)
    summed = n * sfft.ifft(weighted)
    values = grid.spacing / np.sqrt(2.0 * np.pi) * np.exp(1j * k0 * (x0 + index * grid.x_spacing)) * summed
    return s.with_values(values, Representation.POSITION)


def to_momentum(s: SampledState) -> SampledState:
    """Inverse of to_position."""
    _require(s, Representation.POSITION)
    grid = s.grid
    n = grid.n_points
    index = np.arange(n)
    k0, x0 = grid.k_points[0], grid.x_points[0]
    weighted = s.values * np.exp(-1j * k0 * index * grid.x_spacing)
    summed = sfft.fft(weighted)
    values = grid.x_spacing / np.sqrt(2.0 * np.pi) * np.exp(-1j * x0 * (k0 + index * grid.spacing)) * summed
    return s.with_values(values, Representation.MOMENTUM)


def riesz_apply(s: SampledState, order: float) -> SampledState:
    """d^order/dx^order in the Riesz sense: multiply by -|k|^order in momentum space."""
    _require(s, Representation.POSITION)
    order = float(order)
    if not 0.0 < order <= 2.0:
        raise DomainError(f"Riesz derivative order must lie in (0, 2], got {order}")
    momentum = to_momentum(s)
    scaled = momentum.with_values(-np.abs(s.grid.k_points) ** order * momentum.values)
    return to_position(scaled)


def apply_hamiltonian_position(s: SampledState) -> SampledState:
    """-d^alpha/dx^alpha + x^2 on a position-space state."""
    _require(s, Representation.POSITION)
    derivative = riesz_apply(s, s.alpha)
    return s.with_values(-derivative.values + s.grid.x_points ** 2 * s.values)


def normalized(s: SampledState) -> SampledState:
    """Scale to unit discrete L2 norm; the zero state is returned unchanged."""
    norm = s.norm()
    if norm == 0.0:
        return s
    return s.with_values(s.values / norm)


def phase_fixed(s: SampledState) -> SampledState:
    """Rotate the global phase so the largest-magnitude sample is real and positive."""
    peak = s.values[int(np.argmax(np.abs(s.values)))]
    if peak == 0:
        return s
    return s.with_values(s.values * (np.conj(peak) / abs(peak)))


def position_state(alpha: float, n: int, grid: UniformGrid, max_level: int = DEFAULT_MAX_LEVEL) -> SampledState:
    """L2-normalized position-space psi_n on the dual grid of an adequate momentum grid."""
    state = excited_state(alpha, n, max_level)
    grid = ensure_decay(state, grid)
    return normalized(to_position(sample(state, grid, n)))


def ensure_decay(f: PowerExpFunction, grid: UniformGrid, tol: float = DECAY_TOL) -> UniformGrid:
    """Enlarge the grid until |f| at the edges is below tol * max |f|."""
    for _ in range(MAX_ENLARGEMENTS + 1):
        ratio = truncation_ratio(f, grid)
        if ratio <= tol:
            return grid
        logger.warning("state not decayed at k_max=%s (edge/peak=%.3g); enlarging grid", grid.k_max, ratio)
        grid = grid.enlarged()
    raise DomainError(f"state does not decay within k_max={grid.k_max}")


def second_derivative(values: np.ndarray, grid: UniformGrid, method: str = "stencil") -> np.ndarray:
    """Numeric d^2/dk^2 of momentum samples.

    "stencil" applies the 8th-order centred difference; the outermost
    STENCIL_REACH points on each side are NaN. "spectral" multiplies by -x^2
    in position space and is only accurate for smooth data.
    """
    values = np.asarray(values, dtype=complex)
    if method == "stencil":
        result = np.convolve(values, STENCIL_8, mode="same") / grid.spacing ** 2
        result[:STENCIL_REACH] = np.nan
        result[-STENCIL_REACH:] = np.nan
        return result
    if method == "spectral":
        position = to_position(SampledState(grid, values, 2.0))
        moved = position.with_values(-grid.x_points ** 2 * position.values)
        return to_momentum(moved).values
    raise DomainError(f"unknown differentiation method {method!r}")


def admissible_mask(
    alpha: float,
    n: int,
    grid: UniformGrid,
    origin_window: float = RESIDUAL_ORIGIN_WINDOW,
    node_window: Optional[float] = None,
    max_level: int = DEFAULT_MAX_LEVEL,
) -> np.ndarray:
    """Grid points away from k = 0, the nodes and the stencil-free edges."""
    k = grid.k_points
    if node_window is None:
        node_window = EXCLUSION_STEPS * grid.spacing
    admitted = np.abs(k) >= max(origin_window, (STENCIL_REACH + 1) * grid.spacing)
    for node in node_locations(alpha, n, k_max=grid.k_max, max_level=max_level):
        admitted &= np.abs(np.abs(k) - node) > node_window
    admitted[:STENCIL_REACH] = False
    admitted[-STENCIL_REACH:] = False
    return admitted


def residual_momentum(
    alpha: float,
    n: int,
    grid: Optional[UniformGrid] = None,
    origin_window: float = RESIDUAL_ORIGIN_WINDOW,
    node_window: Optional[float] = None,
    method: str = "stencil",
    max_level: int = DEFAULT_MAX_LEVEL,
) -> float:
    """max |(|k|^alpha phi_n - phi_n'') - E_n(k) phi_n| / max |phi_n| over admitted points.

    phi_n'' is numeric, E_n is the exact local energy.
    """
    alpha = check_alpha(alpha)
    state = excited_state(alpha, n, max_level)
    grid = ensure_decay(state, grid or UniformGrid())
    admitted = admissible_mask(alpha, n, grid, origin_window, node_window, max_level)
    if not np.any(admitted):
        raise EmptyCurveError(f"no admissible grid points for the residual of phi_{n} at alpha={alpha}")
    k = grid.k_points
    values = np.asarray(state.evaluate(k))
    curvature = second_derivative(values, grid, method)
    energy = np.asarray(local_energy_exact(alpha, n, max_level).evaluate(k[admitted]))
    lhs = np.abs(k[admitted]) ** alpha * values[admitted] - curvature[admitted]
    rhs = energy * values[admitted]
    scale = float(np.max(np.abs(values[admitted])))
    return float(np.max(np.abs(lhs - rhs)) / scale) if scale > 0 else 0.0


def truncation_ratio(f: PowerExpFunction, grid: UniformGrid) -> float:
    """|f(k_max)| / max |f| on the grid."""
    values = np.abs(np.asarray(f.evaluate(grid.k_points)))
    peak = float(np.max(values))
    return float(max(values[0], values[-1]) / peak) if peak > 0 else 0.0

