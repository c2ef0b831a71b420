"""Ladder states of the fractional oscillator and their local energies.

States are generated as phi_n = B^n phi_0 and kept unnormalized, exactly as
the ladder produces them (phi_1 carries the factor -2i). The k-dependent
energy E_n(k, alpha) is the pointwise ratio (H phi_n)(k) / phi_n(k); the
envelope cancels, leaving a ratio of two power sums.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from .errors import DomainError, EmptyCurveError, EvaluationError
from .operators import apply_B, apply_H
from .powerexp import (
    COMBINE_TOL,
    Parity,
    PowerExpFunction,
    PowerSum,
    PowerTerm,
    check_alpha,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_LEVEL = 12
NODE_SCAN_STEP = 1e-3
NODE_TOL = 1e-10
NODE_K_MAX = 20.0
EXCLUSION_STEPS = 5
# |denominator| below this fraction of its term magnitudes counts as a zero
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class StateIndex:
    """Excitation level n of phi_n."""
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 0:
            raise DomainError(f"state index must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))


def check_level(n: Union[int, StateIndex], max_level: int = DEFAULT_MAX_LEVEL) -> int:
    level = n.n if isinstance(n, StateIndex) else StateIndex(n).n
    if level > max_level:
        raise DomainError(f"state index {level} exceeds the configured maximum {max_level}")
    return level


def _term_magnitude(ps: PowerSum, k: np.ndarray) -> np.ndarray:
    magnitude = np.zeros(k.shape)
    for term in ps.terms:
        magnitude = magnitude + abs(term.coeff) * np.abs(k) ** term.power
    return magnitude


@dataclass(frozen=True)
class RationalPowerSum:
    """numerator / denominator, both power sums in k."""
    numerator: PowerSum
    denominator: PowerSum
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        if self.denominator.is_zero():
            raise DomainError("the denominator of a rational power sum cannot be zero")

    def simplified(self) -> "RationalPowerSum":
        """Cancel the lowest power (and a shared sgn factor) of the denominator.

        A single-term denominator is divided out completely.
        """
        denominator = self.denominator.normalize()
        if len(denominator.terms) == 1:
            divisor = denominator.terms[0]
        else:
            lowest = min(t.power for t in denominator.terms)
            parities = {t.parity for t in denominator.terms}
            parity = parities.pop() if len(parities) == 1 else Parity.EVEN
            divisor = PowerTerm(1.0, lowest, parity)
        return RationalPowerSum(
            self.numerator.divide_monomial(divisor),
            denominator.divide_monomial(divisor),
            self.alpha,
        )

    def evaluate(self, k: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Real value of the ratio; raises EvaluationError at zeros of the denominator."""
        points = np.asarray(k, dtype=float)
        denominator = np.asarray(self.denominator.evaluate(points))
        magnitude = _term_magnitude(self.denominator, points)
        singular = np.abs(denominator) <= SINGULAR_TOL * magnitude
        if np.any(singular):
            offending = float(np.atleast_1d(points)[np.atleast_1d(singular)][0])
            raise EvaluationError("local energy is undefined at a node of the state", k=offending)
        values = np.real(np.asarray(self.numerator.evaluate(points)) / denominator)
        if values.ndim == 0:
            return float(values)
        return values

    def equals(self, other: "RationalPowerSum", tol: float = COMBINE_TOL) -> bool:
        """Cross-multiplied equality n1 d2 == n2 d1."""
        return (self.numerator * other.denominator).equals(other.numerator * self.denominator, tol)

    def minus_constant_is_zero(self, value: float, tol: float = COMBINE_TOL) -> bool:
        """True iff the ratio is identically the constant value."""
        return self.numerator.equals(self.denominator.scaled(value), tol)


@dataclass(eq=False)
class EnergyCurve:
    """Samples of E_n(k, alpha) with windows around the origin and nodes removed."""
    alpha: float
    n: int
    k: np.ndarray
    energy: np.ndarray
    excluded_windows: Tuple[Tuple[float, float], ...] = ()

    @property
    def samples(self) -> List[Tuple[float, float]]:
        return list(zip(self.k.tolist(), self.energy.tolist()))

    def __len__(self) -> int:
        return len(self.k)


def ground_state(alpha: float) -> PowerExpFunction:
    """phi_0 = exp(-2|k|^(alpha/2+1)/(alpha+2)), the kernel of A."""
    return PowerExpFunction.from_terms(check_alpha(alpha), [PowerTerm(1.0, 0.0, Parity.EVEN)])


@lru_cache(maxsize=256)
def _ladder_state(alpha: float, n: int) -> PowerExpFunction:
    if n == 0:
        return ground_state(alpha)
    return apply_B(_ladder_state(alpha, n - 1))


def excited_state(alpha: float, n: Union[int, StateIndex], max_level: int = DEFAULT_MAX_LEVEL) -> PowerExpFunction:
    """phi_n = B^n phi_0, unnormalized."""
    return _ladder_state(check_alpha(alpha), check_level(n, max_level))


def local_energy_exact(
    alpha: float,
    n: Union[int, StateIndex],
    max_level: int = DEFAULT_MAX_LEVEL,
    simplify: bool = True,
) -> RationalPowerSum:
    """E_n(k, alpha) = (H phi_n) / phi_n as an exact ratio of power sums."""
    state = excited_state(alpha, n, max_level)
    if state.is_zero():
        raise DomainError(f"phi_{n} vanishes identically; no local energy")
    energy = RationalPowerSum(apply_H(state).body, state.body, state.alpha)
    return energy.simplified() if simplify else energy


def printed_energy(alpha: float, n: int) -> RationalPowerSum:
    """Closed-form energies for n = 0, 1 and the canonical n = 2 form."""
    alpha = check_alpha(alpha)
    half = alpha / 2.0
    one = PowerSum.constant(1.0)
    if n == 0:
        return RationalPowerSum(PowerSum.monomial(half, half - 1.0), one, alpha)
    if n == 1:
        numerator = PowerSum.from_terms([
            PowerTerm(3.0 * half, half - 1.0),
            PowerTerm(-half * (half - 1.0), -2.0),
        ])
        return RationalPowerSum(numerator, one, alpha)
    if n == 2:
        numerator = PowerSum.from_terms([
            PowerTerm(11.0 * alpha ** 2 / 2.0 - 6.0 * alpha, half - 1.0),
            PowerTerm(-10.0 * alpha, alpha),
            PowerTerm(-alpha * (half - 1.0) * (half - 2.0), -2.0),
        ])
        denominator = PowerSum.from_terms([PowerTerm(alpha, 0.0), PowerTerm(-4.0, half + 1.0)])
        return RationalPowerSum(numerator, denominator, alpha)
    raise DomainError(f"closed-form energies exist for n in {{0, 1, 2}}, got {n}")


def _printed_e2(alpha: float, k: np.ndarray, exponent: float) -> np.ndarray:
    half = alpha / 2.0
    ak = np.abs(k)
    denominator = half - 2.0 * ak ** (half + 1.0)
    first = 5.0 * (alpha / (2.0 * ak ** (1.0 - half))) * (alpha - 1.0 - 2.0 * ak ** exponent) / denominator
    second = (alpha / (2.0 * ak ** 2)) * (half - 1.0) * (2.0 - half + ak ** (half + 1.0)) / denominator
    return first + second


def printed_e2_verbatim(alpha: float, k: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """The printed E_2, with the factor (alpha - 1 - 2|k|^(3 alpha/2 - 1)) verbatim."""
    alpha = check_alpha(alpha)
    values = _printed_e2(alpha, np.asarray(k, dtype=float), 1.5 * alpha - 1.0)
    return float(values) if values.ndim == 0 else values


def corrected_e2(alpha: float, k: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """The printed E_2 with that exponent replaced by alpha/2 + 1."""
    alpha = check_alpha(alpha)
    values = _printed_e2(alpha, np.asarray(k, dtype=float), alpha / 2.0 + 1.0)
    return float(values) if values.ndim == 0 else values


def closed_form_energy(alpha: float, n: int, k: float, verbatim: bool = False) -> float:
    """Evaluate E_0, E_1 or E_2 at a single momentum k != 0.

    E_0 and E_1 use the printed formulas. E_2 uses the canonical form unless
    verbatim is set, in which case the printed formula is evaluated as is.
    """
    alpha = check_alpha(alpha)
    k = float(k)
    if k == 0.0:
        raise EvaluationError("closed-form energies are singular at the origin", k=k)
    half = alpha / 2.0
    ak = abs(k)
    base = alpha / (2.0 * ak ** (1.0 - half))
    if n == 0:
        return base
    if n == 1:
        return 3.0 * base - alpha / (2.0 * ak ** 2) * (half - 1.0)
    if n == 2:
        denominator = alpha - 4.0 * ak ** (half + 1.0)
        if abs(denominator) <= SINGULAR_TOL * (alpha + 4.0 * ak ** (half + 1.0)):
            raise EvaluationError("E_2 is undefined at the node of phi_2", k=k)
        if verbatim:
            return float(printed_e2_verbatim(alpha, k))
        return float(printed_energy(alpha, 2).evaluate(k))
    raise DomainError(f"closed-form energies exist for n in {{0, 1, 2}}, got {n}")


@dataclass(eq=False)
class E2Comparison:
    """Printed E_2 against the canonical form on a set of momenta."""
    alpha: float
    k: np.ndarray
    canonical: np.ndarray
    verbatim: np.ndarray
    corrected: np.ndarray
    tol: float

    @property
    def deviation(self) -> np.ndarray:
        return np.abs(self.verbatim - self.canonical)

    @property
    def agreement(self) -> np.ndarray:
        return self.deviation <= self.tol * np.maximum(1.0, np.abs(self.canonical))

    def max_deviation(self) -> float:
        return float(np.max(self.deviation)) if len(self.k) else 0.0

    def max_corrected_deviation(self) -> float:
        if not len(self.k):
            return 0.0
        return float(np.max(np.abs(self.corrected - self.canonical) / np.maximum(1.0, np.abs(self.canonical))))

    def agrees_everywhere(self) -> bool:
        return bool(np.all(self.agreement))

    def to_dict(self) -> dict:
        disagreeing = self.k[~self.agreement]
        return {
            "alpha": self.alpha,
            "points": int(len(self.k)),
            "agreeing_points": int(np.count_nonzero(self.agreement)),
            "max_deviation": self.max_deviation(),
            "max_corrected_deviation": self.max_corrected_deviation(),
            "disagreement_k_min": float(np.min(np.abs(disagreeing))) if len(disagreeing) else None,
            "disagreement_k_max": float(np.max(np.abs(disagreeing))) if len(disagreeing) else None,
        }


def compare_printed_e2(alpha: float, k: Sequence[float], tol: float = 1e-10) -> E2Comparison:
    """Compare the printed E_2 with the canonical form, skipping origin and node."""
    alpha = check_alpha(alpha)
    points = np.asarray(k, dtype=float)
    node = (alpha / 4.0) ** (2.0 / (alpha + 2.0))
    keep = (points != 0.0) & (np.abs(np.abs(points) - node) > 1e-6)
    points = points[keep]
    canonical = np.asarray(printed_energy(alpha, 2).evaluate(points))
    return E2Comparison(
        alpha=alpha,
        k=points,
        canonical=canonical,
        verbatim=np.asarray(printed_e2_verbatim(alpha, points)),
        corrected=np.asarray(corrected_e2(alpha, points)),
        tol=tol,
    )


def node_locations(
    alpha: float,
    n: Union[int, StateIndex],
    k_max: float = NODE_K_MAX,
    scan_step: float = NODE_SCAN_STEP,
    tol: float = NODE_TOL,
    max_level: int = DEFAULT_MAX_LEVEL,
) -> List[float]:
    """Positive zeros of the power-sum part of phi_n.

    Sign changes on a uniform scan bracket each root, which is then refined
    by bisection.
    """
    state = excited_state(alpha, n, max_level)
    body = state.body
    if len(body.terms) <= 1:
        return []
    leading = body.leading_term().coeff
    phase = leading / abs(leading)

    def prefactor(k):
        return np.real(np.asarray(body.evaluate(k)) / phase)

    grid = np.arange(scan_step, k_max + 0.5 * scan_step, scan_step)
    values = prefactor(grid)
    roots: List[float] = []
    for j in range(len(grid) - 1):
        if values[j] == 0.0:
            roots.append(float(grid[j]))
        elif values[j] * values[j + 1] < 0.0:
            roots.append(float(optimize.bisect(prefactor, grid[j], grid[j + 1], xtol=tol)))
    logger.debug("phi_%s at alpha=%s has %d node(s): %s", n, alpha, len(roots), roots)
    return roots


def energy_curve(
    alpha: float,
    n: Union[int, StateIndex],
    k_grid: Sequence[float],
    exclusion_radius: Optional[float] = None,
    max_level: int = DEFAULT_MAX_LEVEL,
) -> EnergyCurve:
    """Sample E_n(k, alpha) on k_grid, omitting windows around k = 0 and the nodes."""
    alpha = check_alpha(alpha)
    level = check_level(n, max_level)
    k = np.asarray(k_grid, dtype=float)
    if exclusion_radius is None:
        steps = np.diff(np.unique(k))
        exclusion_radius = EXCLUSION_STEPS * float(np.min(steps)) if len(steps) else 0.0
    centres = [0.0]
    scan_max = max(float(np.max(np.abs(k))) if len(k) else 0.0, 2.0 * NODE_SCAN_STEP)
    for node in node_locations(alpha, level, k_max=scan_max, max_level=max_level):
        centres.append(node)
        if np.any(k < 0):
            centres.append(-node)
    centres.sort()
    windows = tuple((c - exclusion_radius, c + exclusion_radius) for c in centres)
    admitted = np.ones(k.shape, dtype=bool)
    for lo, hi in windows:
        admitted &= ~((k >= lo) & (k <= hi))
    if not np.any(admitted):
        raise EmptyCurveError(f"every grid point of E_{level}(k, {alpha}) lies in an exclusion window")
    energy = np.asarray(local_energy_exact(alpha, level, max_level).evaluate(k[admitted]), dtype=float)
    return EnergyCurve(alpha=alpha, n=level, k=k[admitted], energy=energy, excluded_windows=windows)

