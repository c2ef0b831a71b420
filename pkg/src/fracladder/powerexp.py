"""Exact arithmetic on the stretched-exponential power-sum family.

Every state handled by fracladder has the form

    f(k) = (sum_j c_j |k|^p_j sgn(k)^s_j) * exp(-2|k|^(alpha/2+1) / (alpha+2))

for k != 0. Coefficients are complex doubles and the Lévy index is fixed per
function instance. Values are immutable; every operation returns a new one.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np

from .errors import DomainError, EvaluationError

ALPHA_MIN = 1.0
ALPHA_MAX = 2.0

# Lévy indices swept by the identity checks: 1.1, 1.2, ..., 2.0
ALPHA_SWEEP: Tuple[float, ...] = tuple(round(1.1 + 0.1 * i, 10) for i in range(10))

COMBINE_TOL = 1e-12
# Powers closer than this (per parity) are the same power.
POWER_TOL = 1e-9

ArrayLike = Union[float, np.ndarray]


def check_alpha(alpha: float) -> float:
    """Return alpha as a float, raising DomainError unless 1 < alpha <= 2."""
    try:
        value = float(alpha)
    except (TypeError, ValueError):
        raise DomainError(f"Lévy index must be a real number, got {alpha!r}")
    if not math.isfinite(value) or not (ALPHA_MIN < value <= ALPHA_MAX):
        raise DomainError(f"Lévy index must satisfy 1 < α ≤ 2, got {value}")
    return value


class Parity(Enum):
    """Number of sgn(k) factors, modulo 2."""
    EVEN = 0
    ODD = 1

    def __mul__(self, other: "Parity") -> "Parity":
        return Parity((self.value + other.value) % 2)

    def flipped(self) -> "Parity":
        return self * Parity.ODD


@dataclass(frozen=True)
class PowerTerm:
    """A single signed power c * |k|^p * sgn(k)^parity."""
    coeff: complex
    power: float
    parity: Parity = Parity.EVEN

    def __post_init__(self):
        object.__setattr__(self, "coeff", complex(self.coeff))
        object.__setattr__(self, "power", float(self.power))
        if not isinstance(self.parity, Parity):
            object.__setattr__(self, "parity", Parity(int(self.parity) % 2))

    def __mul__(self, other: "PowerTerm") -> "PowerTerm":
        return PowerTerm(self.coeff * other.coeff, self.power + other.power, self.parity * other.parity)

    def scaled(self, factor: complex) -> "PowerTerm":
        return PowerTerm(self.coeff * factor, self.power, self.parity)

    def evaluate(self, k: np.ndarray) -> np.ndarray:
        values = self.coeff * np.abs(k) ** self.power
        if self.parity is Parity.ODD:
            values = values * np.sign(k)
        return values


def _merge_terms(terms: Iterable[PowerTerm]) -> List[PowerTerm]:
    """Merge terms sharing a parity whose powers agree within POWER_TOL."""
    merged: List[PowerTerm] = []
    terms = list(terms)
    for parity in Parity:
        group = sorted((t for t in terms if t.parity is parity), key=lambda t: t.power)
        anchor: Optional[float] = None
        coeff = 0j
        for term in group:
            if anchor is not None and term.power - anchor <= POWER_TOL:
                coeff += term.coeff
                continue
            if anchor is not None:
                merged.append(PowerTerm(coeff, anchor, parity))
            anchor, coeff = term.power, term.coeff
        if anchor is not None:
            merged.append(PowerTerm(coeff, anchor, parity))
    return merged


@dataclass(frozen=True)
class PowerSum:
    """Finite sum of PowerTerms.

    The combine tolerance is relative to the largest coefficient magnitude,
    or to an explicit reference scale when one is supplied to normalize().
    """
    terms: Tuple[PowerTerm, ...] = ()
    combine_tol: float = COMBINE_TOL

    def __post_init__(self):
        terms = tuple(self.terms)
        for term in terms:
            if not isinstance(term, PowerTerm):
                raise DomainError(f"power sums only hold PowerTerm values, got {type(term).__name__}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_terms(cls, terms: Iterable[PowerTerm], combine_tol: float = COMBINE_TOL) -> "PowerSum":
        return cls(tuple(terms), combine_tol).normalize()

    @classmethod
    def monomial(cls, coeff: complex, power: float, parity: Parity = Parity.EVEN) -> "PowerSum":
        return cls.from_terms([PowerTerm(coeff, power, parity)])

    @classmethod
    def constant(cls, value: complex) -> "PowerSum":
        return cls.monomial(value, 0.0)

    @property
    def scale(self) -> float:
        """Largest coefficient magnitude, 0 for the empty sum."""
        return max((abs(t.coeff) for t in self.terms), default=0.0)

    def is_zero(self) -> bool:
        return not self.normalize().terms

    def normalize(self, reference: Optional[float] = None) -> "PowerSum":
        """Return the canonical form.

        Duplicate (power, parity) keys are merged, coefficients at or below
        combine_tol * max(scale, reference) are dropped, and terms are sorted
        by (power, parity).
        """
        threshold = self.combine_tol * max(self.scale, reference or 0.0)
        kept = [t for t in _merge_terms(self.terms) if abs(t.coeff) > threshold]
        kept.sort(key=lambda t: (t.power, t.parity.value))
        return PowerSum(tuple(kept), self.combine_tol)

    def _combine(self, terms: Iterable[PowerTerm], reference: float) -> "PowerSum":
        return PowerSum(tuple(terms), self.combine_tol).normalize(reference)

    def __add__(self, other: "PowerSum") -> "PowerSum":
        return self._combine(self.terms + other.terms, max(self.scale, other.scale))

    def __neg__(self) -> "PowerSum":
        return self.scaled(-1.0)

    def __sub__(self, other: "PowerSum") -> "PowerSum":
        return self + (-other)

    def __mul__(self, other: Union["PowerSum", complex, float]) -> "PowerSum":
        if not isinstance(other, PowerSum):
            return self.scaled(other)
        products = [a * b for a in self.terms for b in other.terms]
        return self._combine(products, self.scale * other.scale)

    __rmul__ = __mul__

    def scaled(self, factor: complex) -> "PowerSum":
        factor = complex(factor)
        if factor == 0:
            return PowerSum((), self.combine_tol)
        return PowerSum(tuple(t.scaled(factor) for t in self.terms), self.combine_tol).normalize()

    def mul_power(self, power: float, parity: Parity = Parity.EVEN) -> "PowerSum":
        return self * PowerSum((PowerTerm(1.0, power, parity),), self.combine_tol)

    def divide_monomial(self, term: PowerTerm) -> "PowerSum":
        """Divide every term by a single nonzero monomial."""
        if term.coeff == 0:
            raise DomainError("cannot divide a power sum by a zero monomial")
        inverse = PowerTerm(1.0 / term.coeff, -term.power, term.parity)
        return self * PowerSum((inverse,), self.combine_tol)

    def derivative(self) -> "PowerSum":
        """d/dk of the bare sum (no envelope), valid for k != 0."""
        terms = [PowerTerm(t.coeff * t.power, t.power - 1.0, t.parity.flipped())
                 for t in self.terms if t.power != 0.0]
        return self._combine(terms, self.scale * max((abs(t.power) for t in self.terms), default=0.0))

    def has_negative_powers(self) -> bool:
        return any(t.power < 0 for t in self.terms)

    def evaluate(self, k: ArrayLike) -> Union[complex, np.ndarray]:
        """Evaluate the sum at k (scalar or array)."""
        points = np.asarray(k, dtype=float)
        if self.has_negative_powers() and np.any(points == 0.0):
            raise EvaluationError("negative power evaluated at the origin", k=0.0)
        values = np.zeros(points.shape, dtype=complex)
        for term in self.terms:
            values = values + term.evaluate(points)
        if values.ndim == 0:
            return complex(values)
        return values

    def equals(self, other: "PowerSum", tol: float = COMBINE_TOL) -> bool:
        """True iff both sums agree term-by-term within relative tolerance tol."""
        difference = PowerSum(self.terms + (-other).terms, tol)
        return not difference.normalize(max(self.scale, other.scale)).terms

    def leading_term(self) -> PowerTerm:
        """Term with the largest coefficient magnitude."""
        if not self.terms:
            raise DomainError("the zero sum has no leading term")
        return max(self.terms, key=lambda t: abs(t.coeff))


@dataclass(frozen=True)
class Envelope:
    """The stretched exponential exp(-c |k|^gamma) with c = 2/(alpha+2)."""
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))

    @property
    def gamma(self) -> float:
        return self.alpha / 2.0 + 1.0

    @property
    def c(self) -> float:
        return 2.0 / (self.alpha + 2.0)

    def identity_defect(self) -> float:
        """|c * gamma - 1|; zero up to rounding for every alpha."""
        return abs(self.c * self.gamma - 1.0)

    def log_derivative(self) -> PowerTerm:
        # c * gamma = 1, so the chain rule leaves -|k|^(alpha/2) sgn(k).
        return PowerTerm(-1.0, self.alpha / 2.0, Parity.ODD)

    def value(self, k: ArrayLike) -> np.ndarray:
        return np.exp(-self.c * np.abs(np.asarray(k, dtype=float)) ** self.gamma)


@dataclass(frozen=True)
class PowerExpFunction:
    """A power sum times the envelope (or without it when has_envelope is False)."""
    alpha: float
    body: PowerSum = PowerSum()
    has_envelope: bool = True

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        if not isinstance(self.body, PowerSum):
            raise DomainError(f"function body must be a PowerSum, got {type(self.body).__name__}")

    @classmethod
    def zero(cls, alpha: float, has_envelope: bool = True) -> "PowerExpFunction":
        return cls(alpha, PowerSum(), has_envelope)

    @classmethod
    def from_terms(cls, alpha: float, terms: Iterable[PowerTerm], has_envelope: bool = True) -> "PowerExpFunction":
        return cls(alpha, PowerSum.from_terms(terms), has_envelope)

    @property
    def envelope(self) -> Optional[Envelope]:
        return Envelope(self.alpha) if self.has_envelope else None

    @property
    def terms(self) -> Tuple[PowerTerm, ...]:
        return self.body.terms

    def _with_body(self, body: PowerSum) -> "PowerExpFunction":
        return PowerExpFunction(self.alpha, body, self.has_envelope)

    def _check_compatible(self, other: "PowerExpFunction") -> None:
        if not isinstance(other, PowerExpFunction):
            raise DomainError(f"operand is outside the power-exp family: {type(other).__name__}")
        if other.alpha != self.alpha:
            raise DomainError(f"Lévy index mismatch: {self.alpha} vs {other.alpha}")
        if other.has_envelope != self.has_envelope:
            raise DomainError("cannot combine functions with and without the envelope")

    def is_zero(self) -> bool:
        return self.body.is_zero()

    def normalize(self, reference: Optional[float] = None) -> "PowerExpFunction":
        return self._with_body(self.body.normalize(reference))

    def add(self, other: "PowerExpFunction") -> "PowerExpFunction":
        self._check_compatible(other)
        return self._with_body(self.body + other.body)

    __add__ = add

    def __neg__(self) -> "PowerExpFunction":
        return self.scale(-1.0)

    def __sub__(self, other: "PowerExpFunction") -> "PowerExpFunction":
        self._check_compatible(other)
        return self._with_body(self.body - other.body)

    def scale(self, factor: complex) -> "PowerExpFunction":
        return self._with_body(self.body.scaled(factor))

    def multiply(self, factor: PowerSum) -> "PowerExpFunction":
        """Multiply by a bare power sum; stays in the family."""
        return self._with_body(self.body * factor)

    def mul_power(self, power: float, parity: Parity = Parity.EVEN) -> "PowerExpFunction":
        return self._with_body(self.body.mul_power(power, parity))

    def differentiate(self) -> "PowerExpFunction":
        """d/dk by the product rule, away from k = 0.

        The 2*delta(k) produced by differentiating sgn(k) is not represented.
        """
        derivative = self.body.derivative()
        if self.has_envelope:
            chain = self.body * PowerSum((self.envelope.log_derivative(),), self.body.combine_tol)
            derivative = derivative + chain
        return self._with_body(derivative)

    def evaluate(self, k: ArrayLike) -> Union[complex, np.ndarray]:
        values = self.body.evaluate(k)
        if self.has_envelope:
            values = values * self.envelope.value(k)
            if np.ndim(values) == 0:
                return complex(values)
        return values

    def equals(self, other: "PowerExpFunction", tol: float = COMBINE_TOL) -> bool:
        self._check_compatible(other)
        return self.body.equals(other.body, tol)


def random_member(
    alpha: float,
    n_terms: int,
    rng: np.random.Generator,
    has_envelope: bool = True,
) -> PowerExpFunction:
    """Draw a family member with n_terms terms for property checks.

    Powers mix the lattice alpha/2 multiples the ladder produces with
    arbitrary reals in [-1.5, 3].
    """
    alpha = check_alpha(alpha)
    lattice = [0.0, alpha / 2.0, alpha / 2.0 - 1.0, alpha, 1.0]
    terms = []
    for _ in range(n_terms):
        if rng.random() < 0.5:
            power = lattice[int(rng.integers(len(lattice)))]
        else:
            power = float(rng.uniform(-1.5, 3.0))
        coeff = complex(rng.normal(), rng.normal())
        parity = Parity(int(rng.integers(2)))
        terms.append(PowerTerm(coeff, power, parity))
    return PowerExpFunction.from_terms(alpha, terms, has_envelope)


def relative_difference(a: PowerSum, b: PowerSum) -> float:
    """Largest coefficient of a - b (nothing dropped) over the larger operand scale."""
    difference = PowerSum(a.terms + (-b).terms, 0.0).normalize()
    reference = max(a.scale, b.scale)
    return difference.scale / reference if reference > 0 else difference.scale
