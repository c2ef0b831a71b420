"""Momentum-space realizations of the fractional factorization operators.

With units fixed so that the scale constant times hbar^alpha is 1,
the oscillator Hamiltonian H = -d^alpha/dx^alpha + x^2 acts in momentum
representation as |k|^alpha - d^2/dk^2, and factorizes as

    H = B A + eps,   A = i(|k|^(alpha/2) sgn k + d/dk),
                     B = i(d/dk - |k|^(alpha/2) sgn k),
                     eps = (alpha/2) |k|^(alpha/2 - 1).

The factorization energy eps is an operator of order alpha/2 - 1 and only
becomes the constant 1 at alpha = 2.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .errors import DomainError
from .powerexp import (
    COMBINE_TOL,
    Parity,
    PowerExpFunction,
    PowerSum,
    PowerTerm,
    check_alpha,
    relative_difference,
)

MAX_K_ORDER = 2


@dataclass(frozen=True)
class FractionalSymbol:
    """Momentum multiplier of a fractional derivative of a given order."""
    order: float
    multiplier: PowerTerm


def symbol_table(alpha: float) -> Dict[str, FractionalSymbol]:
    """The three fractional orders the oscillator factorization needs.

    Keys are "alpha", "alpha/2" and "alpha/2-1".
    """
    alpha = check_alpha(alpha)
    half = alpha / 2.0
    return {
        "alpha": FractionalSymbol(alpha, PowerTerm(-1.0, alpha, Parity.EVEN)),
        "alpha/2": FractionalSymbol(half, PowerTerm(1j, half, Parity.ODD)),
        "alpha/2-1": FractionalSymbol(half - 1.0, PowerTerm(1.0, half - 1.0, Parity.EVEN)),
    }


def symbol_composition_defect(alpha: float) -> float:
    """Worst relative mismatch of symbol(a/2)^2 = symbol(a) and symbol(a/2-1) * (i k) = symbol(a/2)."""
    table = symbol_table(alpha)
    half = PowerSum((table["alpha/2"].multiplier,))
    full = PowerSum((table["alpha"].multiplier,))
    ik = PowerSum((PowerTerm(1j, 1.0, Parity.ODD),))
    shifted = PowerSum((table["alpha/2-1"].multiplier,)) * ik
    return max(relative_difference(half * half, full), relative_difference(shifted, half))


def check_symbol_composition(alpha: float, tol: float = COMBINE_TOL) -> bool:
    return symbol_composition_defect(alpha) <= tol


@dataclass(frozen=True)
class MomentumOperator:
    """sum_j coefficient_j(k) * d^order_j/dk^order_j, with order_j in {0, 1, 2}."""
    alpha: float
    parts: Tuple[Tuple[PowerSum, int], ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        parts = tuple((coefficient, int(order)) for coefficient, order in self.parts)
        for coefficient, order in parts:
            if not 0 <= order <= MAX_K_ORDER:
                raise DomainError(f"k-derivative order must lie in 0..{MAX_K_ORDER}, got {order}")
            if not isinstance(coefficient, PowerSum):
                raise DomainError("operator coefficients must be power sums")
        object.__setattr__(self, "parts", parts)

    def apply(self, f: PowerExpFunction) -> PowerExpFunction:
        if not isinstance(f, PowerExpFunction):
            raise DomainError(f"{self.name or 'operator'} acts on power-exp functions only")
        if f.alpha != self.alpha:
            raise DomainError(f"Lévy index mismatch: operator {self.alpha}, function {f.alpha}")
        derivatives = [f]
        while len(derivatives) <= max((order for _, order in self.parts), default=0):
            derivatives.append(derivatives[-1].differentiate())
        result = PowerExpFunction(f.alpha, PowerSum((), f.body.combine_tol), f.has_envelope)
        for coefficient, order in self.parts:
            result = result + derivatives[order].multiply(coefficient)
        return result

    __call__ = apply


def operator_A(alpha: float) -> MomentumOperator:
    """Annihilation-type factor, i(|k|^(a/2) sgn k + d/dk)."""
    alpha = check_alpha(alpha)
    return MomentumOperator(alpha, (
        (PowerSum.monomial(1j, alpha / 2.0, Parity.ODD), 0),
        (PowerSum.constant(1j), 1),
    ), name="A")


def operator_B(alpha: float) -> MomentumOperator:
    """Creation-type factor, i(d/dk - |k|^(a/2) sgn k)."""
    alpha = check_alpha(alpha)
    return MomentumOperator(alpha, (
        (PowerSum.constant(1j), 1),
        (PowerSum.monomial(-1j, alpha / 2.0, Parity.ODD), 0),
    ), name="B")


def operator_H(alpha: float) -> MomentumOperator:
    """Hamiltonian |k|^a - d^2/dk^2."""
    alpha = check_alpha(alpha)
    return MomentumOperator(alpha, (
        (PowerSum.monomial(1.0, alpha, Parity.EVEN), 0),
        (PowerSum.constant(-1.0), 2),
    ), name="H")


def operator_eps(alpha: float) -> MomentumOperator:
    """Factorization energy (a/2) |k|^(a/2 - 1)."""
    alpha = check_alpha(alpha)
    return MomentumOperator(alpha, (
        (PowerSum.monomial(alpha / 2.0, alpha / 2.0 - 1.0, Parity.EVEN), 0),
    ), name="eps")


def boson_operators() -> Tuple[MomentumOperator, MomentumOperator]:
    """The conventional alpha = 2 factors i(k + d/dk) and i(d/dk - k)."""
    k = PowerSum.monomial(1.0, 1.0, Parity.ODD)
    a = MomentumOperator(2.0, ((k.scaled(1j), 0), (PowerSum.constant(1j), 1)), name="a")
    a_dagger = MomentumOperator(2.0, ((PowerSum.constant(1j), 1), (k.scaled(-1j), 0)), name="a+")
    return a, a_dagger


def apply_A(f: PowerExpFunction) -> PowerExpFunction:
    return operator_A(f.alpha).apply(f)


def apply_B(f: PowerExpFunction) -> PowerExpFunction:
    return operator_B(f.alpha).apply(f)


def apply_H(f: PowerExpFunction) -> PowerExpFunction:
    return operator_H(f.alpha).apply(f)


def apply_eps(f: PowerExpFunction) -> PowerExpFunction:
    return operator_eps(f.alpha).apply(f)


def factorization_residual(f: PowerExpFunction, combine_tol: Optional[float] = None) -> PowerExpFunction:
    """B(A f) + eps f - H f, which vanishes for every family member.

    Dropping of rounding debris is relative to the largest coefficient of
    the three pieces, not of the (near-zero) result. Pass combine_tol=0 to
    keep the debris for measurement.
    """
    pieces = [apply_B(apply_A(f)), apply_eps(f), apply_H(f)]
    reference = max(piece.body.scale for piece in pieces)
    tol = f.body.combine_tol if combine_tol is None else combine_tol
    residual = PowerSum(pieces[0].terms + pieces[1].terms + (-pieces[2].body).terms, tol)
    return PowerExpFunction(f.alpha, residual.normalize(reference), f.has_envelope)


def factorization_defect(f: PowerExpFunction) -> float:
    """Largest residual coefficient relative to the largest piece coefficient."""
    pieces = [apply_B(apply_A(f)), apply_eps(f), apply_H(f)]
    reference = max(piece.body.scale for piece in pieces)
    return residual_size(factorization_residual(f, combine_tol=0.0), reference)


def kernel_defect(f: PowerExpFunction) -> float:
    """Largest coefficient of A f, nothing dropped, relative to the largest of f."""
    exact = PowerExpFunction(f.alpha, PowerSum(f.terms, 0.0), f.has_envelope)
    return residual_size(apply_A(exact), f.body.scale)


def residual_size(f: PowerExpFunction, reference: float) -> float:
    """Largest coefficient of f relative to a reference scale."""
    if reference <= 0:
        return f.body.scale
    return f.body.scale / reference
