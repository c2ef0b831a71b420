"""Tests for fracladder.powerexp module."""

import math

import numpy as np
import pytest

from fracladder.errors import DomainError, EvaluationError
from fracladder.powerexp import (
    ALPHA_SWEEP,
    Envelope,
    Parity,
    PowerExpFunction,
    PowerSum,
    PowerTerm,
    check_alpha,
    random_member,
    relative_difference,
)


class TestCheckAlpha:
    """Test suite for the Lévy index range check."""

    @pytest.mark.parametrize("alpha", [1.0001, 1.2, 1.5, 2.0])
    def test_accepts_admissible_range(self, alpha):
        """Test that 1 < alpha <= 2 is accepted."""
        assert check_alpha(alpha) == alpha

    @pytest.mark.parametrize("alpha", [1.0, 0.5, 2.5, float("nan"), float("inf")])
    def test_rejects_outside_range(self, alpha):
        """Test that alpha outside (1, 2] raises DomainError."""
        with pytest.raises(DomainError, match="1 < α ≤ 2"):
            check_alpha(alpha)

    def test_sweep_covers_tenths(self):
        """Test that the identity sweep is 1.1, 1.2, ..., 2.0."""
        assert ALPHA_SWEEP[0] == 1.1
        assert ALPHA_SWEEP[-1] == 2.0
        assert len(ALPHA_SWEEP) == 10


class TestPowerSum:
    """Test suite for PowerSum arithmetic."""

    def test_duplicate_keys_merge(self):
        """Test that equal (power, parity) keys are merged."""
        ps = PowerSum.from_terms([PowerTerm(1.0, 0.5), PowerTerm(2.0, 0.5)])

        assert len(ps.terms) == 1
        assert ps.terms[0].coeff == 3.0

    def test_nearly_equal_powers_merge(self):
        """Test that powers differing only by rounding are one key."""
        ps = PowerSum.from_terms([PowerTerm(1.0, 0.1 + 0.2), PowerTerm(1.0, 0.3)])

        assert len(ps.terms) == 1

    def test_parities_are_kept_apart(self):
        """Test that even and odd terms of the same power do not merge."""
        ps = PowerSum.from_terms([PowerTerm(1.0, 1.0, Parity.EVEN), PowerTerm(1.0, 1.0, Parity.ODD)])

        assert len(ps.terms) == 2

    def test_cancellation_drops_terms(self):
        """Test that x - x normalizes to the zero sum."""
        x = PowerSum.monomial(1.5, 0.75, Parity.ODD)

        assert (x - x).is_zero()

    def test_relative_drop_threshold(self):
        """Test that coefficients below 1e-12 of the largest are dropped."""
        ps = PowerSum.from_terms([PowerTerm(1.0, 0.0), PowerTerm(1e-14, 2.0)])

        assert len(ps.terms) == 1

    def test_terms_sorted_by_power(self):
        """Test the canonical (power, parity) ordering."""
        ps = PowerSum.from_terms([PowerTerm(1.0, 2.0), PowerTerm(1.0, -1.0), PowerTerm(1.0, 0.5, Parity.ODD)])

        assert [t.power for t in ps.terms] == [-1.0, 0.5, 2.0]

    def test_product_composes_parity(self):
        """Test that sgn(k) * sgn(k) = 1."""
        odd = PowerSum.monomial(2.0, 0.5, Parity.ODD)
        square = odd * odd

        assert square.terms == (PowerTerm(4.0, 1.0, Parity.EVEN),)

    def test_divide_monomial(self):
        """Test division by a single monomial."""
        ps = PowerSum.from_terms([PowerTerm(2.0, 1.0), PowerTerm(4.0, 3.0)])
        divided = ps.divide_monomial(PowerTerm(2.0, 1.0))

        assert divided.equals(PowerSum.from_terms([PowerTerm(1.0, 0.0), PowerTerm(2.0, 2.0)]))

    def test_divide_by_zero_monomial_fails(self):
        """Test that dividing by a zero monomial raises DomainError."""
        with pytest.raises(DomainError):
            PowerSum.constant(1.0).divide_monomial(PowerTerm(0.0, 1.0))

    def test_bare_derivative(self):
        """Test d/dk |k|^p sgn(k) = p |k|^(p-1)."""
        ps = PowerSum.monomial(1.0, 1.75, Parity.ODD)

        assert ps.derivative().equals(PowerSum.monomial(1.75, 0.75, Parity.EVEN))

    def test_derivative_of_constant_vanishes(self):
        """Test that constants (even or odd) differentiate to zero away from k = 0."""
        assert PowerSum.constant(3.0).derivative().is_zero()
        assert PowerSum.monomial(3.0, 0.0, Parity.ODD).derivative().is_zero()

    def test_evaluate_scalar_and_array(self):
        """Test vectorized evaluation including the sgn factor."""
        ps = PowerSum.from_terms([PowerTerm(1.0, 2.0), PowerTerm(1.0, 1.0, Parity.ODD)])

        assert ps.evaluate(2.0) == pytest.approx(6.0)
        np.testing.assert_allclose(ps.evaluate(np.array([-2.0, 2.0])), [2.0, 6.0])

    def test_negative_power_at_origin_fails(self):
        """Test that evaluating a negative power at k = 0 raises EvaluationError."""
        ps = PowerSum.monomial(1.0, -2.0)

        with pytest.raises(EvaluationError) as excinfo:
            ps.evaluate(np.array([0.0, 1.0]))
        assert excinfo.value.k == 0.0

    def test_leading_term_of_zero_fails(self):
        """Test that the zero sum has no leading term."""
        with pytest.raises(DomainError):
            PowerSum().leading_term()

    @pytest.mark.parametrize("seed", range(5))
    def test_normalize_is_idempotent(self, seed):
        """Test that normalizing a canonical sum changes nothing."""
        body = random_member(1.4, 8, np.random.default_rng(seed)).body

        assert body.normalize().terms == body.terms
        assert body.normalize().normalize().terms == body.normalize().terms

    def test_relative_difference(self):
        """Test the coefficient-wise relative difference."""
        a = PowerSum.from_terms([PowerTerm(1.0, 0.0), PowerTerm(2.0, 1.0)])
        b = PowerSum.from_terms([PowerTerm(1.0, 0.0), PowerTerm(2.5, 1.0)])

        assert relative_difference(a, b) == pytest.approx(0.2)
        assert relative_difference(a, a) == 0.0


class TestEnvelope:
    """Test suite for the stretched exponential envelope."""

    @pytest.mark.parametrize("alpha", ALPHA_SWEEP)
    def test_c_gamma_identity(self, alpha):
        """Test that c * gamma = 1 for every alpha."""
        assert Envelope(alpha).identity_defect() <= 1e-15

    def test_gaussian_at_alpha_two(self):
        """Test that the envelope is exp(-k^2/2) at alpha = 2."""
        k = np.linspace(-3, 3, 13)

        np.testing.assert_allclose(Envelope(2.0).value(k), np.exp(-k ** 2 / 2.0))

    def test_log_derivative(self):
        """Test that the envelope derivative is -|k|^(alpha/2) sgn(k) times the envelope."""
        assert Envelope(1.5).log_derivative() == PowerTerm(-1.0, 0.75, Parity.ODD)


class TestPowerExpFunction:
    """Test suite for PowerExpFunction."""

    def test_ground_state_values(self):
        """Test phi_0(1) = exp(-2/(alpha+2))."""
        for alpha in (1.2, 1.5, 2.0):
            phi = PowerExpFunction.from_terms(alpha, [PowerTerm(1.0, 0.0)])
            assert phi.evaluate(1.0).real == pytest.approx(math.exp(-2.0 / (alpha + 2.0)), rel=1e-14)

        assert PowerExpFunction.from_terms(2.0, [PowerTerm(1.0, 0.0)]).evaluate(1.0).real == pytest.approx(0.60653, abs=1e-5)

    def test_alpha_mismatch_rejected(self):
        """Test that combining different Lévy indices raises DomainError."""
        f = PowerExpFunction.from_terms(1.2, [PowerTerm(1.0, 0.0)])
        g = PowerExpFunction.from_terms(1.5, [PowerTerm(1.0, 0.0)])

        with pytest.raises(DomainError, match="mismatch"):
            f + g

    def test_envelope_mismatch_rejected(self):
        """Test that functions with and without the envelope do not combine."""
        f = PowerExpFunction.from_terms(1.5, [PowerTerm(1.0, 0.0)])
        g = PowerExpFunction.from_terms(1.5, [PowerTerm(1.0, 0.0)], has_envelope=False)

        with pytest.raises(DomainError):
            f - g

    def test_foreign_operand_rejected(self):
        """Test that non-family operands raise DomainError."""
        f = PowerExpFunction.from_terms(1.5, [PowerTerm(1.0, 0.0)])

        with pytest.raises(DomainError, match="outside the power-exp family"):
            f.add(1.0)

    def test_invalid_alpha_rejected(self):
        """Test construction with alpha outside (1, 2]."""
        with pytest.raises(DomainError):
            PowerExpFunction(2.5)

    def test_differentiate_ground_state(self):
        """Test phi_0' = -|k|^(alpha/2) sgn(k) phi_0."""
        phi = PowerExpFunction.from_terms(1.5, [PowerTerm(1.0, 0.0)])

        assert phi.differentiate().body.equals(PowerSum.monomial(-1.0, 0.75, Parity.ODD))

    def test_differentiate_matches_finite_difference(self):
        """Test the product rule against a centred difference at k = 0.8."""
        rng = np.random.default_rng(7)
        f = random_member(1.3, 4, rng)
        h = 1e-5
        numeric = (f.evaluate(0.8 + h) - f.evaluate(0.8 - h)) / (2 * h)

        assert f.differentiate().evaluate(0.8) == pytest.approx(numeric, rel=1e-6, abs=1e-8)

    def test_differentiate_without_envelope(self):
        """Test that bare power sums differentiate without the chain term."""
        f = PowerExpFunction.from_terms(1.5, [PowerTerm(1.0, 2.0)], has_envelope=False)

        assert f.differentiate().body.equals(PowerSum.monomial(2.0, 1.0, Parity.ODD))

    @pytest.mark.parametrize("seed", range(5))
    def test_differentiate_is_linear(self, seed):
        """Test (a f + b g)' = a f' + b g' coefficient-wise."""
        rng = np.random.default_rng(100 + seed)
        f, g = random_member(1.6, 5, rng), random_member(1.6, 5, rng)
        a, b = complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())

        combined = (f.scale(a) + g.scale(b)).differentiate()
        separate = f.differentiate().scale(a) + g.differentiate().scale(b)

        assert relative_difference(combined.body, separate.body) <= 1e-10

    @pytest.mark.parametrize("seed", range(10))
    def test_differentiate_matches_finite_difference_on_random_points(self, seed):
        """Test the product rule against centred differences for k in [0.2, 5]."""
        rng = np.random.default_rng(200 + seed)
        alpha = float(rng.uniform(1.05, 2.0))
        f = random_member(alpha, 4, rng)
        derivative = f.differentiate()
        h = 1e-6

        for k in rng.uniform(0.2, 5.0, size=4):
            numeric = (f.evaluate(k + h) - f.evaluate(k - h)) / (2 * h)
            assert derivative.evaluate(k) == pytest.approx(numeric, rel=1e-5, abs=1e-6)

    def test_zero_function(self):
        """Test the zero member of the family."""
        zero = PowerExpFunction.zero(1.5)

        assert zero.is_zero()
        assert zero.evaluate(1.0) == 0


class TestRandomMember:
    """Test suite for the random family member generator."""

    def test_reproducible_with_seed(self):
        """Test that equal seeds give equal members."""
        a = random_member(1.5, 5, np.random.default_rng(3))
        b = random_member(1.5, 5, np.random.default_rng(3))

        assert a.equals(b)

    def test_term_count_bounded(self):
        """Test that at most n_terms terms survive merging."""
        f = random_member(1.7, 6, np.random.default_rng(11))

        assert 1 <= len(f.terms) <= 6
        assert f.alpha == 1.7
