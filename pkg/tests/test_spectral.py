"""Tests for fracladder.spectral module."""

import logging

import numpy as np
import pytest

from fracladder.errors import DomainError
from fracladder.ladder import excited_state, ground_state
from fracladder.spectral import (
    Representation,
    SampledState,
    UniformGrid,
    admissible_mask,
    apply_hamiltonian_position,
    ensure_decay,
    normalized,
    phase_fixed,
    position_state,
    residual_momentum,
    riesz_apply,
    sample,
    second_derivative,
    to_momentum,
    to_position,
    truncation_ratio,
)


@pytest.fixture
def grid():
    """Momentum grid wide and fine enough for every test state."""
    return UniformGrid(k_max=20.0, n_points=2048)


def gaussian_position(grid):
    x = grid.x_points
    return normalized(SampledState(grid, np.exp(-x ** 2 / 2.0), 2.0, 0, Representation.POSITION))


class TestUniformGrid:
    """Test suite for UniformGrid."""

    def test_half_step_offset_avoids_origin(self, grid):
        """Test that k = 0 is never a grid point and the grid is symmetric."""
        k = grid.k_points

        assert not np.any(k == 0.0)
        np.testing.assert_allclose(k, -k[::-1])
        assert k[len(k) // 2] == pytest.approx(grid.spacing / 2.0)

    def test_dual_spacing(self, grid):
        """Test dx = 2 pi / (N dk)."""
        assert grid.x_spacing == pytest.approx(2.0 * np.pi / (grid.n_points * grid.spacing))

    @pytest.mark.parametrize("points", [8, 100, 1000])
    def test_rejects_bad_point_counts(self, points):
        """Test that point counts must be powers of two of at least 16."""
        with pytest.raises(DomainError):
            UniformGrid(10.0, points)

    def test_rejects_non_positive_extent(self):
        """Test that k_max must be positive."""
        with pytest.raises(DomainError):
            UniformGrid(0.0, 64)

    def test_enlarged_keeps_spacing(self, grid):
        """Test that enlarging doubles the extent at fixed spacing."""
        bigger = grid.enlarged()

        assert bigger.k_max == 2 * grid.k_max
        assert bigger.spacing == pytest.approx(grid.spacing)

    def test_refined_halves_spacing(self, grid):
        """Test that refining halves the spacing at fixed extent."""
        assert grid.refined().spacing == pytest.approx(grid.spacing / 2.0)


class TestTransform:
    """Test suite for the momentum/position transform."""

    def test_round_trip(self, grid):
        """Test that to_momentum inverts to_position."""
        phi = sample(excited_state(1.5, 2), grid, 2)
        back = to_momentum(to_position(phi))

        assert np.max(np.abs(back.values - phi.values)) <= 1e-10 * np.max(np.abs(phi.values))

    def test_unitary(self, grid):
        """Test that the discrete L2 norm is preserved."""
        phi = sample(excited_state(1.3, 1), grid, 1)

        assert to_position(phi).norm() == pytest.approx(phi.norm(), rel=1e-10)

    def test_gaussian_is_self_dual(self, grid):
        """Test that exp(-k^2/2) maps to exp(-x^2/2) at alpha = 2."""
        psi = to_position(sample(ground_state(2.0), grid, 0))
        x = grid.x_points
        window = np.abs(x) <= 5.0

        np.testing.assert_allclose(psi.values[window], np.exp(-x[window] ** 2 / 2.0), rtol=1e-8, atol=1e-12)

    def test_first_state_is_odd_hermite_gaussian(self, grid):
        """Test that psi_1 is proportional to x exp(-x^2/2) at alpha = 2."""
        psi = phase_fixed(position_state(2.0, 1, grid))
        x = grid.x_points
        reference = x * np.exp(-x ** 2 / 2.0)
        reference = reference / np.sqrt(np.sum(reference ** 2) * grid.x_spacing)
        if psi.values.real[np.argmax(x > 0.5)] < 0:
            reference = -reference

        np.testing.assert_allclose(psi.values, reference, atol=1e-8)

    def test_representation_enforced(self, grid):
        """Test that transforms check the input representation."""
        phi = sample(ground_state(1.5), grid)

        with pytest.raises(DomainError, match="position"):
            to_momentum(phi)

    def test_even_real_state_stays_real(self, grid):
        """Test that a real even phi_0 transforms to a real even psi_0."""
        psi = to_position(sample(ground_state(1.5), grid, 0)).values
        peak = np.max(np.abs(psi))

        assert np.max(np.abs(psi.imag)) <= 1e-12 * peak
        np.testing.assert_allclose(psi.real[::-1], psi.real, atol=1e-12 * peak)

    def test_odd_imaginary_state_becomes_real_odd(self, grid):
        """Test that the imaginary odd phi_1 transforms to a real odd psi_1."""
        psi = to_position(sample(excited_state(1.5, 1), grid, 1)).values
        peak = np.max(np.abs(psi))

        assert np.max(np.abs(psi.imag)) <= 1e-12 * peak
        np.testing.assert_allclose(psi.real[::-1], -psi.real, atol=1e-12 * peak)


class TestRiesz:
    """Test suite for the Riesz derivative."""

    def test_order_two_is_second_derivative(self, grid):
        """Test d^2/dx^2 exp(-x^2/2) = (x^2 - 1) exp(-x^2/2)."""
        psi = gaussian_position(grid)
        x = grid.x_points
        derivative = riesz_apply(psi, 2.0)

        np.testing.assert_allclose(derivative.values.real, (x ** 2 - 1.0) * psi.values.real, atol=1e-10)

    def test_order_out_of_range(self, grid):
        """Test that orders outside (0, 2] raise DomainError."""
        psi = gaussian_position(grid)

        for order in (0.0, 2.5):
            with pytest.raises(DomainError, match="order"):
                riesz_apply(psi, order)

    def test_hamiltonian_on_gaussian(self, grid):
        """Test -psi'' + x^2 psi = psi for the alpha = 2 ground state."""
        psi = position_state(2.0, 0, grid)
        result = apply_hamiltonian_position(psi)

        np.testing.assert_allclose(result.values, psi.values, atol=1e-9)


class TestStateHelpers:
    """Test suite for normalization, phase fixing and decay checks."""

    def test_normalized(self, grid):
        """Test unit discrete L2 norm."""
        phi = normalized(sample(excited_state(1.5, 3), grid, 3))

        assert phi.norm() == pytest.approx(1.0, rel=1e-12)

    def test_phase_fixed(self, grid):
        """Test that the largest sample becomes real and positive."""
        phi = phase_fixed(sample(excited_state(1.5, 1), grid, 1))
        peak = phi.values[np.argmax(np.abs(phi.values))]

        assert peak.real > 0
        assert abs(peak.imag) <= 1e-14 * abs(peak)

    def test_ensure_decay_enlarges(self, caplog):
        """Test that a too-narrow grid is enlarged and the enlargement logged."""
        narrow = UniformGrid(k_max=2.0, n_points=64)
        state = excited_state(1.5, 0)
        with caplog.at_level(logging.WARNING, logger="fracladder.spectral"):
            adequate = ensure_decay(state, narrow)

        assert adequate.k_max > narrow.k_max
        assert truncation_ratio(state, adequate) <= 1e-12
        assert "enlarging grid" in caplog.text

    def test_ensure_decay_keeps_adequate_grid(self, grid):
        """Test that an adequate grid is returned unchanged."""
        assert ensure_decay(ground_state(1.5), grid) == grid


class TestResidual:
    """Test suite for the numeric momentum-space residual."""

    @pytest.mark.parametrize("alpha", [1.2, 1.5])
    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_residual_small(self, alpha, n):
        """Test |k|^alpha phi - phi'' = E_n phi numerically, away from the origin and the node."""
        residual = residual_momentum(alpha, n, UniformGrid(20.0, 4096))

        assert residual <= 1e-5

    def test_residual_shrinks_on_refined_grid(self):
        """Test that halving the spacing lowers the residual of phi_1."""
        coarse_grid = UniformGrid(20.0, 2048)
        coarse = residual_momentum(1.5, 1, coarse_grid)
        fine = residual_momentum(1.5, 1, coarse_grid.refined())

        assert fine < coarse
        assert fine <= 1e-5

    def test_narrow_origin_window(self):
        """Test that phi_0 at alpha = 1.2 stays accurate down to |k| = 0.1."""
        assert residual_momentum(1.2, 0, UniformGrid(20.0, 4096), origin_window=0.1) <= 1e-5

    def test_stencil_exact_on_quadratic(self, grid):
        """Test that the stencil differentiates k^2 exactly in the interior."""
        k = grid.k_points
        curvature = second_derivative(k ** 2, grid)

        np.testing.assert_allclose(curvature[10:-10].real, 2.0, rtol=1e-6)
        assert np.isnan(curvature[0])

    def test_unknown_method(self, grid):
        """Test that an unknown differentiation method raises DomainError."""
        with pytest.raises(DomainError):
            second_derivative(grid.k_points, grid, method="magic")

    def test_mask_excludes_origin_and_node(self):
        """Test that the admissible mask leaves out the origin window and the phi_2 node."""
        grid = UniformGrid(20.0, 4096)
        mask = admissible_mask(1.5, 2, grid)
        k = grid.k_points
        node = (1.5 / 4.0) ** (2.0 / 3.5)

        assert not np.any(mask & (np.abs(k) < 0.25))
        assert not np.any(mask & (np.abs(np.abs(k) - node) <= 5 * grid.spacing))
