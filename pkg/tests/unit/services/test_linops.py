"""Unit tests for linear operators and the unitary DFT."""

import pytest
import numpy as np

from src.exceptions import DimensionMismatchError, OperatorConstructionError, SymmetryError
from src.models import Spectrum2D
from src.services.linops import (
    adjoint_apply,
    apply,
    check_adjoint,
    conjugate_reflection,
    dft2,
    idft2,
    make_convolution,
    make_coordinate_selector,
    make_finite_difference,
    make_identity,
    make_matrix_map,
    operator_norm_estimate,
    symmetric_closure,
)


class TestConvolution:
    """Test periodic blur operators."""

    def test_unit_kernel_is_identity(self, rng):
        """Test a 1x1 kernel leaves images unchanged."""
        op = make_convolution(1, 1, (8, 8))
        x = rng.standard_normal((8, 8))
        np.testing.assert_allclose(apply(op, x), x, atol=1e-12)

    def test_constant_image_preserved(self):
        """Test the normalized kernel maps a constant image to itself."""
        op = make_convolution(3, 11, (16, 16))
        np.testing.assert_allclose(apply(op, np.full((16, 16), 7.0)), 7.0, atol=1e-12)

    def test_impulse_response(self):
        """Test a one-hot image spreads over a centered kernel patch."""
        op = make_convolution(3, 5, (16, 16))
        x = np.zeros((16, 16))
        x[8, 8] = 1.0
        y = apply(op, x)

        assert np.count_nonzero(np.abs(y) > 1e-12) == 15
        np.testing.assert_allclose(y[7:10, 6:11], 1.0 / 15.0, atol=1e-12)

    def test_norm_bound(self):
        """Test power iteration stays below the declared bound."""
        op = make_convolution(3, 11, (32, 32))
        assert op.norm_bound == 1.0
        assert operator_norm_estimate(op) <= 1.0 + 1e-9

    def test_adjoint_identity(self, rng):
        """Test the adjoint identity on random pairs."""
        assert check_adjoint(make_convolution(7, 5, (16, 16)), rng=rng) < 1e-9

    def test_commutes_with_translation(self, rng):
        """Test periodic convolution commutes with circular shifts."""
        op = make_convolution(7, 5, (16, 16))
        x = rng.standard_normal((16, 16))
        shifted = np.roll(x, (3, -2), axis=(0, 1))
        np.testing.assert_allclose(apply(op, shifted), np.roll(apply(op, x), (3, -2), axis=(0, 1)), atol=1e-12)

    def test_kernel_too_large(self):
        """Test kernels larger than the image are rejected."""
        with pytest.raises(OperatorConstructionError):
            make_convolution(9, 3, (8, 8))

    def test_non_positive_kernel(self):
        """Test empty kernels are rejected."""
        with pytest.raises(OperatorConstructionError):
            make_convolution(0, 3, (8, 8))


class TestFiniteDifference:
    """Test the scaled periodic gradient."""

    def test_constant_image(self):
        """Test a constant image has zero differences."""
        op = make_finite_difference((6, 6))
        np.testing.assert_allclose(apply(op, np.full((6, 6), 3.0)), 0.0)

    def test_hand_computed_pair(self):
        """Test the 2x2 example: horizontal differences +-1, vertical 0."""
        op = make_finite_difference((2, 2))
        y = apply(op, np.array([[0.0, 1.0], [0.0, 1.0]]))
        scale = 1.0 / np.sqrt(8.0)

        assert y.shape == (2, 2, 2)
        np.testing.assert_allclose(y[0], scale * np.array([[1.0, -1.0], [1.0, -1.0]]))
        np.testing.assert_allclose(y[1], 0.0)

    def test_adjoint_identity(self, rng):
        """Test the adjoint identity on random 8x8 images."""
        assert check_adjoint(make_finite_difference((8, 8)), rng=rng) < 1e-9

    def test_norm_bound(self):
        """Test the normalized map has norm at most one."""
        op = make_finite_difference((16, 16))
        assert op.norm_bound == pytest.approx(1.0)
        assert operator_norm_estimate(op) <= op.norm_bound + 1e-6

    def test_unnormalized_norm(self):
        """Test the raw differences reach norm sqrt(8) on even grids."""
        op = make_finite_difference((8, 8), normalized=False)
        assert operator_norm_estimate(op, tol=1e-10, max_iters=5000) == pytest.approx(np.sqrt(8.0), rel=1e-3)

    def test_commutes_with_translation(self, rng):
        """Test differences commute with circular shifts."""
        op = make_finite_difference((8, 8))
        x = rng.standard_normal((8, 8))
        shifted = apply(op, np.roll(x, 2, axis=1))
        np.testing.assert_allclose(shifted, np.roll(apply(op, x), 2, axis=2), atol=1e-12)

    def test_degenerate_dims(self):
        """Test 1-pixel-wide images are rejected."""
        with pytest.raises(OperatorConstructionError):
            make_finite_difference((1, 8))


class TestCoordinateSelector:
    """Test group extraction operators."""

    def test_full_block_is_identity(self, rng):
        """Test selecting every coordinate is the identity."""
        op = make_coordinate_selector(1, 10, 10)
        x = rng.standard_normal(10)
        np.testing.assert_array_equal(apply(op, x), x)

    def test_second_group(self):
        """Test the second group of the 2255-dimensional layout covers 46..95."""
        op = make_coordinate_selector(46, 50, 2255)
        x = np.arange(1, 2256, dtype=float)
        block = apply(op, x)

        assert block[0] == 46.0
        assert block[-1] == 95.0
        assert block.size == 50

    def test_selector_after_adjoint(self, rng):
        """Test selecting a zero-padded block returns the block."""
        op = make_coordinate_selector(5, 4, 12)
        y = rng.standard_normal(4)
        padded = adjoint_apply(op, y)

        np.testing.assert_array_equal(apply(op, padded), y)
        assert np.count_nonzero(padded) == 4

    @pytest.mark.parametrize("start,length", [(0, 3), (9, 5), (3, 0)])
    def test_out_of_range(self, start, length):
        """Test blocks outside the ambient space are rejected."""
        with pytest.raises(OperatorConstructionError):
            make_coordinate_selector(start, length, 12)


class TestApplyAndNorm:
    """Test shape checks and power iteration."""

    def test_shape_mismatch(self):
        """Test applying to the wrong shape raises."""
        op = make_identity((4,))
        with pytest.raises(DimensionMismatchError) as exc_info:
            apply(op, np.zeros(5))
        assert exc_info.value.expected == (4,)
        assert exc_info.value.received == (5,)

    def test_adjoint_shape_mismatch(self):
        """Test applying the adjoint to the wrong shape raises."""
        op = make_finite_difference((4, 4))
        with pytest.raises(DimensionMismatchError):
            adjoint_apply(op, np.zeros((4, 4)))

    def test_matrix_norm_estimate(self, rng):
        """Test power iteration matches the largest singular value."""
        matrix = rng.standard_normal((30, 20))
        op = make_matrix_map(matrix)
        expected = np.linalg.norm(matrix, 2)

        assert operator_norm_estimate(op, tol=1e-12, max_iters=5000) == pytest.approx(expected, rel=1e-4)

    def test_zero_operator(self):
        """Test the zero operator has norm zero."""
        op = make_matrix_map(np.zeros((3, 3)))
        assert operator_norm_estimate(op) == 0.0

    def test_estimate_is_deterministic(self):
        """Test identical seeds give identical estimates."""
        op = make_convolution(3, 3, (8, 8))
        assert operator_norm_estimate(op, seed=3) == operator_norm_estimate(op, seed=3)

    def test_matrix_map_rejects_vectors(self):
        """Test matrix operators need a 2-D array."""
        with pytest.raises(OperatorConstructionError):
            make_matrix_map(np.ones(3))


class TestDFT:
    """Test the unitary 2-D DFT."""

    def test_delta_has_flat_spectrum(self):
        """Test a delta image maps to a constant modulus 1/sqrt(rows cols)."""
        x = np.zeros((4, 8))
        x[0, 0] = 1.0
        np.testing.assert_allclose(np.abs(dft2(x).coefficients), 1.0 / np.sqrt(32.0))

    def test_parseval(self, rng):
        """Test the transform preserves the norm."""
        x = rng.standard_normal((16, 16))
        assert np.linalg.norm(dft2(x).coefficients) == pytest.approx(np.linalg.norm(x), abs=1e-9)

    def test_round_trip(self, rng):
        """Test inverse after forward recovers the image."""
        x = rng.standard_normal((64, 64))
        assert np.max(np.abs(idft2(dft2(x)) - x)) <= 1e-9

    def test_matches_direct_sum(self, rng):
        """Test agreement with the O(N^2) definition on 8x8 images."""
        x = rng.standard_normal((8, 8))
        k = np.arange(8)
        basis = np.exp(-2j * np.pi * np.outer(k, k) / 8) / np.sqrt(8)
        assert np.max(np.abs(dft2(x).coefficients - basis @ x @ basis.T)) <= 1e-9

    def test_asymmetric_spectrum_rejected(self):
        """Test the inverse refuses spectra of complex images."""
        coefficients = np.zeros((4, 4), dtype=complex)
        coefficients[1, 2] = 1.0
        with pytest.raises(SymmetryError):
            idft2(Spectrum2D(coefficients))

    def test_dims_check(self):
        """Test the optional dimension check."""
        with pytest.raises(DimensionMismatchError):
            dft2(np.zeros((4, 4)), dims=(4, 8))

    def test_symmetric_closure(self):
        """Test the closure contains each frequency and its mirror."""
        mask = np.zeros((8, 8), dtype=bool)
        mask[1, 2] = True
        closed = symmetric_closure(mask)

        assert closed[1, 2] and closed[7, 6]
        assert np.count_nonzero(closed) == 2
        np.testing.assert_array_equal(closed, conjugate_reflection(closed))
