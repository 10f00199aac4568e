"""Unit tests for the Douglas-Rachford, forward-backward and Condat-Vu solvers."""

import pytest
import numpy as np

from src.exceptions import (
    DimensionMismatchError,
    NormalizationError,
    SolverConfigurationError,
    StepSizeError,
)
from src.models import Method, SolveOptions
from src.services.comixture import envelope_gradient, proximal_average, validate
from src.services.linops import make_identity
from src.services.prox import (
    ball_set,
    box_set,
    huber_norm,
    indicator,
    prox_box,
    singleton_set,
    zero_function,
)
from src.services.solvers import (
    ERROR_DB_FLOOR,
    alternating_relaxation,
    check_step_sizes,
    condat_vu,
    condat_vu_steps,
    constant_relaxation,
    douglas_rachford,
    error_db,
    forward_backward,
)


def _point_comixture(a):
    return validate([(1.0, make_identity(a.shape), indicator(singleton_set(a)))])


def _halving_comixture():
    """Two Huber terms whose comixture prox is ``x / 2`` near the origin."""
    target = np.array([0.5, 0.0, 0.0])
    return proximal_average([huber_norm(target, 1.0), huber_norm(-target, 1.0)], [0.5, 0.5], (3,))


class TestErrorDb:
    """Test the normalized error in decibels."""

    def test_start_is_zero_db(self, rng):
        """Test x_n = x0 gives 0 dB."""
        x0, x_inf = rng.standard_normal(5), rng.standard_normal(5)
        assert error_db(x0, x0, x_inf) == pytest.approx(0.0, abs=1e-12)

    def test_tenth_is_minus_twenty(self):
        """Test a tenfold error reduction gives -20 dB."""
        x_inf = np.zeros(3)
        x0 = np.array([1.0, 2.0, 2.0])
        assert error_db(0.1 * x0, x0, x_inf) == pytest.approx(-20.0)

    def test_exact_solution_hits_floor(self):
        """Test x_n = x_inf is clamped to the floor."""
        x_inf = np.ones(3)
        assert error_db(x_inf, np.zeros(3), x_inf) == ERROR_DB_FLOOR == -300.0

    def test_undefined_normalization(self):
        """Test x0 = x_inf is rejected."""
        with pytest.raises(NormalizationError):
            error_db(np.zeros(2), np.ones(2), np.ones(2))


class TestRelaxation:
    """Test relaxation schedule helpers."""

    def test_constant(self):
        """Test the constant schedule."""
        assert constant_relaxation(1.5)(10) == 1.5

    def test_alternating(self):
        """Test the alternating schedule."""
        schedule = alternating_relaxation(0.5, 1.9)
        assert [schedule(n) for n in range(3)] == [0.5, 1.9, 0.5]

    @pytest.mark.parametrize("value", [0.0, 2.0, -1.0, 2.5])
    def test_out_of_range(self, value):
        """Test values outside (0, 2) are rejected."""
        with pytest.raises(SolverConfigurationError):
            constant_relaxation(value)


class TestDouglasRachford:
    """Test the Douglas-Rachford iteration."""

    def test_singleton_converges_in_two_iterations(self):
        """Test f = 0 with a point indicator reaches the point."""
        a = np.array([1.0, -2.0, 3.0])
        run = douglas_rachford(zero_function(), _point_comixture(a), None, SolveOptions(max_iters=10))

        np.testing.assert_allclose(run.final_iterate, a)
        assert run.converged
        assert run.iterations_used == 2
        assert run.final_residual == pytest.approx(0.0, abs=1e-12)
        assert run.method is Method.DOUGLAS_RACHFORD

    def test_two_points_keep_constant_gap(self):
        """Test two distinct point constraints leave the residual at their distance."""
        a, b = np.zeros(2), np.array([3.0, 4.0])
        run = douglas_rachford(indicator(singleton_set(b)), _point_comixture(a), None, SolveOptions(max_iters=5))

        assert not run.converged
        assert run.iterations_used == 5
        np.testing.assert_allclose(run.residuals, 5.0)
        np.testing.assert_allclose(run.final_iterate, a)

    def test_matching_points_converge(self):
        """Test equal point constraints are solved immediately."""
        a = np.array([3.0, 4.0])
        run = douglas_rachford(indicator(singleton_set(a)), _point_comixture(a), None, SolveOptions(max_iters=5))

        assert run.converged
        np.testing.assert_allclose(run.final_iterate, a)

    def test_callback_receives_shadow_and_governing_sequence(self):
        """Test the callback gets (n, x_n, y_n) with x_n the comixture prox of y_n."""
        c = _halving_comixture()
        seen = []
        opts = SolveOptions(max_iters=4, callback=lambda n, x, y: seen.append((n, x.copy(), y.copy())))
        douglas_rachford(zero_function(), c, np.array([0.3, 0.2, -0.1]), opts)

        assert [n for n, _, _ in seen] == [0, 1, 2, 3]
        for _, x, y in seen:
            np.testing.assert_allclose(x, 0.5 * y, atol=1e-12)

    def test_fejer_monotone(self, rng):
        """Test ||y_n - y*|| is nonincreasing for a known fixed point y*."""
        b = np.array([0.2, -0.1, 0.3, 0.0])
        c = proximal_average(
            [indicator(ball_set(np.zeros(4), 1.0)), indicator(box_set(-0.5, 0.5))], [0.4, 0.6], (4,)
        )
        governing = []
        opts = SolveOptions(max_iters=60, stop_residual=0.0,
                            callback=lambda n, x, y: governing.append(np.linalg.norm(y - b)))
        douglas_rachford(indicator(singleton_set(b)), c, 3.0 * rng.standard_normal(4), opts)

        assert np.all(np.diff(governing) <= 1e-12)

    def test_record_every(self):
        """Test sparse recording keeps the last iteration."""
        a, b = np.zeros(2), np.ones(2)
        run = douglas_rachford(indicator(singleton_set(b)), _point_comixture(a), None,
                               SolveOptions(max_iters=11, record_every=3))

        assert [entry.n for entry in run.history] == [0, 3, 6, 9, 10]

    def test_relaxation_checked_every_iteration(self):
        """Test a schedule leaving (0, 2) later on is rejected."""
        a, b = np.zeros(2), np.ones(2)
        opts = SolveOptions(max_iters=5, relaxation=lambda n: 1.0 if n == 0 else 2.5)
        with pytest.raises(SolverConfigurationError):
            douglas_rachford(indicator(singleton_set(b)), _point_comixture(a), None, opts)

    def test_start_shape_checked(self):
        """Test a y0 of the wrong shape is rejected."""
        with pytest.raises(DimensionMismatchError):
            douglas_rachford(zero_function(), _point_comixture(np.zeros(3)), np.zeros(4), SolveOptions(max_iters=2))

    def test_deterministic(self, exp1_small):
        """Test identical inputs give bit-identical histories."""
        c = validate(exp1_small.terms)
        opts = SolveOptions(max_iters=5, reference_solution=np.full(exp1_small.shape, 100.0))
        first = douglas_rachford(exp1_small.f, c, None, opts)
        second = douglas_rachford(exp1_small.f, c, None, opts)

        assert first.history == second.history
        np.testing.assert_array_equal(first.final_iterate, second.final_iterate)

    def test_residual_decreases_on_deblurring(self, exp1_small):
        """Test the residual drops over a short run."""
        run = douglas_rachford(exp1_small.f, validate(exp1_small.terms), None, SolveOptions(max_iters=40))

        assert np.all(np.isfinite(run.residuals))
        assert run.residuals[-1] < run.residuals[0]


class TestForwardBackward:
    """Test the forward-backward iteration."""

    def test_identity_gradient_with_origin(self):
        """Test grad f = Id and the origin indicator reach zero in one step."""
        x0 = np.ones(4)
        c = _point_comixture(np.zeros(4))
        run = forward_backward(lambda x: x, 1.0, c, x0, SolveOptions(max_iters=10))

        np.testing.assert_array_equal(run.final_iterate, np.zeros(4))
        assert run.history[0].residual == pytest.approx(2.0)
        assert run.converged
        assert run.iterations_used == 2

    def test_zero_gradient_halves_iterates(self):
        """Test the proximal-point iteration on the halving comixture."""
        x0 = np.array([0.3, 0.2, -0.1])
        run = forward_backward(lambda x: np.zeros_like(x), 1.0, _halving_comixture(), x0,
                               SolveOptions(max_iters=6, stop_residual=0.0, reference_solution=np.zeros(3)))

        np.testing.assert_allclose(run.final_iterate, x0 / 2 ** 6, atol=1e-14)
        np.testing.assert_allclose(run.residuals, np.linalg.norm(x0) / 2.0 ** np.arange(1, 7))
        np.testing.assert_allclose(run.errors_db, -20.0 * np.log10(2.0) * np.arange(6), atol=1e-9)

    def test_fixed_point_zeroes_envelope_gradient(self):
        """Test the converged point is a minimizer of the envelope."""
        c = _halving_comixture()
        run = forward_backward(lambda x: np.zeros_like(x), 1.0, c, np.array([0.3, 0.2, -0.1]),
                               SolveOptions(max_iters=200))

        assert run.converged
        assert np.linalg.norm(envelope_gradient(c, run.final_iterate)) <= 1e-9

    @pytest.mark.parametrize("beta", [0.0, 2.0, -1.0, 3.5])
    def test_beta_out_of_range(self, beta):
        """Test Lipschitz constants outside (0, 2) are rejected."""
        with pytest.raises(SolverConfigurationError):
            forward_backward(lambda x: x, beta, _point_comixture(np.zeros(2)), None, SolveOptions(max_iters=2))

    def test_group_lasso_residual_decreases(self, exp3_small):
        """Test FB on the group lasso instance."""
        f = exp3_small.f
        run = forward_backward(f.gradient, f.lipschitz, validate(exp3_small.terms), None,
                               SolveOptions(max_iters=200))

        assert run.residuals[-1] < run.residuals[0]

    def test_reference_equal_to_start(self):
        """Test a reference equal to the first iterate is rejected."""
        opts = SolveOptions(max_iters=3, reference_solution=np.zeros(2))
        with pytest.raises(NormalizationError):
            forward_backward(lambda x: x, 1.0, _point_comixture(np.zeros(2)), None, opts)


class TestCondatVu:
    """Test the primal-dual iteration."""

    def test_default_steps(self):
        """Test tau = 1/beta, sigma = 1/(1.1 beta) give a product of 1/1.1."""
        norms = [1.0, 1.0, 1.0, 1.0]
        tau, sigma = condat_vu_steps(norms)

        assert tau == pytest.approx(0.5)
        assert sigma == pytest.approx(1.0 / 2.2)
        assert check_step_sizes(tau, sigma, norms) == pytest.approx(1.0 / 1.1)

    def test_sigma_factor_must_exceed_one(self):
        """Test a factor of 1 is rejected."""
        with pytest.raises(SolverConfigurationError):
            condat_vu_steps([1.0], sigma_factor=1.0)

    def test_origin_contraction(self):
        """Test tau = sigma = 0.7 drives the iterates to zero."""
        terms = [(1.0, make_identity((4,)), indicator(singleton_set(np.zeros(4))))]
        run = condat_vu(zero_function(), terms, np.ones(4), None,
                        SolveOptions(max_iters=1000, tau=0.7, sigma=0.7))

        assert run.converged
        assert np.linalg.norm(run.final_iterate) < 1e-6
        assert run.method is Method.CONDAT_VU

    def test_step_size_rejected(self):
        """Test tau = sigma = 1.1 with a unit-norm operator is rejected."""
        terms = [(1.0, make_identity((4,)), indicator(singleton_set(np.zeros(4))))]
        with pytest.raises(StepSizeError) as exc_info:
            condat_vu(zero_function(), terms, None, None, SolveOptions(max_iters=10, tau=1.1, sigma=1.1))

        assert exc_info.value.product == pytest.approx(1.21)

    def test_primal_iterates_stay_in_box(self):
        """Test iterates after the first lie in C when f is its indicator."""
        inside = []
        terms = [(1.0, make_identity((3,)), huber_norm(np.full(3, 5.0), 1.0))]
        opts = SolveOptions(max_iters=30, callback=lambda n, x, aux: inside.append(
            n == 0 or np.array_equal(prox_box(x, 0.0, 1.0), x)
        ))
        condat_vu(indicator(box_set(0.0, 1.0)), terms, np.full(3, -3.0), None, opts)

        assert all(inside)

    def test_dual_count_checked(self):
        """Test the number of dual vectors must match the terms."""
        terms = [(1.0, make_identity((2,)), indicator(singleton_set(np.zeros(2))))]
        with pytest.raises(DimensionMismatchError):
            condat_vu(zero_function(), terms, None, [np.zeros(2), np.zeros(2)], SolveOptions(max_iters=2))

    def test_empty_terms(self):
        """Test at least one composite term is needed."""
        with pytest.raises(SolverConfigurationError):
            condat_vu(zero_function(), [], None, None, SolveOptions(max_iters=2))

    def test_deterministic(self, exp3_small):
        """Test identical inputs give bit-identical histories."""
        opts = SolveOptions(max_iters=20)
        first = condat_vu(exp3_small.f, exp3_small.terms, None, None, opts)
        second = condat_vu(exp3_small.f, exp3_small.terms, None, None, opts)

        assert first.history == second.history
