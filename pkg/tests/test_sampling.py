import numpy as np
import pytest

from gfm.models import ProblemMeta, ProblemSpec, SmoothingParams, derive_stream
from gfm.services.problems import make_additive_noise, make_constant, make_linear, make_pwl_1d
from gfm.services.sampling_service import (
    estimator_fault,
    sample_unit_ball,
    sample_unit_sphere,
    sample_unit_sphere_batch,
    smoothed_gradient,
    smoothed_value,
    two_point_estimate,
    two_point_estimate_stochastic,
)
from gfm.utils.exceptions import OracleError, ValidationError


def test_sphere_draws_have_unit_norm(generator):
    directions = sample_unit_sphere_batch(500, 7, generator)
    assert directions.shape == (500, 7)
    np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0, rtol=1e-12)


def test_one_dimensional_sphere_is_a_fair_sign(generator):
    directions = sample_unit_sphere_batch(100_000, 1, generator)
    assert set(np.unique(directions)) == {-1.0, 1.0}
    assert abs(np.mean(directions > 0) - 0.5) < 0.01


def test_sphere_second_moment_is_isotropic(generator):
    directions = sample_unit_sphere_batch(100_000, 4, generator)
    second_moment = directions.T @ directions / len(directions)
    np.testing.assert_allclose(second_moment, np.eye(4) / 4, atol=0.005)


def test_single_sphere_draw_has_the_requested_dimension(generator):
    w = sample_unit_sphere(6, generator)
    assert w.shape == (6,)
    assert np.linalg.norm(w) == pytest.approx(1.0, rel=1e-12)


def test_ball_radius_follows_the_power_law(generator):
    dim = 3
    points = sample_unit_ball(100_000, dim, generator)
    radii = np.linalg.norm(points, axis=1)
    assert radii.max() <= 1.0
    # E r = d / (d + 1) for r = U^(1/d)
    std_error = radii.std(ddof=1) / np.sqrt(len(radii))
    assert abs(radii.mean() - dim / (dim + 1)) < 5 * std_error


def test_two_point_estimate_uses_two_calls_and_the_estimator_formula(linear2, stream):
    problem, counter = linear2.instrumented()
    params = SmoothingParams(0.25)
    x = np.array([0.3, 0.1])
    estimate = two_point_estimate(problem, x, params, stream)
    assert counter.calls == 2
    assert estimate.oracle_calls == 2
    w = estimate.direction
    expected = 2 / (2 * 0.25) * (estimate.value_plus - estimate.value_minus) * w
    np.testing.assert_allclose(estimate.estimate, expected, rtol=1e-12)
    # Linear f: the estimate is d <a, w> w
    np.testing.assert_allclose(estimate.estimate, 2 * np.dot([0.6, -0.8], w) * w, atol=1e-12)


def test_batch_of_one_reproduces_the_single_estimate(linear2, stream):
    params = SmoothingParams(0.1)
    x = np.array([1.0, -2.0])
    single = two_point_estimate(linear2, x, params, stream)
    batch = smoothed_gradient(linear2, x, params, 1, stream)
    np.testing.assert_array_equal(batch.mean, single.estimate)
    assert batch.oracle_calls == 2


def test_batch_accounting_matches_instrumented_calls(linear2, stream):
    problem, counter = linear2.instrumented()
    batch = smoothed_gradient(problem, np.zeros(2), SmoothingParams(0.1), 1234, stream)
    assert batch.oracle_calls == 2468 == counter.calls


def test_batch_mean_is_unbiased_on_linear_problem(stream):
    a = np.linspace(-1.0, 1.0, 8)
    problem = make_linear(a)
    batch = smoothed_gradient(problem, np.ones(8), SmoothingParams(0.5), 200_000, stream)
    combined = np.sqrt(np.sum(batch.std_error ** 2))
    assert np.linalg.norm(batch.mean - a) <= 3 * combined
    # E ||g||^2 = d ||a||^2 for linear f
    assert abs(batch.squared_norm_mean - 8 * a @ a) <= 4 * batch.squared_norm_std_error


def test_constant_problem_gives_zero_estimates(stream):
    batch = smoothed_gradient(make_constant(3, value=2.0), np.zeros(3), SmoothingParams(0.1), 100, stream)
    assert batch.norm == 0.0
    assert batch.norm_std_error == 0.0


def test_smoothed_value_of_abs_at_zero_is_one_half(stream):
    problem = make_pwl_1d([0.0], [-1.0, 1.0])
    mean, std_error = smoothed_value(problem, [0.0], SmoothingParams(1.0), 100_000, stream)
    assert abs(mean - 0.5) < 4 * std_error


def test_estimator_fault_scales_every_estimate(linear2):
    params = SmoothingParams(0.1)
    x = np.array([0.2, 0.2])
    stream = derive_stream(5, "fault", 0)
    clean = two_point_estimate(linear2, x, params, stream)
    with estimator_fault(1.5):
        faulty = two_point_estimate(linear2, x, params, stream)
    np.testing.assert_allclose(faulty.estimate, 1.5 * clean.estimate, rtol=1e-12)
    again = two_point_estimate(linear2, x, params, stream)
    np.testing.assert_array_equal(again.estimate, clean.estimate)


def test_stochastic_estimate_shares_the_sample_between_evaluations(linear2):
    params = SmoothingParams(0.1)
    x = np.array([0.5, -0.5])
    noisy = make_additive_noise(linear2, 3.0)
    directions = derive_stream(2, "directions", 0)
    samples = derive_stream(2, "samples", 0)
    stochastic = two_point_estimate_stochastic(noisy, x, params, directions, sample_rng=samples)
    deterministic = two_point_estimate(linear2, x, params, directions)
    np.testing.assert_array_equal(stochastic.direction, deterministic.direction)
    np.testing.assert_allclose(stochastic.estimate, deterministic.estimate, atol=1e-9)


def test_non_finite_oracle_values_raise(stream):
    problem = ProblemSpec(meta=ProblemMeta(2, 1.0, 1.0), value_oracle=lambda x: float("nan"))
    with pytest.raises(OracleError):
        two_point_estimate(problem, np.zeros(2), SmoothingParams(0.1), stream)


def test_sample_counts_are_validated(linear2, stream):
    with pytest.raises(ValidationError):
        smoothed_gradient(linear2, np.zeros(2), SmoothingParams(0.1), 0, stream)
    with pytest.raises(ValidationError):
        smoothed_value(linear2, np.zeros(2), SmoothingParams(0.1), 1, stream)
