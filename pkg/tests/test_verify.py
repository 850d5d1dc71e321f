import numpy as np
import pytest

from gfm.models import RunConfig, SmoothingParams, TwoPhaseConfig, derive_stream
from gfm.services.problems import (
    library_pwl,
    make_constant,
    make_finite_sum_affine,
    make_linear,
    make_norm,
    make_pwl_1d,
    make_tight_mixture,
)
from gfm.services.sampling_service import estimator_fault
from gfm.services.verify_service import (
    check_goldstein_membership_1d,
    check_second_moment,
    check_smoothing_bounds,
    check_tightness_witness,
    check_two_phase_success,
    check_unbiasedness,
)
from gfm.services.verify_suites import MOMENT_DIMS, failed_checks, run_suite, two_phase_setup
from gfm.utils.exceptions import ConfigError, ValidationError


def _stream(label, index=0):
    return derive_stream(99, label, index)


class TestSecondMoment:
    def test_norm_and_finite_sum_pass(self):
        points = np.random.default_rng(0).uniform(-1, 1, size=(3, 3))
        report = check_second_moment(make_norm(3), points, 0.1, 5_000, _stream("moment"))
        assert report.passed and report.relation == "<="
        assert report.n_samples == 15_000

        generator = np.random.default_rng(1)
        finite_sum = make_finite_sum_affine(generator.standard_normal((10, 3)), generator.standard_normal(10))
        report = check_second_moment(finite_sum.as_stochastic(), points, 0.1, 5_000, _stream("moment", 1))
        assert report.passed

    def test_constant_problem_passes_trivially(self):
        report = check_second_moment(make_constant(2), np.zeros((1, 2)), 0.1, 1_000, _stream("moment", 2))
        assert report.passed and report.statistic == 0.0

    def test_needs_enough_samples(self):
        with pytest.raises(ValidationError):
            check_second_moment(make_norm(2), np.zeros((1, 2)), 0.1, 999, _stream("moment", 3))


class TestUnbiasedness:
    def test_one_dimensional_problems_pass(self):
        points = np.array([[-0.3], [0.2]])
        assert check_unbiasedness(make_linear([2.0]), points, 0.5, 2_000, _stream("unbiased")).passed
        abs_problem = make_pwl_1d([0.0], [-1.0, 1.0])
        assert check_unbiasedness(abs_problem, points, 0.5, 2_000, _stream("unbiased", 1)).passed

    def test_constant_problem_passes_trivially(self):
        report = check_unbiasedness(make_constant(3), np.ones((2, 3)), 0.1, 1_000, _stream("unbiased", 2))
        assert report.passed and report.statistic == 0.0

    def test_scaled_estimator_is_caught(self, linear2):
        points = np.array([[0.1, 0.2]])
        with estimator_fault(1.5):
            report = check_unbiasedness(linear2, points, 0.1, 20_000, _stream("unbiased", 3))
        assert not report.passed
        assert report.statistic == pytest.approx(0.5, abs=0.05)

    def test_stochastic_finite_sum_of_linear_pieces(self):
        A = np.array([[1.0, 0.0, -1.0], [0.5, 2.0, 0.0], [-1.0, 1.0, 1.0], [0.0, -0.5, 2.0]])
        finite_sum = make_finite_sum_affine(A, [0.1, -0.2, 0.3, 0.0], absolute=False, value_gap=1.0)
        problem = finite_sum.as_stochastic()
        _, reference = problem.smoothed_reference(np.zeros(3), 0.2)
        np.testing.assert_allclose(reference, A.mean(axis=0))
        points = np.array([[0.2, -0.1, 0.4], [-0.5, 0.3, 0.0]])
        report = check_unbiasedness(problem, points, 0.2, 50_000, _stream("unbiased", 5))
        assert report.passed
        assert report.details["problem"] == "finite-sum-affine-n4-d3"

    def test_needs_a_reference(self):
        with pytest.raises(ValidationError):
            check_unbiasedness(make_norm(2), np.zeros((1, 2)), 0.1, 1_000, _stream("unbiased", 4))


class TestSmoothingBounds:
    @pytest.mark.parametrize("problem", [make_constant(2), make_norm(2), make_tight_mixture(2)],
                             ids=["constant", "norm", "mixture"])
    def test_library_problems_pass(self, problem):
        points = np.random.default_rng(2).uniform(-1, 1, size=(20, 2))
        report = check_smoothing_bounds(problem, points, 0.1, 2_000, _stream("smoothing"), gradient_pairs=3)
        assert report.passed
        assert report.details["values_passed"]
        assert len(report.details["gradient_probes"]) == 3
        assert report.statistic <= report.bound_or_target + report.tolerance


class TestTightnessWitness:
    def test_norm_at_the_origin(self):
        norm = make_norm(5)
        report = check_tightness_witness(norm, np.zeros(5), 0.1, 0.1, 50_000, _stream("witness"))
        assert report.passed and report.relation == ">="
        assert report.statistic == pytest.approx(5 / 6 * 0.1, abs=0.002)

    def test_mixture_at_the_origin(self):
        mixture = make_tight_mixture(5)
        report = check_tightness_witness(mixture, np.zeros(5), 0.05, 0.1, 50_000, _stream("witness", 1))
        assert report.passed

    def test_far_from_the_kink_the_gap_is_not_witnessed(self):
        norm = make_norm(5)
        point = np.array([10.0, 0.0, 0.0, 0.0, 0.0])
        report = check_tightness_witness(norm, point, 0.1, 0.1, 20_000, _stream("witness", 2))
        assert not report.passed


def test_goldstein_membership_on_the_library():
    for k, name in enumerate(["abs", "w-shape", "staircase"]):
        report = check_goldstein_membership_1d(library_pwl(name), 50, _stream("goldstein", k), name=name)
        assert report.passed, report.details
        assert report.details["max_cross_check_error"] < 1e-8


def test_single_round_two_phase_report_is_not_gated():
    base = RunConfig(eta=0.01, horizon=50, smoothing=SmoothingParams(0.1), seed=_stream("base"),
                     reference_batch=0)
    config = TwoPhaseConfig(base=base, rounds=1, batch=100, confidence=0.2, target=0.3)
    report = check_two_phase_success(make_norm(2), config, 20, _stream("two-phase"), reference_batch=200)
    assert report.gated is False
    assert 0.0 <= report.statistic <= 1.0
    assert report.relation == ">="


def test_substream_checks_need_an_rng_stream():
    base = RunConfig(eta=0.01, horizon=5, smoothing=SmoothingParams(0.1), seed=_stream("base"))
    config = TwoPhaseConfig(base=base, rounds=2, batch=10, confidence=0.2, target=0.3)
    with pytest.raises(ValidationError):
        check_two_phase_success(make_norm(2), config, 20, np.random.default_rng(0), reference_batch=10)


class TestSuites:
    def test_goldstein_suite_passes(self):
        reports = run_suite("goldstein", 0)
        assert len(reports) == 5
        assert failed_checks(reports) == []

    def test_same_seed_gives_identical_reports(self):
        first = [r.to_dict() for r in run_suite("goldstein", 7)]
        second = [r.to_dict() for r in run_suite("goldstein", 7)]
        assert first == second
        assert all("pass" in r for r in first)

    def test_unknown_suite(self):
        with pytest.raises(ConfigError):
            run_suite("everything", 0)

    def test_two_phase_setup_leaves_room_to_move(self):
        problem, two_phase, capped = two_phase_setup(_stream("setup"))
        assert capped
        assert two_phase.base.horizon == 20_000
        assert two_phase.rounds == 5
        # the total step length must reach well past the start radius of 0.1
        assert two_phase.base.eta * two_phase.base.horizon > 4 * 0.1
        assert problem.dim == 5

    @pytest.mark.slow
    def test_corrupted_estimator_fails_the_moments_suite(self):
        with estimator_fault(1.5):
            reports = run_suite("moments", 0)
        assert "unbiasedness" in failed_checks(reports)

    @pytest.mark.slow
    def test_smoothing_suite_passes(self):
        assert failed_checks(run_suite("smoothing", 0)) == []

    @pytest.mark.slow
    def test_descent_suite_passes(self):
        reports = run_suite("descent", 0, workers=2)
        assert failed_checks(reports) == []
        assert reports[0].statistic <= reports[0].bound_or_target + reports[0].tolerance

    @pytest.mark.slow
    def test_moments_suite_covers_every_family_and_dimension(self):
        reports = run_suite("moments", 0, workers=2)
        moments = [r for r in reports if r.check_name == "second_moment"]
        assert len(moments) == 5 * len(MOMENT_DIMS)
        norm_dims = {r.details["dim"] for r in moments if r.details["problem"].startswith("norm")}
        assert norm_dims == set(MOMENT_DIMS)
        assert all(r.n_samples == 5 * 100_000 for r in moments)
        assert failed_checks(reports) == []

    @pytest.mark.slow
    def test_two_phase_suite_passes(self):
        reports = run_suite("two-phase", 0, workers=2)
        assert reports[0].gated
        assert reports[0].n_samples == 50
        assert reports[0].details["reference_batch"] == 100_000
        assert reports[0].statistic >= 0.8
        assert failed_checks(reports) == []
