import math

import numpy as np
import pytest

from gfm.models import ProblemMeta, ProblemSpec, RunConfig, SmoothingParams, TwoPhaseConfig, derive_stream
from gfm.services.optimizer_service import run_gfm, run_sgfm, run_two_phase
from gfm.services.problems import (
    make_additive_noise,
    make_constant,
    make_finite_sum_affine,
    make_linear,
    make_norm,
    make_relu_net,
)
from gfm.utils.constants import Mode
from gfm.utils.exceptions import DivergenceError, OracleError, ValidationError


def _config(seed=0, horizon=200, eta=0.01, delta=0.1, **overrides):
    return RunConfig(eta=eta, horizon=horizon, smoothing=SmoothingParams(delta),
                     seed=derive_stream(seed, "optimizer-tests", 0), **overrides)


def _finite_sum():
    generator = np.random.default_rng(11)
    return make_finite_sum_affine(generator.standard_normal((12, 3)), generator.standard_normal(12))


class TestOracleAccounting:
    @pytest.mark.parametrize("reference_batch", [0, 50])
    def test_gfm(self, reference_batch):
        problem, counter = make_norm(3).instrumented()
        report = run_gfm(problem, _config(horizon=120, reference_batch=reference_batch))
        assert report.oracle_calls == 240
        assert counter.calls == report.oracle_calls + report.evaluation_oracle_calls
        assert report.evaluation_oracle_calls == 1 + 2 * reference_batch

    def test_sgfm(self):
        problem, counter = _finite_sum().as_stochastic().instrumented()
        report = run_sgfm(problem, _config(horizon=75, reference_batch=20))
        assert report.oracle_calls == 150
        assert counter.calls == report.oracle_calls + report.evaluation_oracle_calls

    @pytest.mark.parametrize("mode", [Mode.DETERMINISTIC, Mode.STOCHASTIC])
    def test_two_phase(self, mode):
        base = make_norm(2)
        problem = base if mode is Mode.DETERMINISTIC else make_additive_noise(base, 0.1)
        problem, counter = problem.instrumented()
        rounds, batch, horizon = 3, 40, 60
        config = TwoPhaseConfig(base=_config(horizon=horizon, reference_batch=0),
                                rounds=rounds, batch=batch, confidence=0.1, target=0.3)
        report = run_two_phase(problem, config, mode)
        assert report.total_oracle_calls == rounds * 2 * horizon + rounds * 2 * batch
        assert report.phase2_oracle_calls == rounds * 2 * batch
        assert counter.calls == report.total_oracle_calls + report.evaluation_oracle_calls


def test_runs_are_reproducible():
    problem = make_norm(4)
    first = run_gfm(problem, _config(seed=5))
    second = run_gfm(problem, _config(seed=5))
    other = run_gfm(problem, _config(seed=6))
    np.testing.assert_array_equal(first.output_point, second.output_point)
    assert first.output_index == second.output_index
    assert first.stationarity_estimate == second.stationarity_estimate
    assert not np.array_equal(first.output_point, other.output_point)


def test_output_index_is_in_range():
    for seed in range(20):
        report = run_gfm(make_norm(2), _config(seed=seed, horizon=7, reference_batch=0))
        assert 0 <= report.output_index < 7


def test_zero_noise_sgfm_matches_gfm_exactly():
    problem = make_norm(3)
    deterministic = run_gfm(problem, _config(seed=3, horizon=300))
    stochastic = run_sgfm(make_additive_noise(problem, 0.0), _config(seed=3, horizon=300))
    np.testing.assert_array_equal(deterministic.output_point, stochastic.output_point)
    assert deterministic.output_index == stochastic.output_index
    assert deterministic.final_value == stochastic.final_value
    assert deterministic.stationarity_estimate == stochastic.stationarity_estimate


def test_common_token_noise_tracks_gfm():
    problem = make_norm(3)
    deterministic = run_gfm(problem, _config(seed=4, horizon=200, eta=0.001, record_trajectory=True))
    stochastic = run_sgfm(make_additive_noise(problem, 1.0),
                          _config(seed=4, horizon=200, eta=0.001, record_trajectory=True))
    # the noise cancels in f(x + delta w) - f(x - delta w) up to rounding
    assert len(deterministic.trajectory) == len(stochastic.trajectory) == 200
    for left, right in zip(deterministic.trajectory, stochastic.trajectory):
        np.testing.assert_allclose(right.x, left.x, rtol=1e-9, atol=1e-12)
    assert deterministic.output_index == stochastic.output_index


def test_scaled_problem_with_scaled_step_gives_identical_iterates():
    problem = make_norm(3)
    base = run_gfm(problem, _config(seed=8, horizon=150, eta=0.01, record_trajectory=True))
    scaled = run_gfm(problem.scaled(2.0), _config(seed=8, horizon=150, eta=0.005, record_trajectory=True))
    for left, right in zip(base.trajectory, scaled.trajectory):
        np.testing.assert_array_equal(right.x, left.x)
    np.testing.assert_array_equal(base.output_point, scaled.output_point)


def test_constant_problem_never_moves():
    problem = make_constant(3)
    report = run_gfm(problem, _config(horizon=50, reference_batch=100))
    np.testing.assert_array_equal(report.output_point, problem.start())
    assert report.stationarity_estimate[0] == 0.0


def test_missing_reference_batch_reports_nan():
    report = run_gfm(make_norm(2), _config(horizon=10, reference_batch=0))
    assert all(math.isnan(v) for v in report.stationarity_estimate)


def test_divergence_aborts_the_run():
    problem = make_linear([1.0, 0.0])
    with pytest.raises(DivergenceError) as excinfo:
        run_gfm(problem, _config(eta=1e6, horizon=100, divergence_bound=1e3))
    assert excinfo.value.error_code == "divergence_error"


def test_non_finite_oracle_values_abort_the_run():
    problem = ProblemSpec(meta=ProblemMeta(dim=2, lipschitz=1.0, value_gap=1.0),
                          value_oracle=lambda x: float("nan"))
    with pytest.raises(OracleError):
        run_gfm(problem, _config(horizon=5))


def test_algorithms_check_the_problem_kind():
    with pytest.raises(ValidationError):
        run_gfm(make_additive_noise(make_norm(2), 0.1), _config(horizon=5))
    with pytest.raises(ValidationError):
        run_sgfm(make_norm(2), _config(horizon=5))


def test_trajectory_stride():
    report = run_gfm(make_norm(2), _config(horizon=10, record_trajectory=True, trajectory_stride=3))
    assert [point.t for point in report.trajectory] == [0, 3, 6, 9]
    np.testing.assert_array_equal(report.trajectory[0].x, make_norm(2).start())
    assert run_gfm(make_norm(2), _config(horizon=10)).trajectory is None


class TestTwoPhase:
    def _config(self, rounds=4, batch=200, **overrides):
        return TwoPhaseConfig(base=_config(horizon=100, reference_batch=0, **overrides),
                              rounds=rounds, batch=batch, confidence=0.1, target=0.3)

    def test_selects_the_smallest_phase2_norm(self):
        report = run_two_phase(make_norm(3), self._config())
        assert report.selected_index == int(np.argmin(report.phase2_norms))
        np.testing.assert_array_equal(report.selected_point, report.selected.output_point)
        assert len(report.candidates) == 4

    def test_rounds_use_distinct_streams(self):
        report = run_two_phase(make_norm(3), self._config())
        points = [c.output_point for c in report.candidates]
        assert not np.array_equal(points[0], points[1])

    def test_shared_streams_give_identical_candidates(self):
        report = run_two_phase(make_norm(3), self._config(), share_round_streams=True)
        for candidate in report.candidates[1:]:
            np.testing.assert_array_equal(candidate.output_point, report.candidates[0].output_point)
        assert len(set(report.phase2_norms)) == 1
        assert report.selected_index == 0

    def test_worker_count_does_not_change_the_result(self):
        serial = run_two_phase(make_norm(3), self._config(), workers=1)
        threaded = run_two_phase(make_norm(3), self._config(), workers=3)
        assert serial.phase2_norms == threaded.phase2_norms
        np.testing.assert_array_equal(serial.selected_point, threaded.selected_point)

    def test_stochastic_mode(self):
        problem = _finite_sum().as_stochastic()
        report = run_two_phase(problem, self._config(rounds=2, batch=50), "stochastic")
        assert report.algorithm == "2sgfm"
        assert len(report.phase2_norms) == 2


@pytest.mark.slow
def test_sgfm_decreases_relu_training_loss():
    relu = make_relu_net([2, 4, 1], 32, derive_stream(0, "relu-train", 0))
    problem = relu.as_stochastic()
    config = _config(eta=1e-3, horizon=20_000, delta=0.05, reference_batch=0,
                     record_trajectory=True, trajectory_stride=500)
    report = run_sgfm(problem, config)
    start_loss = relu.mean(problem.start())
    late = [relu.mean(point.x) for point in report.trajectory[-10:]]
    assert np.mean(late) < 0.7 * start_loss
