import numpy as np
import pytest

from gfm.models import (
    FiniteSampleSpace,
    GaussianNoiseSpace,
    ProblemMeta,
    ProblemSpec,
    RunConfig,
    ScheduleInputs,
    SmoothingParams,
    StochasticProblemSpec,
    TwoPhaseConfig,
    as_vector,
    derive_stream,
)
from gfm.services.problems import make_norm
from gfm.utils.exceptions import ValidationError


def test_meta_rejects_nonpositive_fields():
    with pytest.raises(ValidationError):
        ProblemMeta(dim=0, lipschitz=1.0, value_gap=1.0)
    with pytest.raises(ValidationError):
        ProblemMeta(dim=2, lipschitz=0.0, value_gap=1.0)
    with pytest.raises(ValidationError):
        ProblemMeta(dim=2, lipschitz=1.0, value_gap=-1.0)


def test_as_vector_checks_dimension_and_finiteness():
    np.testing.assert_array_equal(as_vector([1, 2], 2), np.array([1.0, 2.0]))
    with pytest.raises(ValidationError):
        as_vector([1.0, 2.0], 3)
    with pytest.raises(ValidationError):
        as_vector([1.0, np.nan])


def test_values_falls_back_to_scalar_oracle():
    spec = ProblemSpec(meta=ProblemMeta(2, 1.0, 1.0), value_oracle=lambda x: float(x.sum()))
    np.testing.assert_array_equal(spec.values(np.array([[1.0, 2.0], [3.0, -4.0]])), [3.0, -1.0])


def test_instrumented_counts_scalar_and_batch_calls():
    problem, counter = make_norm(3).instrumented()
    problem.value(np.ones(3))
    problem.values(np.ones((7, 3)))
    assert counter.calls == 8
    counter.reset()
    assert counter.calls == 0


def test_scaled_problem_scales_values_and_metadata():
    problem = make_norm(2, L=1.5)
    doubled = problem.scaled(2.0)
    x = np.array([0.3, -0.4])
    assert doubled.value(x) == 2.0 * problem.value(x)
    assert doubled.meta.lipschitz == 3.0
    assert doubled.meta.value_gap == 2.0 * problem.meta.value_gap
    assert doubled.meta.known_optimum == 0.0


def test_sample_spaces_draw_from_their_distribution():
    generator = np.random.default_rng(0)
    draws = FiniteSampleSpace(4).draw(generator, 1000)
    assert set(np.unique(draws)) == {0, 1, 2, 3}
    assert np.all(GaussianNoiseSpace(0.0).draw(generator, 5) == 0.0)
    with pytest.raises(ValidationError):
        GaussianNoiseSpace(-1.0)


def test_stochastic_spec_without_mean_cannot_be_made_deterministic():
    spec = StochasticProblemSpec(
        meta=ProblemMeta(1, 1.0, 1.0),
        sampled_oracle=lambda x, i: float(x[0]) * i,
        sample_space=FiniteSampleSpace(2),
    )
    assert spec.samples(np.array([[2.0], [3.0]]), np.array([1, 0])).tolist() == [2.0, 0.0]
    with pytest.raises(ValidationError):
        spec.as_deterministic()


def test_run_and_two_phase_configs_validate():
    smoothing = SmoothingParams(0.1)
    seed = derive_stream(0, "x", 0)
    with pytest.raises(ValidationError):
        RunConfig(eta=0.0, horizon=10, smoothing=smoothing, seed=seed)
    with pytest.raises(ValidationError):
        RunConfig(eta=0.1, horizon=0, smoothing=smoothing, seed=seed)
    with pytest.raises(ValidationError):
        SmoothingParams(0.0)
    base = RunConfig(eta=0.1, horizon=10, smoothing=smoothing, seed=seed)
    with pytest.raises(ValidationError):
        TwoPhaseConfig(base=base, rounds=2, batch=10, confidence=1.0, target=0.5)
    with pytest.raises(ValidationError):
        ScheduleInputs(dim=2, lipschitz=1.0, value_gap=1.0, delta=0.1, target=0.0)
    assert base.to_dict()["horizon"] == 10
