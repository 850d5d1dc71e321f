"""Named verification suites with desk-scale defaults."""

from typing import Callable, Dict, List, Tuple, Union

import numpy as np
import structlog

from ..models.params import DeskCaps, RunConfig, ScheduleInputs, SmoothingParams, TwoPhaseConfig
from ..models.problem import ProblemSpec, StochasticProblemSpec
from ..models.reports import CheckReport
from ..models.rng import RngStream, derive_stream
from ..utils.constants import VERIFY_SUITES
from ..utils.exceptions import ConfigError
from .problems import (
    PWL_LIBRARY,
    library_pwl,
    make_finite_sum_affine,
    make_halfspace_distance,
    make_linear,
    make_norm,
    make_pwl_1d,
    make_relu_net,
    make_tight_mixture,
)
from .schedule_service import cap_schedule, schedule_eta, schedule_two_phase
from .verify_service import (
    check_descent_aggregate,
    check_goldstein_membership_1d,
    check_second_moment,
    check_smoothing_bounds,
    check_tightness_witness,
    check_two_phase_success,
    check_unbiasedness,
)

logger = structlog.get_logger(__name__)

DELTA = 0.1
N_POINTS = 5
MOMENT_SAMPLES = 100_000
MOMENT_DIMS = (1, 2, 8, 32)
UNBIASED_SAMPLES = 1_000_000
SMOOTHING_POINTS = 1_000
SMOOTHING_SAMPLES = 4_000
WITNESS_SAMPLES = 100_000
GOLDSTEIN_CASES = 100
DESCENT_SEEDS = 20
DESCENT_HORIZON = 10_000
TWO_PHASE_TRIALS = 50
TWO_PHASE_REFERENCE_BATCH = 100_000
# The theoretical horizon (~1e8 steps) is capped; eta is rescheduled for the capped T
TWO_PHASE_CAPS = DeskCaps(max_horizon=20_000, max_batch=20_000)

SuiteRunner = Callable[[RngStream, int], List[CheckReport]]
AnyProblem = Union[ProblemSpec, StochasticProblemSpec]


def _box_points(stream: RngStream, n: int, dim: int, radius: float = 1.0) -> np.ndarray:
    return stream.generator().uniform(-radius, radius, size=(n, dim))


def _moment_problems(stream: RngStream, dim: int) -> List[AnyProblem]:
    finite_sum = make_finite_sum_affine(*_affine_data(stream.spawn("affine-data", dim), 32, dim))
    # ReLU nets are indexed by input width; their parameter dimension is larger
    relu = make_relu_net([dim, 4, 1], 32, stream.spawn("relu-data", dim))
    return [
        make_norm(dim),
        make_halfspace_distance(dim),
        make_tight_mixture(dim),
        finite_sum.as_stochastic(),
        relu.as_stochastic(),
    ]


def moments_suite(stream: RngStream, workers: int = 1) -> List[CheckReport]:
    """Second-moment bound on every problem family, unbiasedness where grad f_delta is exact"""
    reports = []
    moment_problems = [problem for dim in MOMENT_DIMS for problem in _moment_problems(stream, dim)]
    for k, problem in enumerate(moment_problems):
        points = _box_points(stream.spawn("moment-points", k), N_POINTS, problem.dim)
        reports.append(check_second_moment(problem, points, DELTA, MOMENT_SAMPLES,
                                           stream.spawn("moment-draws", k)))

    unbiased_problems = [
        make_linear(np.array([0.6, -0.8])),
        make_linear(np.linspace(-1.0, 1.0, 8)),
        make_pwl_1d(*PWL_LIBRARY["abs"], name="pwl-abs"),
        make_halfspace_distance(2),
        make_finite_sum_affine(*_affine_data(stream.spawn("signed-data"), 4, 2), absolute=False,
                               value_gap=1.0).as_stochastic(),
    ]
    for k, problem in enumerate(unbiased_problems):
        points = _box_points(stream.spawn("unbiased-points", k), 2, problem.dim, radius=0.5)
        reports.append(check_unbiasedness(problem, points, 0.5, UNBIASED_SAMPLES,
                                          stream.spawn("unbiased-draws", k)))
    return reports


def _affine_data(stream: RngStream, n: int, dim: int):
    generator = stream.generator()
    return generator.standard_normal((n, dim)), generator.standard_normal(n)


def smoothing_suite(stream: RngStream, workers: int = 1) -> List[CheckReport]:
    reports = []
    problems = [
        make_norm(2),
        make_halfspace_distance(2),
        make_tight_mixture(2),
        make_linear(np.array([1.0, 2.0])),
        make_pwl_1d(*PWL_LIBRARY["w-shape"], name="pwl-w-shape"),
        make_finite_sum_affine(*_affine_data(stream.spawn("affine-data"), 16, 2)).as_problem(),
        make_relu_net([2, 4, 1], 16, stream.spawn("relu-data")).as_problem(),
    ]
    for k, problem in enumerate(problems):
        points = _box_points(stream.spawn("smoothing-points", k), SMOOTHING_POINTS, problem.dim)
        reports.append(check_smoothing_bounds(problem, points, DELTA, SMOOTHING_SAMPLES,
                                              stream.spawn("smoothing-draws", k)))

    # Designed points: the origin for L||x|| and for the mixture
    dim = 5
    norm = make_norm(dim)
    mixture = make_tight_mixture(dim)
    reports.append(check_tightness_witness(norm, np.zeros(dim), DELTA * norm.meta.lipschitz, DELTA,
                                           WITNESS_SAMPLES, stream.spawn("witness", 0)))
    reports.append(check_tightness_witness(mixture, np.zeros(dim), 0.5 * DELTA * mixture.meta.lipschitz,
                                           DELTA, WITNESS_SAMPLES, stream.spawn("witness", 1)))
    return reports


def goldstein_suite(stream: RngStream, workers: int = 1) -> List[CheckReport]:
    return [
        check_goldstein_membership_1d(library_pwl(name), GOLDSTEIN_CASES,
                                      stream.spawn("goldstein", k), name=name)
        for k, name in enumerate(sorted(PWL_LIBRARY))
    ]


def _norm_inputs(dim: int = 5) -> Tuple[ProblemSpec, ScheduleInputs]:
    problem = make_norm(dim, start_radius=0.1)
    return problem, ScheduleInputs(
        dim=dim,
        lipschitz=problem.meta.lipschitz,
        value_gap=problem.meta.value_gap,
        delta=DELTA,
        target=0.3,
        confidence=0.1,
    )


def descent_suite(stream: RngStream, workers: int = 1) -> List[CheckReport]:
    problem, inputs = _norm_inputs()
    return [check_descent_aggregate(problem, inputs, DESCENT_SEEDS, stream.spawn("descent"),
                                    horizon=DESCENT_HORIZON, workers=workers)]


def two_phase_setup(stream: RngStream) -> Tuple[ProblemSpec, TwoPhaseConfig, bool]:
    """The desk-capped 2-GFM configuration on ||x||, d = 5, eps = 0.3, Lambda = 0.1"""
    problem, inputs = _norm_inputs()
    schedule = cap_schedule(schedule_two_phase(inputs), TWO_PHASE_CAPS)
    base = RunConfig(
        eta=schedule_eta(inputs, schedule.horizon),
        horizon=schedule.horizon,
        smoothing=SmoothingParams(inputs.delta),
        seed=stream.spawn("two-phase-base"),
        reference_batch=0,
    )
    two_phase = TwoPhaseConfig(base=base, rounds=schedule.rounds, batch=schedule.batch,
                               confidence=inputs.confidence, target=inputs.target)
    return problem, two_phase, schedule.capped


def two_phase_suite(stream: RngStream, workers: int = 1) -> List[CheckReport]:
    problem, two_phase, capped = two_phase_setup(stream)
    return [check_two_phase_success(problem, two_phase, TWO_PHASE_TRIALS, stream.spawn("two-phase"),
                                    reference_batch=TWO_PHASE_REFERENCE_BATCH, workers=workers,
                                    capped=capped)]


SUITES: Dict[str, SuiteRunner] = {
    "moments": moments_suite,
    "smoothing": smoothing_suite,
    "goldstein": goldstein_suite,
    "descent": descent_suite,
    "two-phase": two_phase_suite,
}


def run_suite(name: str, seed: int, workers: int = 1) -> List[CheckReport]:
    """Run one suite, or every suite in order for "all"; same seed gives the same reports"""
    if name == "all":
        names = list(VERIFY_SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(VERIFY_SUITES + ('all',))}",
                          key="suite")

    reports = []
    for suite in names:
        logger.info("Suite started", suite=suite, seed=seed)
        suite_reports = SUITES[suite](derive_stream(seed, f"suite:{suite}", 0), workers)
        failed = [r.check_name for r in suite_reports if r.gated and not r.passed]
        logger.info("Suite finished", suite=suite, checks=len(suite_reports), failed=failed)
        reports.extend(suite_reports)
    return reports


def failed_checks(reports: List[CheckReport]) -> List[str]:
    return [r.check_name for r in reports if r.gated and not r.passed]
