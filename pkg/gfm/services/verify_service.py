"""Statistical and exact checks of the estimator, smoothing and convergence guarantees.

Every check returns a CheckReport and never raises on failure. Statistical
gates allow SIGMA_GATE standard errors computed from the samples themselves.
"""

import math
from dataclasses import replace
from typing import Optional, Sequence, Union

import numpy as np
import structlog

from ..config.settings import config
from ..models.params import RunConfig, ScheduleInputs, SmoothingParams, TwoPhaseConfig
from ..models.problem import ProblemSpec, StochasticProblemSpec, as_vector
from ..models.reports import CheckReport
from ..models.rng import RngLike, RngStream, as_generator
from ..tasks.worker_pool import map_ordered
from ..utils.constants import MEMBERSHIP_TOLERANCE, ROUNDING_TOLERANCE, SECOND_MOMENT_CONSTANT, SIGMA_GATE, Mode
from ..utils.logging import log_call
from ..utils.metrics import track_check
from ..utils.validators import require, require_open_unit, require_positive, require_positive_int
from .optimizer_service import run_gfm, run_two_phase
from .problems.piecewise import PiecewiseLinear1D, smoothed_reference_1d
from .sampling_service import sample_unit_sphere, smoothed_gradient, smoothed_value
from .schedule_service import descent_bound, schedule_eta

logger = structlog.get_logger(__name__)

AnyProblem = Union[ProblemSpec, StochasticProblemSpec]


def _finish(report: CheckReport) -> CheckReport:
    track_check(report.check_name, report.passed)
    log = logger.info if report.passed or not report.gated else logger.warning
    log("Check finished",
        check=report.check_name,
        statistic=report.statistic,
        bound_or_target=report.bound_or_target,
        tolerance=report.tolerance,
        passed=report.passed)
    return report


def _points(points, dim: int) -> np.ndarray:
    points = np.atleast_2d(np.array(points, dtype=np.float64))
    require(points.shape[1] == dim, f"points have dimension {points.shape[1]}, expected {dim}", "points")
    require(bool(np.all(np.isfinite(points))), "points have non-finite entries", "points")
    return points


def _stream(rng) -> RngStream:
    require(isinstance(rng, RngStream), "this check derives substreams and needs an RngStream", "rng")
    return rng


@log_call
def check_second_moment(problem: AnyProblem, points, delta: float, n_samples: int,
                        rng: RngLike) -> CheckReport:
    """E||g||^2 <= 16 sqrt(2 pi) d L^2 (G^2 for stochastic problems) at every point"""
    require(isinstance(n_samples, (int, np.integer)) and n_samples >= 1000,
            f"n_samples must be an integer >= 1000, got {n_samples!r}", "n_samples")
    params = SmoothingParams(delta)
    points = _points(points, problem.dim)
    generator = as_generator(rng)
    bound = SECOND_MOMENT_CONSTANT * problem.dim * problem.meta.lipschitz ** 2

    means, errors = [], []
    for x in points:
        batch = smoothed_gradient(problem, x, params, n_samples, generator)
        means.append(batch.squared_norm_mean)
        errors.append(batch.squared_norm_std_error)
    means = np.array(means)
    errors = np.array(errors)
    worst = int(np.argmax(means - bound - SIGMA_GATE * errors))

    return _finish(CheckReport(
        check_name="second_moment",
        statistic=float(means[worst]),
        bound_or_target=float(bound),
        tolerance=float(SIGMA_GATE * errors[worst]),
        n_samples=int(n_samples * len(points)),
        passed=bool(np.all(means <= bound + SIGMA_GATE * errors)),
        details={
            "problem": problem.name,
            "dim": problem.dim,
            "delta": delta,
            "per_point_mean": means.tolist(),
            "per_point_std_error": errors.tolist(),
        },
    ))


@log_call
def check_unbiasedness(problem: AnyProblem, points, delta: float, n_samples: int,
                       rng: RngLike) -> CheckReport:
    """Batch mean of two-point estimates against the exact smoothed gradient.

    Passes when ||mean - grad f_delta|| is within 3 combined standard errors
    (the root sum of squared per-coordinate errors) at every point.
    """
    require(problem.smoothed_reference is not None,
            f"{problem.name} has no smoothed reference to compare against", "problem")
    require_positive_int(n_samples, "n_samples")
    params = SmoothingParams(delta)
    points = _points(points, problem.dim)
    generator = as_generator(rng)

    distances, combined = [], []
    for x in points:
        _, reference = problem.smoothed_reference(x, delta)
        batch = smoothed_gradient(problem, x, params, n_samples, generator)
        distances.append(float(np.linalg.norm(batch.mean - np.asarray(reference))))
        combined.append(float(np.sqrt(np.sum(batch.std_error ** 2))))
    distances = np.array(distances)
    combined = np.array(combined)
    worst = int(np.argmax(distances - SIGMA_GATE * combined))

    return _finish(CheckReport(
        check_name="unbiasedness",
        statistic=float(distances[worst]),
        bound_or_target=0.0,
        tolerance=float(SIGMA_GATE * combined[worst] + ROUNDING_TOLERANCE),
        n_samples=int(n_samples * len(points)),
        passed=bool(np.all(distances <= SIGMA_GATE * combined + ROUNDING_TOLERANCE)),
        details={
            "problem": problem.name,
            "dim": problem.dim,
            "delta": delta,
            "per_point_distance": distances.tolist(),
            "per_point_combined_std_error": combined.tolist(),
        },
    ))


@log_call
def check_smoothing_bounds(problem: ProblemSpec, points, delta: float, n_samples: int, rng: RngLike,
                           gradient_pairs: int = 5,
                           smoothing_constant: float = config.SMOOTHING_CONSTANT) -> CheckReport:
    """Value sandwich |f_delta - f| <= delta L at every point, plus a gradient-Lipschitz probe.

    The probe pairs the first ``gradient_pairs`` points with a neighbour at
    distance delta/2 and requires ||g(x) - g(y)|| <= c L sqrt(d) ||x - y|| / delta
    up to the Monte-Carlo error of both batch means.
    """
    require(isinstance(n_samples, (int, np.integer)) and n_samples >= 2,
            f"n_samples must be an integer >= 2, got {n_samples!r}", "n_samples")
    require_positive(smoothing_constant, "smoothing_constant")
    params = SmoothingParams(delta, smoothing_constant)
    points = _points(points, problem.dim)
    generator = as_generator(rng)
    lip = problem.meta.lipschitz
    bound = delta * lip

    gaps, errors = [], []
    for x in points:
        mean, std_error = smoothed_value(problem, x, params, n_samples, generator)
        gaps.append(abs(mean - problem.value(x)))
        errors.append(std_error)
    gaps = np.array(gaps)
    errors = np.array(errors)
    values_ok = bool(np.all(gaps <= bound + SIGMA_GATE * errors))
    worst = int(np.argmax(gaps - SIGMA_GATE * errors))

    probes = []
    for x in points[:gradient_pairs]:
        y = x + 0.5 * delta * sample_unit_sphere(problem.dim, generator)
        gx = smoothed_gradient(problem, x, params, n_samples, generator)
        gy = smoothed_gradient(problem, y, params, n_samples, generator)
        difference = float(np.linalg.norm(gx.mean - gy.mean))
        allowed = smoothing_constant * lip * math.sqrt(problem.dim) * float(np.linalg.norm(x - y)) / delta
        slack = SIGMA_GATE * float(np.sqrt(np.sum(gx.std_error ** 2) + np.sum(gy.std_error ** 2)))
        probes.append({"difference": difference, "allowed": allowed, "tolerance": slack,
                       "passed": difference <= allowed + slack})
    gradients_ok = all(p["passed"] for p in probes)

    return _finish(CheckReport(
        check_name="smoothing_bounds",
        statistic=float(gaps[worst]),
        bound_or_target=float(bound),
        tolerance=float(SIGMA_GATE * errors[worst]),
        n_samples=int(n_samples * len(points)),
        passed=values_ok and gradients_ok,
        details={
            "problem": problem.name,
            "dim": problem.dim,
            "delta": delta,
            "values_passed": values_ok,
            "max_value_gap": float(gaps.max()),
            "gradient_probes": probes,
            "smoothing_constant": smoothing_constant,
        },
    ))


@log_call
def check_tightness_witness(problem: ProblemSpec, point, sharp_gap: float, delta: float,
                            n_samples: int, rng: RngLike, fraction: float = 0.6) -> CheckReport:
    """f_delta(x) - f(x) at a designed point reaches ``fraction`` of the sharp gap.

    This is a witness, not a bound: it passes when the measured gap plus the
    Monte-Carlo tolerance reaches the target.
    """
    require_positive(sharp_gap, "sharp_gap")
    require_open_unit(fraction, "fraction")
    params = SmoothingParams(delta)
    x = as_vector(point, problem.dim, "point")
    mean, std_error = smoothed_value(problem, x, params, n_samples, as_generator(rng))
    gap = mean - problem.value(x)
    target = fraction * sharp_gap

    return _finish(CheckReport(
        check_name="tightness_witness",
        statistic=float(gap),
        bound_or_target=float(target),
        tolerance=float(SIGMA_GATE * std_error),
        n_samples=int(n_samples),
        passed=bool(gap + SIGMA_GATE * std_error >= target),
        relation=">=",
        details={
            "problem": problem.name,
            "dim": problem.dim,
            "delta": delta,
            "sharp_gap": sharp_gap,
            "fraction": fraction,
            "point": [float(v) for v in x],
        },
    ))


@log_call
def check_goldstein_membership_1d(pwl: PiecewiseLinear1D, n_cases: int, rng: RngLike,
                                  x_range: Sequence[float] = (-2.0, 2.0),
                                  delta_range: Sequence[float] = (0.01, 1.5),
                                  name: str = "pwl") -> CheckReport:
    """grad f_delta(x) lies in the exact Goldstein interval for random (x, delta).

    The gradient from exact slope integration is also cross-checked against
    the symmetric difference (f(x + delta) - f(x - delta)) / (2 delta), which
    equals it in one dimension.
    """
    require_positive_int(n_cases, "n_cases")
    generator = as_generator(rng)
    xs = generator.uniform(x_range[0], x_range[1], size=n_cases)
    deltas = generator.uniform(delta_range[0], delta_range[1], size=n_cases)

    violations = np.zeros(n_cases)
    mismatches = np.zeros(n_cases)
    failures = []
    for k, (x, delta) in enumerate(zip(xs, deltas)):
        _, gradient = smoothed_reference_1d(pwl, x, delta)
        lo, hi = pwl.goldstein_interval(x, delta)
        violations[k] = max(lo - gradient, gradient - hi, 0.0)
        difference = (pwl.value(x + delta) - pwl.value(x - delta)) / (2.0 * delta)
        mismatches[k] = abs(difference - gradient)
        if violations[k] > MEMBERSHIP_TOLERANCE or mismatches[k] > MEMBERSHIP_TOLERANCE:
            failures.append({"x": float(x), "delta": float(delta), "gradient": gradient,
                             "interval": [lo, hi], "difference_quotient": difference})

    return _finish(CheckReport(
        check_name="goldstein_membership_1d",
        statistic=float(violations.max()),
        bound_or_target=0.0,
        tolerance=MEMBERSHIP_TOLERANCE,
        n_samples=int(n_cases),
        passed=not failures,
        details={
            "instance": name,
            "max_cross_check_error": float(mismatches.max()),
            "failures": failures[:10],
            "n_failures": len(failures),
        },
    ))


def _measure_run(problem: ProblemSpec, inputs: ScheduleInputs, horizon: int, eta: float,
                 stride: int, reference_batch: int, seed: RngStream) -> float:
    run_config = RunConfig(
        eta=eta,
        horizon=horizon,
        smoothing=SmoothingParams(inputs.delta, inputs.smoothing_constant),
        seed=seed.spawn("run"),
        record_trajectory=True,
        reference_batch=0,
        trajectory_stride=stride,
    )
    report = run_gfm(problem, run_config)
    squared = [
        smoothed_gradient(problem, point.x, run_config.smoothing, reference_batch,
                          seed.spawn("measure", j)).squared_norm_unbiased
        for j, point in enumerate(report.trajectory)
    ]
    return float(np.mean(squared))


@log_call
def check_descent_aggregate(problem: ProblemSpec, schedule_inputs: ScheduleInputs, n_seeds: int,
                            rng: RngStream, horizon: int = 10_000, reference_batch: int = 2_000,
                            max_measured: int = 50, workers: int = 1) -> CheckReport:
    """Average of ||grad f_delta(x^t)||^2 along GFM runs against 20 sqrt(K / T).

    Each run measures at most ``max_measured`` evenly thinned iterates with an
    unbiased squared-norm estimate; the gate uses the spread of per-seed means.
    """
    require(isinstance(n_seeds, (int, np.integer)) and n_seeds >= 10,
            f"n_seeds must be an integer >= 10, got {n_seeds!r}", "n_seeds")
    require_positive_int(horizon, "horizon")
    require_positive_int(max_measured, "max_measured")
    seed = _stream(rng)
    eta = schedule_eta(schedule_inputs, horizon)
    stride = max(1, math.ceil(horizon / max_measured))
    rhs = descent_bound(schedule_inputs, horizon)

    per_seed = np.array(map_ordered(
        lambda k: _measure_run(problem, schedule_inputs, horizon, eta, stride, reference_batch,
                               seed.spawn("descent-seed", k)),
        range(n_seeds),
        workers,
    ))
    grand_mean = float(per_seed.mean())
    std_error = float(per_seed.std(ddof=1) / math.sqrt(n_seeds))

    return _finish(CheckReport(
        check_name="descent_aggregate",
        statistic=grand_mean,
        bound_or_target=float(rhs),
        tolerance=SIGMA_GATE * std_error,
        n_samples=int(n_seeds),
        passed=bool(grand_mean <= rhs + SIGMA_GATE * std_error),
        details={
            "problem": problem.name,
            "horizon": horizon,
            "eta": eta,
            "stride": stride,
            "measured_per_run": math.ceil(horizon / stride),
            "reference_batch": reference_batch,
            "per_seed_mean": per_seed.tolist(),
        },
    ))


def _success_trial(problem: AnyProblem, config: TwoPhaseConfig, mode: Mode,
                   reference_batch: int, seed: RngStream) -> float:
    trial_config = replace(config, base=replace(config.base, seed=seed.spawn("two-phase")))
    report = run_two_phase(problem, trial_config, mode)
    target = problem
    if isinstance(problem, StochasticProblemSpec) and problem.mean_oracle is not None:
        target = problem.as_deterministic()
    batch = smoothed_gradient(target, report.selected_point, config.base.smoothing, reference_batch,
                              seed.spawn("success-reference"),
                              sample_rng=seed.spawn("success-reference-samples"))
    return batch.norm


@log_call
def check_two_phase_success(problem: AnyProblem, two_phase_config: TwoPhaseConfig, n_trials: int,
                            rng: RngStream, reference_batch: int = config.REFERENCE_BATCH,
                            workers: int = 1, capped: Optional[bool] = None) -> CheckReport:
    """Fraction of two-phase runs whose output has ||grad f_delta|| <= eps.

    Gate: fraction >= (1 - Lambda) - 2 sqrt(Lambda (1 - Lambda) / n_trials).
    With a single round there is no selection and the report is not gated.
    """
    require(isinstance(n_trials, (int, np.integer)) and n_trials >= 20,
            f"n_trials must be an integer >= 20, got {n_trials!r}", "n_trials")
    require_positive_int(reference_batch, "reference_batch")
    seed = _stream(rng)
    mode = Mode.STOCHASTIC if isinstance(problem, StochasticProblemSpec) else Mode.DETERMINISTIC
    confidence = two_phase_config.confidence
    target = two_phase_config.target

    norms = np.array(map_ordered(
        lambda k: _success_trial(problem, two_phase_config, mode, reference_batch,
                                 seed.spawn("trial", k)),
        range(n_trials),
        workers,
    ))
    fraction = float(np.mean(norms <= target))
    binomial_se = math.sqrt(confidence * (1.0 - confidence) / n_trials)
    gate = (1.0 - confidence) - 2.0 * binomial_se
    gated = two_phase_config.rounds > 1

    return _finish(CheckReport(
        check_name="two_phase_success",
        statistic=fraction,
        bound_or_target=1.0 - confidence,
        tolerance=2.0 * binomial_se,
        n_samples=int(n_trials),
        passed=bool(fraction >= gate),
        relation=">=",
        gated=gated,
        details={
            "problem": problem.name,
            "mode": mode.value,
            "target": target,
            "horizon": two_phase_config.base.horizon,
            "rounds": two_phase_config.rounds,
            "batch": two_phase_config.batch,
            "capped": capped,
            "reference_batch": reference_batch,
            "median_norm": float(np.median(norms)),
            "max_norm": float(norms.max()),
        },
    ))
