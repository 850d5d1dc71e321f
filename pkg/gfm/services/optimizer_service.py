"""Gradient-free methods and their two-phase wrappers.

GFM and SGFM iterate x^{t+1} = x^t - eta * g^t with a two-point estimate g^t
and return x^R for an index R drawn uniformly from {0, ..., T-1} before the
loop starts. The two-phase variants restart the base method S times from the
same x^0 on disjoint substreams, re-estimate each output's smoothed gradient
with B fresh two-point estimates and keep the candidate with the smallest
estimated norm (lowest index on ties).

Substreams of a run seed:
    "output-index"  R
    "directions"    w^t
    "samples"       xi^t (stochastic runs)
    "reference"     stationarity measurement at x^R
"""

import math
import time
from dataclasses import replace
from typing import List, Optional, Union

import numpy as np
import structlog

from ..models.params import RunConfig, TwoPhaseConfig
from ..models.problem import ProblemSpec, StochasticProblemSpec
from ..models.reports import RunReport, TrajectoryPoint, TwoPhaseReport
from ..tasks.worker_pool import map_ordered
from ..utils.constants import DIRECTION_BLOCK_SIZE, Algorithm, Mode
from ..utils.exceptions import DivergenceError, OracleError
from ..utils.logging import log_call
from ..utils.metrics import track_run
from ..utils.validators import require
from .sampling_service import _ESTIMATOR_SCALE, sample_unit_sphere_batch, smoothed_gradient

logger = structlog.get_logger(__name__)

AnyProblem = Union[ProblemSpec, StochasticProblemSpec]


def _start_point(problem: AnyProblem, config: RunConfig) -> np.ndarray:
    start = problem.start() if config.initial_point is None else np.array(config.initial_point, dtype=np.float64)
    require(start.shape == (problem.dim,),
            f"initial point has shape {start.shape}, expected ({problem.dim},)", "initial_point")
    require(bool(np.all(np.isfinite(start))), "initial point has non-finite entries", "initial_point")
    return start


def _final_value(problem: AnyProblem, x: np.ndarray, config: RunConfig):
    """f(x^R), or its Monte-Carlo mean when only sampled values exist"""
    if isinstance(problem, ProblemSpec):
        return problem.value(x), 1
    if problem.mean_oracle is not None:
        return float(problem.mean_oracle(x)), 1
    n = max(config.reference_batch, 1)
    generator = config.seed.spawn("final-value").generator()
    tokens = problem.draw_tokens(generator, n)
    values = problem.samples(np.repeat(x[None, :], n, axis=0), tokens)
    return float(values.mean()), n


def _stationarity(problem: AnyProblem, x: np.ndarray, config: RunConfig):
    if config.reference_batch < 1:
        return (math.nan, math.nan), 0
    target = problem
    if isinstance(problem, StochasticProblemSpec) and problem.mean_oracle is not None:
        target = problem.as_deterministic()
    batch = smoothed_gradient(
        target, x, config.smoothing, config.reference_batch,
        config.seed.spawn("reference"),
        sample_rng=config.seed.spawn("reference-samples"),
    )
    return (batch.norm, batch.norm_std_error), batch.oracle_calls


def _run_base(problem: AnyProblem, config: RunConfig, algorithm: Algorithm) -> RunReport:
    started = time.perf_counter()
    stochastic = isinstance(problem, StochasticProblemSpec)
    dim = problem.dim
    horizon = config.horizon
    delta = config.smoothing.delta
    eta = config.eta
    scale = _ESTIMATOR_SCALE.get() * dim / (2.0 * delta)

    output_index = int(config.seed.spawn("output-index").generator().integers(0, horizon))
    direction_gen = config.seed.spawn("directions").generator()
    sample_gen = config.seed.spawn("samples").generator() if stochastic else None

    x = _start_point(problem, config)
    output_point = None
    trajectory: Optional[List[TrajectoryPoint]] = [] if config.record_trajectory else None

    logger.info("Run started", algorithm=algorithm.value, problem=problem.name,
                dim=dim, horizon=horizon, eta=eta, delta=delta, output_index=output_index)

    t = 0
    while t < horizon:
        block = min(DIRECTION_BLOCK_SIZE, horizon - t)
        directions = sample_unit_sphere_batch(block, dim, direction_gen)
        tokens = problem.draw_tokens(sample_gen, block) if stochastic else None

        for i in range(block):
            w = directions[i]
            offset = delta * w
            if stochastic:
                value_plus = problem.sample(x + offset, tokens[i])
                value_minus = problem.sample(x - offset, tokens[i])
            else:
                value_plus = problem.value(x + offset)
                value_minus = problem.value(x - offset)
            if not (math.isfinite(value_plus) and math.isfinite(value_minus)):
                raise OracleError(f"non-finite oracle value at t={t}", t=t, x=x)

            g = (scale * (value_plus - value_minus)) * w

            if t == output_index:
                output_point = x.copy()
            if trajectory is not None and t % config.trajectory_stride == 0:
                trajectory.append(TrajectoryPoint(t=t, x=x.copy(), estimate_norm=float(np.linalg.norm(g))))

            x = x - eta * g
            norm = float(np.linalg.norm(x))
            if not math.isfinite(norm) or norm > config.divergence_bound:
                raise DivergenceError(
                    f"iterate norm {norm:.3e} exceeds bound {config.divergence_bound:.3e} at t={t + 1}",
                    t=t + 1, x=x,
                )
            t += 1

    final_value, value_calls = _final_value(problem, output_point, config)
    stationarity, reference_calls = _stationarity(problem, output_point, config)
    oracle_calls = 2 * horizon
    evaluation_calls = value_calls + reference_calls

    duration = time.perf_counter() - started
    track_run(algorithm.value, oracle_calls, evaluation_calls, duration)
    logger.info("Run completed", algorithm=algorithm.value, problem=problem.name,
                oracle_calls=oracle_calls, final_value=final_value,
                stationarity=stationarity[0], duration_ms=int(duration * 1000))

    return RunReport(
        algorithm=algorithm.value,
        output_point=output_point,
        output_index=output_index,
        oracle_calls=oracle_calls,
        final_value=final_value,
        stationarity_estimate=stationarity,
        evaluation_oracle_calls=evaluation_calls,
        horizon=horizon,
        eta=eta,
        trajectory=trajectory,
    )


@log_call
def run_gfm(problem: ProblemSpec, config: RunConfig) -> RunReport:
    require(isinstance(problem, ProblemSpec), "GFM needs a deterministic ProblemSpec", "problem")
    return _run_base(problem, config, Algorithm.GFM)


@log_call
def run_sgfm(problem: StochasticProblemSpec, config: RunConfig) -> RunReport:
    require(isinstance(problem, StochasticProblemSpec), "SGFM needs a StochasticProblemSpec", "problem")
    return _run_base(problem, config, Algorithm.SGFM)


@log_call
def run_two_phase(problem: AnyProblem, config: TwoPhaseConfig,
                  mode: Union[Mode, str] = Mode.DETERMINISTIC,
                  workers: int = 1, share_round_streams: bool = False) -> TwoPhaseReport:
    """Two-phase GFM (deterministic mode) or SGFM (stochastic mode).

    ``share_round_streams`` reuses the round-0 substreams for every round, which
    makes all candidates and phase-2 estimates identical.
    """
    mode = Mode(mode)
    if mode is Mode.DETERMINISTIC:
        require(isinstance(problem, ProblemSpec), "deterministic mode needs a ProblemSpec", "problem")
        base_run, algorithm = run_gfm, Algorithm.TWO_PHASE_GFM
    else:
        require(isinstance(problem, StochasticProblemSpec), "stochastic mode needs a StochasticProblemSpec", "problem")
        base_run, algorithm = run_sgfm, Algorithm.TWO_PHASE_SGFM

    base = config.base
    rounds = config.rounds

    def stream_index(s: int) -> int:
        return 0 if share_round_streams else s

    def candidate(s: int) -> RunReport:
        round_config = replace(base, seed=base.seed.spawn("round", stream_index(s)))
        return base_run(problem, round_config)

    logger.info("Two-phase started", algorithm=algorithm.value, rounds=rounds,
                batch=config.batch, horizon=base.horizon)
    candidates = map_ordered(candidate, range(rounds), workers)

    def phase2(s: int):
        return smoothed_gradient(
            problem, candidates[s].output_point, base.smoothing, config.batch,
            base.seed.spawn("phase2-batch", stream_index(s)),
            sample_rng=base.seed.spawn("phase2-samples", stream_index(s)),
        )

    batches = map_ordered(phase2, range(rounds), workers)
    norms = [batch.norm for batch in batches]
    selected = int(np.argmin(norms))

    phase2_calls = sum(batch.oracle_calls for batch in batches)
    total_calls = sum(c.oracle_calls for c in candidates) + phase2_calls
    logger.info("Two-phase completed", algorithm=algorithm.value, selected_index=selected,
                selected_norm=norms[selected], total_oracle_calls=total_calls)

    return TwoPhaseReport(
        algorithm=algorithm.value,
        candidates=candidates,
        phase2_norms=norms,
        selected_index=selected,
        selected_point=candidates[selected].output_point.copy(),
        total_oracle_calls=total_calls,
        phase2_oracle_calls=phase2_calls,
        evaluation_oracle_calls=sum(c.evaluation_oracle_calls for c in candidates),
    )
