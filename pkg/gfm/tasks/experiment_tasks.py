"""Execution units for the CLI: one (experiment, seed) pair produces one CSV row."""

import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import structlog

from ..models.experiment import ExperimentConfig
from ..models.params import DeskCaps, RunConfig, ScheduleInputs, SmoothingParams, TwoPhaseConfig
from ..models.rng import derive_stream
from ..services.optimizer_service import run_gfm, run_sgfm, run_two_phase
from ..services.problems import as_deterministic, as_stochastic, build_problem
from ..services.schedule_service import cap_schedule, schedule_eta, schedule_two_phase
from ..utils.constants import Algorithm, Mode
from ..utils.exceptions import DivergenceError, OracleError
from .worker_pool import map_ordered

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class ResolvedParameters:
    eta: float
    horizon: int
    rounds: int
    batch: int
    capped: bool = False
    uncapped: Optional[Dict[str, int]] = None

    def to_dict(self):
        return {
            "eta": self.eta,
            "horizon": self.horizon,
            "rounds": self.rounds,
            "batch": self.batch,
            "capped": self.capped,
            "uncapped": self.uncapped,
        }


@dataclass(frozen=True)
class Job:
    experiment: ExperimentConfig
    seed_index: int
    grid: Dict[str, Any] = field(default_factory=dict)


def build_view(experiment: ExperimentConfig):
    """The problem as the configured algorithm consumes it; data depend only on the master seed"""
    stream = derive_stream(experiment.experiment.master_seed, "problem", 0)
    problem = build_problem(experiment.problem.id, experiment.problem.params, stream)
    if experiment.algorithm.name.is_stochastic:
        return as_stochastic(problem)
    return as_deterministic(problem)


def resolve_parameters(experiment: ExperimentConfig, problem) -> ResolvedParameters:
    """(eta, T, S, B) from the explicit block, or from the schedule under the desk caps"""
    if experiment.explicit is not None:
        explicit = experiment.explicit
        return ResolvedParameters(explicit.eta, explicit.horizon, explicit.rounds, explicit.batch)

    schedule = experiment.schedule
    inputs = ScheduleInputs(
        dim=problem.dim,
        lipschitz=schedule.lipschitz or problem.meta.lipschitz,
        value_gap=schedule.value_gap or problem.meta.value_gap,
        delta=experiment.smoothing.delta,
        target=schedule.target,
        confidence=schedule.confidence,
        smoothing_constant=experiment.smoothing.smoothing_constant,
    )
    caps = DeskCaps(max_horizon=experiment.caps.max_horizon, max_batch=experiment.caps.max_batch)
    capped = cap_schedule(schedule_two_phase(inputs), caps)
    horizon = schedule.horizon or capped.horizon
    return ResolvedParameters(
        eta=schedule_eta(inputs, horizon),
        horizon=horizon,
        rounds=capped.rounds,
        batch=capped.batch,
        capped=capped.capped,
        uncapped=capped.uncapped._asdict(),
    )


def execute_job(job: Job) -> Dict[str, Any]:
    """Run one seed of an experiment and return its CSV row"""
    experiment = job.experiment
    algorithm: Algorithm = experiment.algorithm.name
    problem = build_view(experiment)
    params = resolve_parameters(experiment, problem)

    base = RunConfig(
        eta=params.eta,
        horizon=params.horizon,
        smoothing=SmoothingParams(experiment.smoothing.delta, experiment.smoothing.smoothing_constant),
        seed=derive_stream(experiment.experiment.master_seed, "seed", job.seed_index),
        divergence_bound=experiment.run.divergence_bound,
        reference_batch=experiment.run.reference_batch,
    )

    started = time.perf_counter()
    if algorithm.is_two_phase:
        mode = Mode.STOCHASTIC if algorithm.is_stochastic else Mode.DETERMINISTIC
        block = experiment.schedule or experiment.explicit
        two_phase = TwoPhaseConfig(base=base, rounds=params.rounds, batch=params.batch,
                                   confidence=block.confidence, target=block.target)
        report = run_two_phase(problem, two_phase, mode)
        selected = report.selected
        rounds, batch = params.rounds, params.batch
        oracle_calls = report.total_oracle_calls
    else:
        selected = run_sgfm(problem, base) if algorithm.is_stochastic else run_gfm(problem, base)
        rounds, batch = 1, 0
        oracle_calls = selected.oracle_calls
    wall_time = time.perf_counter() - started

    row = {
        "algorithm": algorithm.value,
        "problem": problem.name,
        "d": problem.dim,
        "delta": experiment.smoothing.delta,
        "eta": params.eta,
        "T": params.horizon,
        "S": rounds,
        "B": batch,
        "seed": job.seed_index,
        "R": selected.output_index,
        "oracle_calls": oracle_calls,
        "final_value": selected.final_value,
        "stationarity_mean": selected.stationarity_estimate[0],
        "stationarity_stderr": selected.stationarity_estimate[1],
        "wall_time_s": wall_time if experiment.experiment.record_wall_time else 0.0,
    }
    row.update(job.grid)
    return row


def _guarded(job: Job):
    try:
        return execute_job(job), None
    except (OracleError, DivergenceError) as exc:
        logger.error("Job aborted", seed=job.seed_index, grid=job.grid,
                     error_code=exc.error_code, message=exc.message)
        return None, exc


def execute_jobs(jobs: List[Job], workers: int = 1) -> Tuple[List[Dict[str, Any]], Optional[Exception]]:
    """Rows of the completed jobs in job order, plus the first runtime abort if any"""
    outcomes = map_ordered(_guarded, jobs, workers)
    rows = [row for row, _ in outcomes if row is not None]
    aborts = [exc for _, exc in outcomes if exc is not None]
    return rows, (aborts[0] if aborts else None)


def seed_jobs(experiment: ExperimentConfig, grid: Dict[str, Any] = None) -> List[Job]:
    return [Job(experiment, k, dict(grid or {})) for k in range(experiment.experiment.n_seeds)]
