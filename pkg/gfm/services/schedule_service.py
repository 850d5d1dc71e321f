"""Step sizes, horizons and complexity bounds from the convergence analysis.

With K = c * d^(3/2) * L^3 * (L + Delta / delta) (G replaces L for the
stochastic methods):

* step size        eta = (1/10) * sqrt(delta * (Delta + delta L) / (c d^(3/2) L^3 T))
* descent average  (1/T) sum_t E||grad f_delta(x^t)||^2 <= 20 sqrt(K / T)
* expected measure E||grad f_delta(x^R)|| <= 5 (K / T)^(1/4)
* two-phase        T = K (160 / eps^2)^2, S = ceil(log2(2 / Lambda)),
                   B = 384 sqrt(2 pi) d L^2 (S + 1) / (Lambda eps^2)
"""

import math
from typing import NamedTuple

import structlog
from scipy.special import gammaln

from ..models.params import DeskCaps, ScheduleInputs
from ..utils.constants import SECOND_MOMENT_CONSTANT
from ..utils.validators import require_positive_int

logger = structlog.get_logger(__name__)


class TwoPhaseSchedule(NamedTuple):
    horizon: int
    rounds: int
    batch: int


class CappedSchedule(NamedTuple):
    horizon: int
    rounds: int
    batch: int
    capped: bool
    uncapped: TwoPhaseSchedule


def _difficulty(inputs: ScheduleInputs) -> float:
    lip = inputs.lipschitz
    return (inputs.smoothing_constant * inputs.dim ** 1.5 * lip ** 3
            * (lip + inputs.value_gap / inputs.delta))


def schedule_eta(inputs: ScheduleInputs, horizon: int) -> float:
    require_positive_int(horizon, "horizon")
    lip = inputs.lipschitz
    numerator = inputs.delta * (inputs.value_gap + inputs.delta * lip)
    denominator = inputs.smoothing_constant * inputs.dim ** 1.5 * lip ** 3 * horizon
    return 0.1 * math.sqrt(numerator / denominator)


def schedule_rounds(confidence: float) -> int:
    """S = ceil(log2(2 / Lambda)), exact at powers of two"""
    ratio = 2.0 / confidence
    mantissa, exponent = math.frexp(ratio)
    # ratio = mantissa * 2^exponent with mantissa in [0.5, 1)
    return exponent - 1 if mantissa == 0.5 else exponent


def schedule_two_phase(inputs: ScheduleInputs) -> TwoPhaseSchedule:
    horizon = _difficulty(inputs) * (160.0 / inputs.target ** 2) ** 2
    rounds = schedule_rounds(inputs.confidence)
    batch = (SECOND_MOMENT_CONSTANT * 24.0 * inputs.dim * inputs.lipschitz ** 2 * (rounds + 1)
             / (inputs.confidence * inputs.target ** 2))
    schedule = TwoPhaseSchedule(math.ceil(horizon), rounds, math.ceil(batch))
    logger.debug("Two-phase schedule computed", horizon=schedule.horizon,
                 rounds=schedule.rounds, batch=schedule.batch)
    return schedule


def cap_schedule(schedule: TwoPhaseSchedule, caps: DeskCaps) -> CappedSchedule:
    horizon = min(schedule.horizon, caps.max_horizon)
    batch = min(schedule.batch, caps.max_batch)
    capped = horizon != schedule.horizon or batch != schedule.batch
    if capped:
        logger.info("Schedule exceeds desk caps",
                    horizon=schedule.horizon, batch=schedule.batch,
                    capped_horizon=horizon, capped_batch=batch)
    return CappedSchedule(horizon, schedule.rounds, batch, capped, schedule)


def oracle_complexity_bound(inputs: ScheduleInputs) -> float:
    """Order estimate d^(3/2) (L^4 + Delta L^3 / delta) / eps^4, constants omitted"""
    lip = inputs.lipschitz
    return (inputs.dim ** 1.5 * (lip ** 4 + inputs.value_gap * lip ** 3 / inputs.delta)
            / inputs.target ** 4)


def markov_complexity_bound(inputs: ScheduleInputs) -> float:
    """Single run boosted to confidence 1 - Lambda through Markov's inequality"""
    return oracle_complexity_bound(inputs) / inputs.confidence ** 4


def two_phase_complexity_bound(inputs: ScheduleInputs) -> float:
    """Order estimate of the two-phase total, constants omitted"""
    log_term = math.log2(1.0 / inputs.confidence)
    variance_term = inputs.dim * inputs.lipschitz ** 2 / (inputs.confidence * inputs.target ** 2)
    return (oracle_complexity_bound(inputs) + variance_term) * log_term


def descent_bound(inputs: ScheduleInputs, horizon: int) -> float:
    """Right-hand side 20 sqrt(K / T) of the averaged descent inequality"""
    require_positive_int(horizon, "horizon")
    return 20.0 * math.sqrt(_difficulty(inputs) / horizon)


def expected_stationarity_bound(inputs: ScheduleInputs, horizon: int) -> float:
    require_positive_int(horizon, "horizon")
    return 5.0 * (_difficulty(inputs) / horizon) ** 0.25


def ball_volume(dim: int) -> float:
    """Volume c_d = pi^(d/2) / Gamma(d/2 + 1) of the unit ball in R^d"""
    if dim == 0:
        return 1.0
    return math.exp(0.5 * dim * math.log(math.pi) - gammaln(0.5 * dim + 1.0))


def gradient_lipschitz_ratio(dim: int) -> float:
    """(1/sqrt(d)) * 2 c_{d-1} / c_d: the sharp c for the smoothed gradient in R^d"""
    require_positive_int(dim, "dim")
    log_ratio = (math.log(2.0) - 0.5 * math.log(math.pi)
                 + gammaln(0.5 * dim + 1.0) - gammaln(0.5 * dim + 0.5))
    return math.exp(log_ratio) / math.sqrt(dim)
