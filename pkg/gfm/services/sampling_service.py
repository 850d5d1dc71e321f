"""Sphere/ball sampling, two-point estimators and Monte-Carlo smoothing.

The estimator at x with direction w on the unit sphere is

    g = d / (2 delta) * (f(x + delta w) - f(x - delta w)) * w

and is unbiased for the gradient of f_delta(x) = E_u[f(x + delta u)] with u
uniform on the unit ball. The single-draw functions are the n = 1 case of the
batch path, so a batch of one reproduces a single estimate exactly.
"""

import contextlib
import contextvars
from typing import Optional, Tuple, Union

import numpy as np
import structlog

from ..models.params import SmoothingParams
from ..models.problem import ProblemSpec, StochasticProblemSpec, as_vector
from ..models.reports import GradientBatch, GradientEstimate
from ..models.rng import RngLike, as_generator
from ..utils.constants import SPHERE_MIN_NORM
from ..utils.exceptions import OracleError
from ..utils.validators import require, require_positive_int

logger = structlog.get_logger(__name__)

AnyProblem = Union[ProblemSpec, StochasticProblemSpec]

# Rows per block in batch estimation
BATCH_BLOCK = 65_536

_ESTIMATOR_SCALE = contextvars.ContextVar("estimator_scale", default=1.0)


@contextlib.contextmanager
def estimator_fault(scale: float):
    """Multiply every two-point estimate by ``scale`` inside the block"""
    token = _ESTIMATOR_SCALE.set(float(scale))
    logger.warning("Estimator fault injected", scale=scale)
    try:
        yield
    finally:
        _ESTIMATOR_SCALE.reset(token)


def sample_unit_sphere_batch(n: int, dim: int, rng: RngLike) -> np.ndarray:
    """n directions uniform on the unit sphere in R^dim, as an (n, dim) array"""
    require_positive_int(dim, "dim")
    generator = as_generator(rng)
    draws = generator.standard_normal((n, dim))
    norms = np.linalg.norm(draws, axis=1)
    degenerate = np.flatnonzero(norms < SPHERE_MIN_NORM)
    while degenerate.size:
        draws[degenerate] = generator.standard_normal((degenerate.size, dim))
        norms[degenerate] = np.linalg.norm(draws[degenerate], axis=1)
        degenerate = degenerate[norms[degenerate] < SPHERE_MIN_NORM]
    return draws / norms[:, None]


def sample_unit_sphere(dim: int, rng: RngLike) -> np.ndarray:
    return sample_unit_sphere_batch(1, dim, rng)[0]


def sample_unit_ball(n: int, dim: int, rng: RngLike) -> np.ndarray:
    """n points uniform in the unit ball via the radius transform r^(1/d)"""
    generator = as_generator(rng)
    directions = sample_unit_sphere_batch(n, dim, generator)
    radii = generator.random(n) ** (1.0 / dim)
    return directions * radii[:, None]


def _check_finite(values: np.ndarray, x: np.ndarray, context: str):
    if not np.all(np.isfinite(values)):
        raise OracleError(f"non-finite oracle value during {context}", x=x)


def _pair_values(problem: AnyProblem, x: np.ndarray, offsets: np.ndarray,
                 tokens: Optional[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    n = len(offsets)
    points = np.concatenate([x + offsets, x - offsets])
    if tokens is None:
        values = problem.values(points)
    else:
        values = problem.samples(points, np.concatenate([tokens, tokens]))
    return values[:n], values[n:]


def _estimates(directions: np.ndarray, plus: np.ndarray, minus: np.ndarray,
               params: SmoothingParams) -> np.ndarray:
    dim = directions.shape[1]
    coefficients = _ESTIMATOR_SCALE.get() * dim / (2.0 * params.delta) * (plus - minus)
    return coefficients[:, None] * directions


def _draw_block(problem: AnyProblem, x: np.ndarray, params: SmoothingParams, n: int,
                generator: np.random.Generator, sample_generator: Optional[np.random.Generator]):
    directions = sample_unit_sphere_batch(n, problem.dim, generator)
    tokens = None
    if isinstance(problem, StochasticProblemSpec):
        tokens = problem.draw_tokens(sample_generator or generator, n)
    plus, minus = _pair_values(problem, x, params.delta * directions, tokens)
    _check_finite(plus, x, "two-point estimation")
    _check_finite(minus, x, "two-point estimation")
    return directions, plus, minus, _estimates(directions, plus, minus, params)


def two_point_estimate(problem: ProblemSpec, x, params: SmoothingParams, rng: RngLike) -> GradientEstimate:
    """One estimate from a fresh sphere direction; exactly 2 oracle calls"""
    x = as_vector(x, problem.dim)
    directions, plus, minus, estimates = _draw_block(problem, x, params, 1, as_generator(rng), None)
    return GradientEstimate(
        direction=directions[0],
        value_plus=float(plus[0]),
        value_minus=float(minus[0]),
        estimate=estimates[0],
        oracle_calls=2,
    )


def two_point_estimate_stochastic(problem: StochasticProblemSpec, x, params: SmoothingParams,
                                  rng: RngLike, sample_rng: Optional[RngLike] = None) -> GradientEstimate:
    """One estimate with a single xi shared by both evaluations.

    Directions come from ``rng``; xi comes from ``sample_rng`` when given,
    otherwise from ``rng`` right after the direction.
    """
    x = as_vector(x, problem.dim)
    sample_generator = None if sample_rng is None else as_generator(sample_rng)
    directions, plus, minus, estimates = _draw_block(problem, x, params, 1, as_generator(rng), sample_generator)
    return GradientEstimate(
        direction=directions[0],
        value_plus=float(plus[0]),
        value_minus=float(minus[0]),
        estimate=estimates[0],
        oracle_calls=2,
    )


class _RunningMoments:
    """Mean and sum of squared deviations merged block by block (Chan et al.)"""

    def __init__(self, width: int):
        self.count = 0
        self.mean = np.zeros(width)
        self.m2 = np.zeros(width)

    def update(self, block: np.ndarray):
        block = block.reshape(len(block), -1)
        n_b = len(block)
        mean_b = block.mean(axis=0)
        m2_b = ((block - mean_b) ** 2).sum(axis=0)
        total = self.count + n_b
        delta = mean_b - self.mean
        self.mean = self.mean + delta * (n_b / total)
        self.m2 = self.m2 + m2_b + delta ** 2 * (self.count * n_b / total)
        self.count = total

    def std_error(self) -> np.ndarray:
        if self.count < 2:
            return np.full_like(self.mean, np.nan)
        return np.sqrt(self.m2 / (self.count - 1) / self.count)


def smoothed_gradient(problem: AnyProblem, x, params: SmoothingParams, n_samples: int,
                      rng: RngLike, sample_rng: Optional[RngLike] = None) -> GradientBatch:
    """Average of n_samples independent two-point estimates at x (2n oracle calls).

    Its norm upper-bounds the Goldstein stationarity measure in expectation and
    is the toolkit's computable surrogate for it.
    """
    require_positive_int(n_samples, "n_samples")
    x = as_vector(x, problem.dim)
    generator = as_generator(rng)
    sample_generator = None if sample_rng is None else as_generator(sample_rng)

    moments = _RunningMoments(problem.dim)
    squared = _RunningMoments(1)
    remaining = n_samples
    while remaining > 0:
        size = min(BATCH_BLOCK, remaining)
        _, _, _, estimates = _draw_block(problem, x, params, size, generator, sample_generator)
        moments.update(estimates)
        squared.update(np.einsum("ij,ij->i", estimates, estimates))
        remaining -= size

    return GradientBatch(
        mean=moments.mean,
        std_error=moments.std_error(),
        n_samples=n_samples,
        oracle_calls=2 * n_samples,
        squared_norm_mean=float(squared.mean[0]),
        squared_norm_std_error=float(squared.std_error()[0]),
    )


def smoothed_value(problem: ProblemSpec, x, params: SmoothingParams, n_samples: int,
                   rng: RngLike) -> Tuple[float, float]:
    """Monte-Carlo f_delta(x) with ball sampling; returns (mean, std_error)"""
    require(isinstance(n_samples, (int, np.integer)) and n_samples >= 2,
            f"n_samples must be an integer >= 2, got {n_samples!r}", "n_samples")
    x = as_vector(x, problem.dim)
    generator = as_generator(rng)

    moments = _RunningMoments(1)
    remaining = n_samples
    while remaining > 0:
        size = min(BATCH_BLOCK, remaining)
        points = x + params.delta * sample_unit_ball(size, problem.dim, generator)
        values = problem.values(points)
        _check_finite(values, x, "smoothed value estimation")
        moments.update(values)
        remaining -= size

    return float(moments.mean[0]), float(moments.std_error()[0])
