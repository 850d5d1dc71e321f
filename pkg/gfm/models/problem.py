"""Problem descriptions: value oracles plus declared metadata."""

from dataclasses import dataclass, field, replace
from typing import Callable, Hashable, Optional, Tuple

import numpy as np

from ..utils.metrics import OracleCounter
from ..utils.validators import require, require_positive, require_positive_int, validate_finite_array

Vector = np.ndarray
# An opaque draw from the sample distribution; the oracle is deterministic given it
SampleToken = Hashable

ValueOracle = Callable[[Vector], float]
BatchOracle = Callable[[np.ndarray], np.ndarray]
SmoothedReference = Callable[[Vector, float], Tuple[float, Vector]]
GoldsteinOracle = Callable[[Vector, float], Tuple[float, float]]


def as_vector(x, dim: Optional[int] = None, field_name: str = "x") -> Vector:
    """Validate and copy x into a finite float64 vector"""
    arr = np.array(x, dtype=np.float64).reshape(-1)
    require(arr.size >= 1, f"{field_name} must have at least one entry", field_name)
    require(validate_finite_array(arr), f"{field_name} has non-finite entries", field_name)
    if dim is not None:
        require(arr.size == dim, f"{field_name} has dimension {arr.size}, expected {dim}", field_name)
    return arr


@dataclass(frozen=True)
class ProblemMeta:
    dim: int
    lipschitz: float
    value_gap: float
    known_optimum: Optional[float] = None

    def __post_init__(self):
        require_positive_int(self.dim, "dim")
        require_positive(self.lipschitz, "lipschitz")
        require_positive(self.value_gap, "value_gap")

    def to_dict(self):
        return {
            "dim": self.dim,
            "lipschitz": self.lipschitz,
            "value_gap": self.value_gap,
            "known_optimum": self.known_optimum,
        }


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    meta: ProblemMeta
    value_oracle: ValueOracle
    name: str = "problem"
    batch_oracle: Optional[BatchOracle] = None
    exact_gradient: Optional[Callable[[Vector], Vector]] = None
    goldstein_oracle: Optional[GoldsteinOracle] = None
    smoothed_reference: Optional[SmoothedReference] = None
    initial_point: Optional[Vector] = None

    @property
    def dim(self) -> int:
        return self.meta.dim

    def value(self, x: Vector) -> float:
        return float(self.value_oracle(x))

    def values(self, points: np.ndarray) -> np.ndarray:
        """Oracle values at each row of an (n, d) array; n oracle calls"""
        points = np.atleast_2d(points)
        if self.batch_oracle is not None:
            return np.asarray(self.batch_oracle(points), dtype=np.float64).reshape(-1)
        return np.fromiter((self.value_oracle(row) for row in points), dtype=np.float64, count=len(points))

    def start(self) -> Vector:
        if self.initial_point is None:
            return np.zeros(self.dim)
        return np.array(self.initial_point, dtype=np.float64)

    def instrumented(self) -> Tuple["ProblemSpec", OracleCounter]:
        """Copy whose oracle invocations are tallied by the returned counter"""
        counter = OracleCounter()
        value_oracle = self.value_oracle
        batch_oracle = self.batch_oracle

        def counted_value(x):
            counter.add(1)
            return value_oracle(x)

        counted_batch = None
        if batch_oracle is not None:
            def counted_batch(points):
                counter.add(len(points))
                return batch_oracle(points)

        return replace(self, value_oracle=counted_value, batch_oracle=counted_batch), counter

    def scaled(self, alpha: float) -> "ProblemSpec":
        """The problem alpha * f with metadata scaled accordingly"""
        require_positive(alpha, "alpha")
        value_oracle = self.value_oracle
        batch_oracle = self.batch_oracle
        meta = replace(
            self.meta,
            lipschitz=self.meta.lipschitz * alpha,
            value_gap=self.meta.value_gap * alpha,
            known_optimum=None if self.meta.known_optimum is None else self.meta.known_optimum * alpha,
        )
        return ProblemSpec(
            meta=meta,
            value_oracle=lambda x: alpha * value_oracle(x),
            name=f"{alpha:g}*{self.name}",
            batch_oracle=None if batch_oracle is None else (lambda pts: alpha * batch_oracle(pts)),
            initial_point=self.initial_point,
        )


class FiniteSampleSpace:
    """Uniform distribution over the indices 0..n-1"""

    def __init__(self, n: int):
        require_positive_int(n, "n")
        self.n = int(n)

    def draw(self, generator: np.random.Generator, size: int) -> np.ndarray:
        return generator.integers(0, self.n, size=size)

    def tokens(self) -> np.ndarray:
        return np.arange(self.n)

    def describe(self) -> str:
        return f"uniform over {self.n} indices"


class GaussianNoiseSpace:
    """Scalar N(0, scale^2) draws; the token is the noise value itself"""

    def __init__(self, scale: float):
        require(scale >= 0.0 and np.isfinite(scale), f"scale must be finite and >= 0, got {scale}", "scale")
        self.scale = float(scale)

    def draw(self, generator: np.random.Generator, size: int) -> np.ndarray:
        return self.scale * generator.standard_normal(size)

    def tokens(self):
        return None

    def describe(self) -> str:
        return f"gaussian noise with scale {self.scale:g}"


@dataclass(frozen=True, eq=False)
class StochasticProblemSpec:
    meta: ProblemMeta
    sampled_oracle: Callable[[Vector, SampleToken], float]
    sample_space: object
    name: str = "stochastic-problem"
    mean_oracle: Optional[ValueOracle] = None
    batch_sampled_oracle: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    mean_batch_oracle: Optional[BatchOracle] = None
    smoothed_reference: Optional[SmoothedReference] = None
    initial_point: Optional[Vector] = None
    extras: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.meta.dim

    def sample(self, x: Vector, token: SampleToken) -> float:
        return float(self.sampled_oracle(x, token))

    def samples(self, points: np.ndarray, tokens: np.ndarray) -> np.ndarray:
        """Row-wise F(points[k], tokens[k]); len(points) oracle calls"""
        points = np.atleast_2d(points)
        if self.batch_sampled_oracle is not None:
            return np.asarray(self.batch_sampled_oracle(points, tokens), dtype=np.float64).reshape(-1)
        return np.fromiter(
            (self.sampled_oracle(row, tok) for row, tok in zip(points, tokens)),
            dtype=np.float64,
            count=len(points),
        )

    def draw_tokens(self, generator: np.random.Generator, size: int) -> np.ndarray:
        return self.sample_space.draw(generator, size)

    def start(self) -> Vector:
        if self.initial_point is None:
            return np.zeros(self.dim)
        return np.array(self.initial_point, dtype=np.float64)

    def as_deterministic(self) -> ProblemSpec:
        """The mean objective f as a deterministic problem"""
        require(self.mean_oracle is not None, f"{self.name} has no mean oracle", "mean_oracle")
        return ProblemSpec(
            meta=self.meta,
            value_oracle=self.mean_oracle,
            name=self.name,
            batch_oracle=self.mean_batch_oracle,
            smoothed_reference=self.smoothed_reference,
            initial_point=self.initial_point,
        )

    def instrumented(self) -> Tuple["StochasticProblemSpec", OracleCounter]:
        """Copy whose sampled and mean oracle invocations are tallied"""
        counter = OracleCounter()
        sampled = self.sampled_oracle
        batch = self.batch_sampled_oracle
        mean = self.mean_oracle
        mean_batch = self.mean_batch_oracle

        def counted_sampled(x, token):
            counter.add(1)
            return sampled(x, token)

        counted_batch = None
        if batch is not None:
            def counted_batch(points, tokens):
                counter.add(len(points))
                return batch(points, tokens)

        counted_mean = None
        if mean is not None:
            def counted_mean(x):
                counter.add(1)
                return mean(x)

        counted_mean_batch = None
        if mean_batch is not None:
            def counted_mean_batch(points):
                counter.add(len(points))
                return mean_batch(points)

        spec = replace(
            self,
            sampled_oracle=counted_sampled,
            batch_sampled_oracle=counted_batch,
            mean_oracle=counted_mean,
            mean_batch_oracle=counted_mean_batch,
        )
        return spec, counter
