"""Finite sums f = (1/n) sum_i F(., i) and additive-noise oracles."""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from ...models.problem import (
    FiniteSampleSpace,
    GaussianNoiseSpace,
    ProblemMeta,
    ProblemSpec,
    SmoothedReference,
    StochasticProblemSpec,
    as_vector,
)
from ...utils.validators import require, require_positive, validate_finite_array

ComponentOracle = Callable[[np.ndarray], float]
# (points (m, d), indices (m,)) -> F(points[k], indices[k])
ComponentBatch = Callable[[np.ndarray, np.ndarray], np.ndarray]
# points (m, d) -> (m, n) matrix of every component value
AllComponents = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class FiniteSumProblem:
    components: List[ComponentOracle]
    lipschitz_bounds: np.ndarray
    value_gap: float
    dim: int
    name: str = "finite-sum"
    component_batch: Optional[ComponentBatch] = None
    all_components: Optional[AllComponents] = None
    initial_point: Optional[np.ndarray] = None
    smoothed_reference: Optional[SmoothedReference] = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        bounds = np.array(self.lipschitz_bounds, dtype=np.float64).reshape(-1)
        require(len(self.components) >= 1, "a finite sum needs at least one component", "components")
        require(bounds.size == len(self.components),
                f"{len(self.components)} components but {bounds.size} Lipschitz bounds", "lipschitz_bounds")
        require(validate_finite_array(bounds) and bool(np.all(bounds > 0.0)),
                "Lipschitz bounds must be positive and finite", "lipschitz_bounds")
        require_positive(self.value_gap, "value_gap")
        object.__setattr__(self, "lipschitz_bounds", bounds)

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def G(self) -> float:
        """sqrt((1/n) sum_i L_i^2)"""
        return float(np.sqrt(np.mean(self.lipschitz_bounds ** 2)))

    def component(self, x, i: int) -> float:
        return float(self.components[int(i)](x))

    def component_values(self, points: np.ndarray, indices: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        if self.component_batch is not None:
            return np.asarray(self.component_batch(points, np.asarray(indices)), dtype=np.float64)
        return np.fromiter(
            (self.components[int(i)](row) for row, i in zip(points, indices)),
            dtype=np.float64,
            count=len(points),
        )

    def mean_values(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        if self.all_components is not None:
            return np.asarray(self.all_components(points), dtype=np.float64).mean(axis=1)
        matrix = np.array([[component(row) for component in self.components] for row in points])
        return matrix.mean(axis=1)

    def mean(self, x) -> float:
        return float(self.mean_values(np.asarray(x, dtype=np.float64)[None, :])[0])

    def as_stochastic(self) -> StochasticProblemSpec:
        """SGFM view: xi uniform over component indices, metadata Lipschitz = G"""
        return StochasticProblemSpec(
            meta=ProblemMeta(dim=self.dim, lipschitz=self.G, value_gap=self.value_gap),
            sampled_oracle=self.component,
            sample_space=FiniteSampleSpace(self.n),
            name=self.name,
            mean_oracle=self.mean,
            batch_sampled_oracle=self.component_values,
            mean_batch_oracle=self.mean_values,
            initial_point=self.initial_point,
            smoothed_reference=self.smoothed_reference,
            extras=dict(self.extras, lipschitz_bounds=self.lipschitz_bounds),
        )

    def as_problem(self) -> ProblemSpec:
        """GFM view of the mean; it is (mean L_i)-Lipschitz"""
        return ProblemSpec(
            meta=ProblemMeta(dim=self.dim, lipschitz=float(self.lipschitz_bounds.mean()),
                             value_gap=self.value_gap),
            value_oracle=self.mean,
            name=self.name,
            batch_oracle=self.mean_values,
            initial_point=self.initial_point,
            smoothed_reference=self.smoothed_reference,
        )


def make_finite_sum_affine(A, b: Sequence[float], absolute: bool = True,
                           value_gap: float = None, initial_point=None) -> FiniteSumProblem:
    """F(x, i) = |<a_i, x> - b_i| (or the signed affine map when absolute is False)"""
    A = np.atleast_2d(np.array(A, dtype=np.float64))
    b = as_vector(b, A.shape[0], "b")
    require(validate_finite_array(A), "A has non-finite entries", "A")
    bounds = np.linalg.norm(A, axis=1)
    require(bool(np.all(bounds > 0.0)), "every row of A must be nonzero", "A")
    dim = A.shape[1]
    start = np.zeros(dim) if initial_point is None else as_vector(initial_point, dim, "initial_point")
    link = np.abs if absolute else (lambda z: z)

    def component_batch(points, indices):
        return link(np.einsum("md,md->m", points, A[indices]) - b[indices])

    def all_components(points):
        return link(points @ A.T - b)

    if value_gap is None:
        require(absolute, "signed affine sums need an explicit value_gap", "value_gap")
        # inf f >= 0 for absolute components
        value_gap = max(float(all_components(start[None, :]).mean()), 1e-8)

    components = [
        (lambda x, a=A[i], c=b[i]: float(link(np.dot(a, x) - c)))
        for i in range(A.shape[0])
    ]
    slope = A.mean(axis=0)

    def reference(x, delta):
        # signed affine: f_delta = f and grad f_delta is the mean row
        return float(np.dot(slope, x) - b.mean()), slope.copy()

    return FiniteSumProblem(
        components=components,
        lipschitz_bounds=bounds,
        value_gap=value_gap,
        dim=dim,
        name=f"finite-sum-affine-n{A.shape[0]}-d{dim}",
        component_batch=component_batch,
        all_components=all_components,
        initial_point=start,
        smoothed_reference=None if absolute else reference,
    )


def make_additive_noise(problem: ProblemSpec, scale: float) -> StochasticProblemSpec:
    """F(x, xi) = f(x) + xi with xi ~ N(0, scale^2); shares f's Lipschitz constant"""
    space = GaussianNoiseSpace(scale)

    def sampled(x, noise):
        return problem.value(x) + float(noise)

    def batch_sampled(points, noises):
        return problem.values(points) + np.asarray(noises, dtype=np.float64)

    return StochasticProblemSpec(
        meta=problem.meta,
        sampled_oracle=sampled,
        sample_space=space,
        name=f"{problem.name}+noise{scale:g}",
        mean_oracle=problem.value_oracle,
        batch_sampled_oracle=batch_sampled,
        mean_batch_oracle=problem.values,
        smoothed_reference=problem.smoothed_reference,
        initial_point=problem.initial_point,
    )
