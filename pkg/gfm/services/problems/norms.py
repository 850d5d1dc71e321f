"""Norm-type test problems, including the pair for which the smoothing bounds are tight."""

import numpy as np
from scipy import integrate, stats

from ...models.problem import ProblemMeta, ProblemSpec, as_vector
from ...utils.constants import QUADRATURE_TOLERANCE
from ...utils.validators import require, require_positive, require_positive_int


def _unit(w, dim: int) -> np.ndarray:
    w = as_vector(w, dim, "w")
    norm = np.linalg.norm(w)
    require(norm > 0.0, "w must be nonzero", "w")
    return w / norm


def make_norm(dim: int, L: float = 1.0, value_gap: float = None, start_radius: float = 1.0) -> ProblemSpec:
    """f(x) = L ||x||; starts at distance start_radius along the diagonal"""
    require_positive_int(dim, "dim")
    require_positive(L, "L")
    require_positive(start_radius, "start_radius")
    gap = L * start_radius if value_gap is None else value_gap
    require(gap >= L * start_radius, "value_gap must be at least L * start_radius", "value_gap")

    def gradient(x):
        norm = np.linalg.norm(x)
        return np.zeros(dim) if norm == 0.0 else L * x / norm

    return ProblemSpec(
        meta=ProblemMeta(dim=dim, lipschitz=L, value_gap=gap, known_optimum=0.0),
        value_oracle=lambda x: L * float(np.linalg.norm(x)),
        name=f"norm-d{dim}",
        batch_oracle=lambda points: L * np.linalg.norm(points, axis=1),
        exact_gradient=gradient,
        initial_point=np.full(dim, start_radius / np.sqrt(dim)),
    )


def _first_coordinate_law(dim: int):
    """Law of u_1 for u uniform in the unit ball of R^dim, as Beta on (u_1 + 1) / 2"""
    shape = 0.5 * (dim + 1)
    return stats.beta(shape, shape)


def _halfspace_reference(L: float, direction: np.ndarray, dim: int):
    law = _first_coordinate_law(dim)

    def reference(x, delta):
        shift = float(np.dot(x, direction)) - 0.5
        kink = -shift / delta
        cdf = float(law.cdf(np.clip((kink + 1.0) / 2.0, 0.0, 1.0)))
        grad = L * (1.0 - 2.0 * cdf) * direction

        def integrand(t):
            return abs(shift + delta * t) * 0.5 * law.pdf((t + 1.0) / 2.0)

        points = [kink] if -1.0 < kink < 1.0 else None
        value, _ = integrate.quad(integrand, -1.0, 1.0, points=points,
                                  epsabs=QUADRATURE_TOLERANCE, limit=200)
        return L * value, grad

    return reference


def make_halfspace_distance(dim: int, L: float = 1.0, w=None, value_gap: float = None) -> ProblemSpec:
    """f(x) = L |<x, w/||w||> - 1/2|"""
    require_positive_int(dim, "dim")
    require_positive(L, "L")
    direction = _unit(np.eye(dim)[0] if w is None else w, dim)

    def value(x):
        return L * abs(float(np.dot(x, direction)) - 0.5)

    def gradient(x):
        return L * np.sign(float(np.dot(x, direction)) - 0.5) * direction

    return ProblemSpec(
        meta=ProblemMeta(dim=dim, lipschitz=L, value_gap=L / 2 if value_gap is None else value_gap,
                         known_optimum=0.0),
        value_oracle=value,
        name=f"halfspace-d{dim}",
        batch_oracle=lambda points: L * np.abs(points @ direction - 0.5),
        exact_gradient=gradient,
        smoothed_reference=_halfspace_reference(L, direction, dim),
        initial_point=np.zeros(dim),
    )


def make_tight_mixture(dim: int, L: float = 1.0, w=None, value_gap: float = None) -> ProblemSpec:
    """f = (L ||x|| + L |<x, w/||w||> - 1/2|) / 2.

    The minimum L/4 is attained on the segment from 0 to w/(2||w||); the run
    starts at -w/||w|| where f = 5L/4.
    """
    require_positive_int(dim, "dim")
    require_positive(L, "L")
    direction = _unit(np.eye(dim)[0] if w is None else w, dim)

    def value(x):
        return 0.5 * L * (float(np.linalg.norm(x)) + abs(float(np.dot(x, direction)) - 0.5))

    def batch(points):
        return 0.5 * L * (np.linalg.norm(points, axis=1) + np.abs(points @ direction - 0.5))

    return ProblemSpec(
        meta=ProblemMeta(dim=dim, lipschitz=L, value_gap=L if value_gap is None else value_gap,
                         known_optimum=L / 4),
        value_oracle=value,
        name=f"tight-mixture-d{dim}",
        batch_oracle=batch,
        initial_point=-direction,
    )


def make_linear(a, offset: float = 0.0, value_gap: float = 1.0) -> ProblemSpec:
    """f(x) = <a, x> + offset; f_delta = f and grad f_delta = a everywhere"""
    a = as_vector(a, field_name="a")
    slope = float(np.linalg.norm(a))
    require(slope > 0.0, "a must be nonzero; use make_constant for flat problems", "a")

    return ProblemSpec(
        meta=ProblemMeta(dim=a.size, lipschitz=slope, value_gap=value_gap),
        value_oracle=lambda x: float(np.dot(a, x)) + offset,
        name=f"linear-d{a.size}",
        batch_oracle=lambda points: points @ a + offset,
        exact_gradient=lambda x: a.copy(),
        smoothed_reference=lambda x, delta: (float(np.dot(a, x)) + offset, a.copy()),
    )


def make_constant(dim: int, value: float = 0.0, L: float = 1.0, value_gap: float = 1.0) -> ProblemSpec:
    """f(x) = value; any positive L is a valid declared bound"""
    require_positive_int(dim, "dim")

    return ProblemSpec(
        meta=ProblemMeta(dim=dim, lipschitz=L, value_gap=value_gap, known_optimum=value),
        value_oracle=lambda x: value,
        name=f"constant-d{dim}",
        batch_oracle=lambda points: np.full(len(points), float(value)),
        exact_gradient=lambda x: np.zeros(dim),
        smoothed_reference=lambda x, delta: (float(value), np.zeros(dim)),
        initial_point=np.ones(dim),
    )
