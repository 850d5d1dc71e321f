"""Continuous piecewise-linear functions on the real line.

These are the problems whose delta-Goldstein subdifferential is known exactly:
it is the interval spanned by the slopes of every segment meeting the closed
ball [x - delta, x + delta].
"""

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy import integrate

from ...models.problem import ProblemMeta, ProblemSpec
from ...utils.constants import QUADRATURE_TOLERANCE
from ...utils.validators import require, require_positive, validate_finite_array


@dataclass(frozen=True, eq=False)
class PiecewiseLinear1D:
    """Segment k has slope slopes[k]; segment k ends at breakpoints[k].

    ``anchor`` is the value at the first breakpoint, or at 0 when there are no
    breakpoints.
    """
    breakpoints: np.ndarray
    slopes: np.ndarray
    anchor: float = 0.0

    def __post_init__(self):
        breakpoints = np.array(self.breakpoints, dtype=np.float64).reshape(-1)
        slopes = np.array(self.slopes, dtype=np.float64).reshape(-1)
        require(validate_finite_array(breakpoints) and validate_finite_array(slopes),
                "breakpoints and slopes must be finite", "breakpoints")
        require(bool(np.all(np.diff(breakpoints) > 0.0)),
                "breakpoints must be strictly increasing", "breakpoints")
        require(slopes.size == breakpoints.size + 1,
                f"need {breakpoints.size + 1} slopes for {breakpoints.size} breakpoints, got {slopes.size}",
                "slopes")
        object.__setattr__(self, "breakpoints", breakpoints)
        object.__setattr__(self, "slopes", slopes)
        # Value at every breakpoint, accumulated from the anchor
        if breakpoints.size:
            knot_values = self.anchor + np.concatenate(
                [[0.0], np.cumsum(slopes[1:-1] * np.diff(breakpoints))]
            )
        else:
            knot_values = np.array([])
        object.__setattr__(self, "_knot_values", knot_values)

    @property
    def lipschitz(self) -> float:
        return float(np.max(np.abs(self.slopes)))

    def segment(self, x):
        """Index of the segment containing x (breakpoints belong to the right segment)"""
        return np.searchsorted(self.breakpoints, x, side="right")

    def values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        if not self.breakpoints.size:
            return self.anchor + self.slopes[0] * xs
        k = self.segment(xs)
        # Measure from the left end of the segment; the first segment uses breakpoint 0
        left = np.maximum(k - 1, 0)
        return self._knot_values[left] + self.slopes[k] * (xs - self.breakpoints[left])

    def value(self, x: float) -> float:
        return float(self.values(np.float64(x)))

    def goldstein_interval(self, x: float, delta: float) -> Tuple[float, float]:
        """Exact delta-Goldstein subdifferential [lo, hi] at x"""
        lo_k = int(np.searchsorted(self.breakpoints, x - delta, side="left"))
        hi_k = int(np.searchsorted(self.breakpoints, x + delta, side="right"))
        active = self.slopes[lo_k:hi_k + 1]
        return float(active.min()), float(active.max())

    def min_norm_element(self, x: float, delta: float) -> float:
        lo, hi = self.goldstein_interval(x, delta)
        if lo <= 0.0 <= hi:
            return 0.0
        return lo if lo > 0.0 else hi

    def smoothed_gradient_exact(self, x: float, delta: float) -> float:
        """(1 / 2delta) * integral of the slope over [x - delta, x + delta]"""
        edges = np.concatenate([[x - delta], self.breakpoints, [x + delta]])
        edges = np.clip(edges, x - delta, x + delta)
        lengths = np.diff(edges)
        return float(np.dot(self.slopes, lengths) / (2.0 * delta))


def smoothed_reference_1d(pwl: PiecewiseLinear1D, x: float, delta: float) -> Tuple[float, float]:
    """(f_delta(x), grad f_delta(x)): adaptive quadrature for the value, exact slope integral for the gradient"""
    require_positive(delta, "delta")
    x = float(x)
    inside = [float(b) for b in pwl.breakpoints if x - delta < b < x + delta]
    value, _ = integrate.quad(
        lambda t: pwl.value(t), x - delta, x + delta,
        points=inside or None, epsabs=QUADRATURE_TOLERANCE, limit=200,
    )
    return value / (2.0 * delta), pwl.smoothed_gradient_exact(x, delta)


def make_pwl_1d(breakpoints: Sequence[float], slopes: Sequence[float], anchor: float = 0.0,
                value_gap: float = 1.0, initial_point: float = 0.0, name: str = "pwl") -> ProblemSpec:
    pwl = PiecewiseLinear1D(breakpoints, slopes, anchor)

    def reference(x, delta):
        value, grad = smoothed_reference_1d(pwl, float(np.asarray(x).reshape(-1)[0]), delta)
        return value, np.array([grad])

    def goldstein(x, delta):
        return pwl.goldstein_interval(float(np.asarray(x).reshape(-1)[0]), delta)

    return ProblemSpec(
        meta=ProblemMeta(dim=1, lipschitz=max(pwl.lipschitz, np.finfo(float).tiny), value_gap=value_gap),
        value_oracle=lambda x: pwl.value(float(np.asarray(x).reshape(-1)[0])),
        name=name,
        batch_oracle=lambda points: pwl.values(np.asarray(points)[:, 0]),
        exact_gradient=lambda x: np.array([pwl.slopes[pwl.segment(float(np.asarray(x).reshape(-1)[0]))]]),
        goldstein_oracle=goldstein,
        smoothed_reference=reference,
        initial_point=np.array([initial_point], dtype=np.float64),
    )


# Named instances: (breakpoints, slopes, anchor)
PWL_LIBRARY: Dict[str, Tuple[Tuple[float, ...], Tuple[float, ...], float]] = {
    "abs": ((0.0,), (-1.0, 1.0), 0.0),
    "w-shape": ((-1.0, 0.0, 1.0), (-1.0, 1.0, -1.0, 1.0), 0.0),
    "asymmetric": ((0.3,), (-2.0, 0.5), 0.0),
    "staircase": ((-1.0, -0.2, 0.7), (0.5, -1.5, 2.0, -0.25), 1.0),
    "ramp": ((-0.5, 0.5), (0.0, 1.0, 0.0), 0.0),
}


def library_pwl(name: str) -> PiecewiseLinear1D:
    require(name in PWL_LIBRARY, f"unknown piecewise-linear instance {name!r}", "name")
    breakpoints, slopes, anchor = PWL_LIBRARY[name]
    return PiecewiseLinear1D(breakpoints, slopes, anchor)
