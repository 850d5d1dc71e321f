from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np


def _floats(values) -> List[float]:
    return [float(v) for v in np.asarray(values).reshape(-1)]


@dataclass(frozen=True, eq=False)
class GradientEstimate:
    direction: np.ndarray
    value_plus: float
    value_minus: float
    estimate: np.ndarray
    oracle_calls: int = 2

    def to_dict(self):
        return {
            'direction': _floats(self.direction),
            'value_plus': self.value_plus,
            'value_minus': self.value_minus,
            'estimate': _floats(self.estimate),
            'oracle_calls': self.oracle_calls,
        }


@dataclass(frozen=True, eq=False)
class GradientBatch:
    """Averaged two-point estimates of the smoothed gradient"""
    mean: np.ndarray
    std_error: np.ndarray
    n_samples: int
    oracle_calls: int
    squared_norm_mean: float
    squared_norm_std_error: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.mean))

    @property
    def norm_std_error(self) -> float:
        # Delta method on ||m||; at m = 0 fall back to the total standard error
        norm = self.norm
        if norm > 0.0:
            weights = self.mean / norm
            return float(np.sqrt(np.sum((weights * self.std_error) ** 2)))
        return float(np.sqrt(np.sum(self.std_error ** 2)))

    @property
    def squared_norm_unbiased(self) -> float:
        """||m||^2 minus the estimated noise contribution trace(Cov)/n"""
        return float(self.norm ** 2 - np.sum(self.std_error ** 2))


@dataclass(frozen=True, eq=False)
class TrajectoryPoint:
    t: int
    x: np.ndarray
    estimate_norm: float

    def to_dict(self):
        return {'t': self.t, 'x': _floats(self.x), 'estimate_norm': self.estimate_norm}


@dataclass(frozen=True, eq=False)
class RunReport:
    algorithm: str
    output_point: np.ndarray
    output_index: int
    oracle_calls: int
    final_value: float
    stationarity_estimate: Tuple[float, float]
    evaluation_oracle_calls: int = 0
    horizon: int = 0
    eta: float = 0.0
    trajectory: Optional[List[TrajectoryPoint]] = None

    def to_dict(self):
        return {
            'algorithm': self.algorithm,
            'output_point': _floats(self.output_point),
            'output_index': self.output_index,
            'oracle_calls': self.oracle_calls,
            'evaluation_oracle_calls': self.evaluation_oracle_calls,
            'final_value': self.final_value,
            'stationarity_estimate': list(self.stationarity_estimate),
            'horizon': self.horizon,
            'eta': self.eta,
            'trajectory': None if self.trajectory is None else [p.to_dict() for p in self.trajectory],
        }


@dataclass(frozen=True, eq=False)
class TwoPhaseReport:
    algorithm: str
    candidates: List[RunReport]
    phase2_norms: List[float]
    selected_index: int
    selected_point: np.ndarray
    total_oracle_calls: int
    phase2_oracle_calls: int
    evaluation_oracle_calls: int = 0

    @property
    def selected(self) -> RunReport:
        return self.candidates[self.selected_index]

    def to_dict(self):
        return {
            'algorithm': self.algorithm,
            'candidates': [c.to_dict() for c in self.candidates],
            'phase2_norms': [float(v) for v in self.phase2_norms],
            'selected_index': self.selected_index,
            'selected_point': _floats(self.selected_point),
            'total_oracle_calls': self.total_oracle_calls,
            'phase2_oracle_calls': self.phase2_oracle_calls,
            'evaluation_oracle_calls': self.evaluation_oracle_calls,
        }


@dataclass(frozen=True)
class SpotCheckResult:
    max_ratio: float
    declared: float
    n_pairs: int

    @property
    def violated(self) -> bool:
        return self.max_ratio > self.declared

    def to_dict(self):
        return {
            'max_ratio': self.max_ratio,
            'declared': self.declared,
            'n_pairs': self.n_pairs,
            'violated': self.violated,
        }


@dataclass(frozen=True)
class CheckReport:
    check_name: str
    statistic: float
    bound_or_target: float
    tolerance: float
    n_samples: int
    passed: bool
    relation: str = "<="
    gated: bool = True
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self):
        return {
            'check_name': self.check_name,
            'statistic': self.statistic,
            'bound_or_target': self.bound_or_target,
            'tolerance': self.tolerance,
            'n_samples': self.n_samples,
            'pass': self.passed,
            'relation': self.relation,
            'gated': self.gated,
            'details': self.details,
        }
