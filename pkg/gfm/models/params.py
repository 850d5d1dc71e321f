"""Run and schedule parameters."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..config.settings import config
from ..utils.validators import require, require_open_unit, require_positive, require_positive_int
from .rng import RngStream


@dataclass(frozen=True)
class SmoothingParams:
    delta: float
    smoothing_constant: float = config.SMOOTHING_CONSTANT

    def __post_init__(self):
        require_positive(self.delta, "delta")
        require_positive(self.smoothing_constant, "smoothing_constant")

    def to_dict(self):
        return {"delta": self.delta, "smoothing_constant": self.smoothing_constant}


@dataclass(frozen=True, eq=False)
class RunConfig:
    eta: float
    horizon: int
    smoothing: SmoothingParams
    seed: RngStream
    record_trajectory: bool = False
    initial_point: Optional[np.ndarray] = None
    divergence_bound: float = config.DIVERGENCE_BOUND
    reference_batch: int = config.REFERENCE_BATCH
    trajectory_stride: int = 1

    def __post_init__(self):
        require_positive(self.eta, "eta")
        require_positive_int(self.horizon, "horizon")
        require_positive(self.divergence_bound, "divergence_bound")
        require(isinstance(self.reference_batch, (int, np.integer)) and self.reference_batch >= 0,
                f"reference_batch must be an integer >= 0, got {self.reference_batch!r}", "reference_batch")
        require_positive_int(self.trajectory_stride, "trajectory_stride")

    def to_dict(self):
        return {
            "eta": self.eta,
            "horizon": self.horizon,
            "smoothing": self.smoothing.to_dict(),
            "seed": self.seed.to_dict(),
            "record_trajectory": self.record_trajectory,
            "initial_point": None if self.initial_point is None else list(map(float, self.initial_point)),
            "divergence_bound": self.divergence_bound,
            "reference_batch": self.reference_batch,
            "trajectory_stride": self.trajectory_stride,
        }


@dataclass(frozen=True, eq=False)
class TwoPhaseConfig:
    base: RunConfig
    rounds: int
    batch: int
    confidence: float
    target: float

    def __post_init__(self):
        require_positive_int(self.rounds, "rounds")
        require_positive_int(self.batch, "batch")
        require_open_unit(self.confidence, "confidence")
        require_open_unit(self.target, "target")

    def to_dict(self):
        return {
            "base": self.base.to_dict(),
            "rounds": self.rounds,
            "batch": self.batch,
            "confidence": self.confidence,
            "target": self.target,
        }


@dataclass(frozen=True)
class ScheduleInputs:
    dim: int
    lipschitz: float
    value_gap: float
    delta: float
    target: float = 0.5
    confidence: float = 0.5
    smoothing_constant: float = config.SMOOTHING_CONSTANT

    def __post_init__(self):
        require_positive_int(self.dim, "dim")
        require_positive(self.lipschitz, "lipschitz")
        require_positive(self.value_gap, "value_gap")
        require_positive(self.delta, "delta")
        require_open_unit(self.target, "target")
        require_open_unit(self.confidence, "confidence")
        require_positive(self.smoothing_constant, "smoothing_constant")

    def to_dict(self):
        return {
            "dim": self.dim,
            "lipschitz": self.lipschitz,
            "value_gap": self.value_gap,
            "delta": self.delta,
            "target": self.target,
            "confidence": self.confidence,
            "smoothing_constant": self.smoothing_constant,
        }


@dataclass(frozen=True)
class DeskCaps:
    max_horizon: int = config.MAX_HORIZON
    max_batch: int = config.MAX_BATCH

    def __post_init__(self):
        require_positive_int(self.max_horizon, "max_horizon")
        require_positive_int(self.max_batch, "max_batch")
