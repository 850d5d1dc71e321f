from .rng import RngStream, derive_stream, as_generator
from .problem import (
    ProblemMeta,
    ProblemSpec,
    StochasticProblemSpec,
    FiniteSampleSpace,
    GaussianNoiseSpace,
    as_vector,
)
from .params import SmoothingParams, RunConfig, TwoPhaseConfig, ScheduleInputs, DeskCaps
from .reports import (
    GradientEstimate,
    GradientBatch,
    TrajectoryPoint,
    RunReport,
    TwoPhaseReport,
    SpotCheckResult,
    CheckReport,
)

__all__ = [
    'RngStream', 'derive_stream', 'as_generator',
    'ProblemMeta', 'ProblemSpec', 'StochasticProblemSpec',
    'FiniteSampleSpace', 'GaussianNoiseSpace', 'as_vector',
    'SmoothingParams', 'RunConfig', 'TwoPhaseConfig', 'ScheduleInputs', 'DeskCaps',
    'GradientEstimate', 'GradientBatch', 'TrajectoryPoint', 'RunReport',
    'TwoPhaseReport', 'SpotCheckResult', 'CheckReport',
]
