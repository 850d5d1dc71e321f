from .diagnostics_service import lipschitz_spot_check
from .optimizer_service import run_gfm, run_sgfm, run_two_phase
from .sampling_service import (
    estimator_fault,
    sample_unit_ball,
    sample_unit_sphere,
    smoothed_gradient,
    smoothed_value,
    two_point_estimate,
    two_point_estimate_stochastic,
)
from .schedule_service import cap_schedule, schedule_eta, schedule_rounds, schedule_two_phase

__all__ = [
    'lipschitz_spot_check',
    'run_gfm', 'run_sgfm', 'run_two_phase',
    'estimator_fault', 'sample_unit_ball', 'sample_unit_sphere',
    'smoothed_gradient', 'smoothed_value',
    'two_point_estimate', 'two_point_estimate_stochastic',
    'cap_schedule', 'schedule_eta', 'schedule_rounds', 'schedule_two_phase',
]
