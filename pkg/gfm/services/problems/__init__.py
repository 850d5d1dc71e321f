from .finite_sum import FiniteSumProblem, make_additive_noise, make_finite_sum_affine
from .norms import make_constant, make_halfspace_distance, make_linear, make_norm, make_tight_mixture
from .piecewise import PWL_LIBRARY, PiecewiseLinear1D, library_pwl, make_pwl_1d, smoothed_reference_1d
from .registry import PROBLEMS, as_deterministic, as_stochastic, build_problem
from .relu_net import make_relu_net

__all__ = [
    "FiniteSumProblem",
    "PWL_LIBRARY",
    "PROBLEMS",
    "PiecewiseLinear1D",
    "as_deterministic",
    "as_stochastic",
    "build_problem",
    "library_pwl",
    "make_additive_noise",
    "make_constant",
    "make_finite_sum_affine",
    "make_halfspace_distance",
    "make_linear",
    "make_norm",
    "make_pwl_1d",
    "make_relu_net",
    "make_tight_mixture",
    "smoothed_reference_1d",
]
