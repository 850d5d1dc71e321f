"""Toolkit constants and enums"""

import enum
import math


class Algorithm(str, enum.Enum):
    GFM = "gfm"
    SGFM = "sgfm"
    TWO_PHASE_GFM = "2gfm"
    TWO_PHASE_SGFM = "2sgfm"

    @property
    def is_stochastic(self) -> bool:
        return self in (Algorithm.SGFM, Algorithm.TWO_PHASE_SGFM)

    @property
    def is_two_phase(self) -> bool:
        return self in (Algorithm.TWO_PHASE_GFM, Algorithm.TWO_PHASE_SGFM)


class Mode(str, enum.Enum):
    DETERMINISTIC = "deterministic"
    STOCHASTIC = "stochastic"


# 16 * sqrt(2 pi): second-moment constant of the two-point estimator
SECOND_MOMENT_CONSTANT = 16.0 * math.sqrt(2.0 * math.pi)

# Sphere draws with a smaller norm are redrawn
SPHERE_MIN_NORM = 1e-12

# Directions are drawn in blocks of this many rows
DIRECTION_BLOCK_SIZE = 4096

# Absolute tolerance for quadrature references and Goldstein membership
QUADRATURE_TOLERANCE = 1e-10
MEMBERSHIP_TOLERANCE = 1e-8

# Floor on Monte-Carlo gates whose estimates can have zero spread (d = 1, constant f)
ROUNDING_TOLERANCE = 1e-10

# Multiplier on spot-checked Lipschitz ratios for the ReLU network
RELU_LIPSCHITZ_SAFETY = 2.0

SIGMA_GATE = 3.0

VERIFY_SUITES = ("moments", "smoothing", "goldstein", "descent", "two-phase")

RUN_CSV_COLUMNS = [
    "algorithm", "problem", "d", "delta", "eta", "T", "S", "B", "seed", "R",
    "oracle_calls", "final_value", "stationarity_mean", "stationarity_stderr",
    "wall_time_s",
]

# Exit codes
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_VERIFY = 3
