"""Runtime defaults for the toolkit"""

import os

from dotenv import load_dotenv

load_dotenv()


def _default_workers() -> int:
    raw = os.getenv("GFM_WORKERS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


class Config:
    # Lipschitz spot-checks sample pairs in [-R, R]^d
    SPOT_CHECK_BOX_RADIUS = 2.0
    SPOT_CHECK_PAIRS = 1000

    # Default c of the smoothed-gradient Lipschitz bound c*L*sqrt(d)/delta
    SMOOTHING_CONSTANT = 1.5

    # Abort a run once ||x^t|| exceeds this
    DIVERGENCE_BOUND = 1e6

    # Estimates per stationarity measurement at the output point
    REFERENCE_BATCH = 10_000

    # Desk-scale caps applied to theoretical schedules
    MAX_HORIZON = 1_000_000
    MAX_BATCH = 100_000

    # Sweeps refuse grids with more points than this
    MAX_GRID_POINTS = 10_000

    # ReLU network parameters live in [-2, 2]^p
    RELU_PARAMETER_BOX = 2.0
    RELU_SPOT_CHECK_PAIRS = 256

    CSV_FLOAT_FORMAT = "%.12f"

    WORKERS = _default_workers()

    LOG_LEVEL = "INFO"


config = Config()
