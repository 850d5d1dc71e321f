import numpy as np
import structlog

from ..config.settings import config
from ..models.problem import ProblemSpec
from ..models.reports import SpotCheckResult
from ..models.rng import RngLike, as_generator
from ..utils.validators import require_positive, require_positive_int

logger = structlog.get_logger(__name__)


def lipschitz_spot_check(
    problem: ProblemSpec,
    n_pairs: int,
    rng: RngLike,
    box_radius: float = config.SPOT_CHECK_BOX_RADIUS,
) -> SpotCheckResult:
    """Largest |f(x) - f(y)| / ||x - y|| over random pairs in [-R, R]^d.

    A ratio above the declared constant falsifies the metadata; it is reported
    in the result rather than raised.
    """
    require_positive_int(n_pairs, "n_pairs")
    require_positive(box_radius, "box_radius")
    generator = as_generator(rng)
    dim = problem.dim

    xs = generator.uniform(-box_radius, box_radius, size=(n_pairs, dim))
    ys = generator.uniform(-box_radius, box_radius, size=(n_pairs, dim))
    distances = np.linalg.norm(xs - ys, axis=1)
    keep = distances > 0.0

    gaps = np.abs(problem.values(xs) - problem.values(ys))
    ratios = gaps[keep] / distances[keep]
    max_ratio = float(ratios.max()) if ratios.size else 0.0

    result = SpotCheckResult(max_ratio=max_ratio, declared=problem.meta.lipschitz, n_pairs=n_pairs)
    if result.violated:
        logger.warning("Lipschitz declaration violated",
                       problem=problem.name,
                       max_ratio=max_ratio,
                       declared=problem.meta.lipschitz)
    else:
        logger.debug("Lipschitz spot-check passed",
                     problem=problem.name,
                     max_ratio=max_ratio)
    return result
