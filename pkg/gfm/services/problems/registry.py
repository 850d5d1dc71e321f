"""Problem registry: string id + parameter map -> problem instance."""

from typing import Any, Callable, Dict, Mapping, Union

import structlog

from ...models.problem import ProblemSpec, StochasticProblemSpec
from ...models.rng import RngLike, as_generator
from ...utils.exceptions import ConfigError, ValidationError
from .finite_sum import FiniteSumProblem, make_additive_noise, make_finite_sum_affine
from .norms import make_constant, make_halfspace_distance, make_linear, make_norm, make_tight_mixture
from .piecewise import PWL_LIBRARY, make_pwl_1d
from .relu_net import make_relu_net

logger = structlog.get_logger(__name__)

Built = Union[ProblemSpec, StochasticProblemSpec, FiniteSumProblem]


def _pwl(params, rng):
    params = dict(params)
    instance = params.pop("instance", None)
    if instance is not None:
        if instance not in PWL_LIBRARY:
            raise ConfigError(f"unknown piecewise-linear instance {instance!r}; "
                              f"known: {', '.join(sorted(PWL_LIBRARY))}", key="problem.params.instance")
        breakpoints, slopes, anchor = PWL_LIBRARY[instance]
        params.setdefault("breakpoints", breakpoints)
        params.setdefault("slopes", slopes)
        params.setdefault("anchor", anchor)
        params.setdefault("name", f"pwl-{instance}")
    return make_pwl_1d(**params)


def _finite_sum_affine(params, rng):
    params = dict(params)
    if "A" not in params:
        if rng is None:
            raise ConfigError("random affine sums need a random stream", key="problem")
        n = int(params.pop("n", 32))
        dim = int(params.pop("dim", 2))
        generator = as_generator(rng)
        params["A"] = generator.standard_normal((n, dim))
        params["b"] = generator.standard_normal(n)
    return make_finite_sum_affine(**params)


def _additive_noise(params, rng):
    params = dict(params)
    scale = float(params.pop("scale", 1.0))
    base_id = params.pop("base", "norm")
    base_params = params.pop("base_params", {})
    base = build_problem(base_id, base_params, rng)
    if not isinstance(base, ProblemSpec):
        raise ConfigError(f"additive noise needs a deterministic base problem, got {base_id!r}",
                          key="problem.params.base")
    return make_additive_noise(base, scale)


def _relu(params, rng):
    params = dict(params)
    if rng is None:
        raise ConfigError("relu-net needs a random stream for its data", key="problem")
    return make_relu_net(rng=rng, **params)


PROBLEMS: Dict[str, Callable[[Mapping[str, Any], RngLike], Built]] = {
    "norm": lambda params, rng: make_norm(**params),
    "halfspace": lambda params, rng: make_halfspace_distance(**params),
    "tight-mixture": lambda params, rng: make_tight_mixture(**params),
    "linear": lambda params, rng: make_linear(**params),
    "constant": lambda params, rng: make_constant(**params),
    "pwl": _pwl,
    "finite-sum-affine": _finite_sum_affine,
    "additive-noise": _additive_noise,
    "relu-net": _relu,
}


def build_problem(problem_id: str, params: Mapping[str, Any] = None, rng: RngLike = None) -> Built:
    """Instantiate a library problem; bad ids or parameters raise ConfigError"""
    params = dict(params or {})
    factory = PROBLEMS.get(problem_id)
    if factory is None:
        raise ConfigError(f"unknown problem id {problem_id!r}; known: {', '.join(sorted(PROBLEMS))}",
                          key="problem.id")
    try:
        problem = factory(params, rng)
    except TypeError as e:
        raise ConfigError(f"bad parameters for problem {problem_id!r}: {e}", key="problem.params")
    except ValidationError as e:
        raise ConfigError(f"invalid parameters for problem {problem_id!r}: {e.message}",
                          key=f"problem.params.{e.field}" if e.field else "problem.params")
    logger.debug("Problem built", problem_id=problem_id, name=getattr(problem, "name", problem_id))
    return problem


def as_deterministic(problem: Built) -> ProblemSpec:
    """The GFM view of any registry product"""
    if isinstance(problem, FiniteSumProblem):
        return problem.as_problem()
    if isinstance(problem, StochasticProblemSpec):
        return problem.as_deterministic()
    return problem


def as_stochastic(problem: Built) -> StochasticProblemSpec:
    """The SGFM view; deterministic problems get zero additive noise"""
    if isinstance(problem, FiniteSumProblem):
        return problem.as_stochastic()
    if isinstance(problem, ProblemSpec):
        return make_additive_noise(problem, 0.0)
    return problem
