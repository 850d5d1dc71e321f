"""Small fully-connected ReLU regression networks as finite-sum problems.

F(theta, i) = |net(theta, x_i) - y_i| with the parameters flattened layer by
layer as (W_1, b_1, W_2, b_2, ...), W_k of shape (out, in). Targets come from
a fixed planted network or are all zero.
"""

from typing import List, Sequence, Tuple

import numpy as np
import structlog

from ...config.settings import config
from ...models.rng import RngLike, as_generator
from ...utils.constants import RELU_LIPSCHITZ_SAFETY
from ...utils.validators import require, require_positive_int
from .finite_sum import FiniteSumProblem

logger = structlog.get_logger(__name__)

# Floor for Lipschitz bounds and the value gap of degenerate instances
_FLOOR = 1e-8

Shapes = List[Tuple[int, int]]


def _layer_shapes(layer_sizes: Sequence[int]) -> Shapes:
    return [(layer_sizes[k + 1], layer_sizes[k]) for k in range(len(layer_sizes) - 1)]


def parameter_count(layer_sizes: Sequence[int]) -> int:
    return sum(out * (inp + 1) for out, inp in _layer_shapes(layer_sizes))


def forward(params: np.ndarray, inputs: np.ndarray, shapes: Shapes) -> np.ndarray:
    """Predictions of m networks on n inputs.

    params: (m, p) flattened parameters; inputs: (n, d_in). Returns (m, n).
    """
    params = np.atleast_2d(params)
    m = params.shape[0]
    hidden = np.broadcast_to(inputs, (m,) + inputs.shape)
    offset = 0
    for k, (out, inp) in enumerate(shapes):
        weights = params[:, offset:offset + out * inp].reshape(m, out, inp)
        offset += out * inp
        bias = params[:, offset:offset + out]
        offset += out
        hidden = np.einsum("moi,mni->mno", weights, hidden) + bias[:, None, :]
        if k < len(shapes) - 1:
            hidden = np.maximum(hidden, 0.0)
    return hidden[:, :, 0]


def forward_paired(params: np.ndarray, inputs: np.ndarray, shapes: Shapes) -> np.ndarray:
    """Prediction of network params[k] on inputs[k]; returns (m,)"""
    m = params.shape[0]
    hidden = inputs
    offset = 0
    for k, (out, inp) in enumerate(shapes):
        weights = params[:, offset:offset + out * inp].reshape(m, out, inp)
        offset += out * inp
        hidden = np.einsum("moi,mi->mo", weights, hidden) + params[:, offset:offset + out]
        offset += out
        if k < len(shapes) - 1:
            hidden = np.maximum(hidden, 0.0)
    return hidden[:, 0]


def _spot_check_components(losses, p: int, n_pairs: int, box: float,
                           generator: np.random.Generator) -> np.ndarray:
    """Largest |F(a, i) - F(b, i)| / ||a - b|| per component over random pairs in the box"""
    xs = generator.uniform(-box, box, size=(n_pairs, p))
    ys = generator.uniform(-box, box, size=(n_pairs, p))
    distances = np.linalg.norm(xs - ys, axis=1)
    gaps = np.abs(losses(xs) - losses(ys))
    return (gaps / distances[:, None]).max(axis=0)


def make_relu_net(layer_sizes: Sequence[int], dataset_size: int, rng: RngLike,
                  targets: str = "planted", box: float = config.RELU_PARAMETER_BOX,
                  spot_check_pairs: int = config.RELU_SPOT_CHECK_PAIRS) -> FiniteSumProblem:
    """Synthetic regression problem on a ReLU network.

    The planted parameters are uniform in [-1, 1]^p, inside the parameter
    box, so the data are noiseless and inf f = 0. Per-component Lipschitz
    bounds are spot-checked ratios on the box times RELU_LIPSCHITZ_SAFETY;
    this is a heuristic, not a certified constant.
    """
    layer_sizes = [int(s) for s in layer_sizes]
    require(len(layer_sizes) >= 3, "need an input size, at least one hidden layer and an output size",
            "layer_sizes")
    require(all(s >= 1 for s in layer_sizes), "layer sizes must be >= 1", "layer_sizes")
    require(layer_sizes[-1] == 1, "the network must have a scalar output", "layer_sizes")
    require_positive_int(dataset_size, "dataset_size")
    require(targets in ("planted", "zero"), f"targets must be 'planted' or 'zero', got {targets!r}", "targets")

    generator = as_generator(rng)
    shapes = _layer_shapes(layer_sizes)
    p = parameter_count(layer_sizes)

    inputs = generator.standard_normal((dataset_size, layer_sizes[0]))
    planted = generator.uniform(-1.0, 1.0, size=p)
    if targets == "planted":
        labels = forward(planted, inputs, shapes)[0]
    else:
        labels = np.zeros(dataset_size)

    def all_components(points):
        return np.abs(forward(points, inputs, shapes) - labels)

    def component_batch(points, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return np.abs(forward_paired(points, inputs[indices], shapes) - labels[indices])

    ratios = _spot_check_components(all_components, p, spot_check_pairs, box, generator)
    bounds = np.maximum(RELU_LIPSCHITZ_SAFETY * ratios, _FLOOR)

    fan_in = np.concatenate([np.full(out * (inp + 1), inp) for out, inp in shapes])
    start = np.clip(generator.standard_normal(p) / np.sqrt(fan_in), -box, box)
    value_gap = max(float(all_components(start[None, :]).mean()), _FLOOR)

    components = [
        (lambda theta, i=i: float(component_batch(np.asarray(theta, dtype=np.float64)[None, :],
                                                  np.array([i]))[0]))
        for i in range(dataset_size)
    ]

    logger.info("ReLU network problem built",
                layer_sizes=layer_sizes,
                parameters=p,
                dataset_size=dataset_size,
                targets=targets,
                G=float(np.sqrt(np.mean(bounds ** 2))),
                value_gap=value_gap)

    return FiniteSumProblem(
        components=components,
        lipschitz_bounds=bounds,
        value_gap=value_gap,
        dim=p,
        name=f"relu-{'-'.join(map(str, layer_sizes))}-n{dataset_size}",
        component_batch=component_batch,
        all_components=all_components,
        initial_point=start,
        extras={
            "layer_sizes": layer_sizes,
            "planted_params": planted,
            "inputs": inputs,
            "targets": labels,
            "box": box,
        },
    )
