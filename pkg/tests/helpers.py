"""Test utilities: toy networks safe for finite-difference checking and a
hand-rolled Kolmogorov-Smirnov statistic."""

from __future__ import annotations

import math

import numpy as np

from structpriors import SeededRng
from structpriors.tensor_nn import (
    CONV2D,
    DENSE,
    MAXPOOL2X2,
    RELU,
    LayerParams,
    NetworkSpec,
    ParameterSet,
    conv2d,
    dense,
    expected_param_shapes,
    flatten,
    maxpool2x2,
    relu,
)
from structpriors.tensor_nn import ops

# Four toy layouts covering every layer kind, both paddings, stacked convs.
TOY_LAYOUTS = (
    NetworkSpec((6, 6, 1), (conv2d(2, 3, "valid"), relu(), maxpool2x2(), flatten(), dense(3)), 3),
    NetworkSpec((4, 4, 2), (conv2d(2, 3, "same"), relu(), maxpool2x2(), flatten(), dense(2)), 2),
    NetworkSpec((3, 3, 1), (flatten(), dense(5), relu(), dense(3)), 3),
    NetworkSpec(
        (4, 4, 1),
        (conv2d(1, 1, "valid"), relu(), conv2d(2, 3, "same"), relu(), maxpool2x2(), flatten(), dense(2)),
        2,
    ),
)


def _random_params(spec: NetworkSpec, gen: np.random.Generator) -> ParameterSet:
    params = ParameterSet()
    for i, (w_shape, b_shape) in expected_param_shapes(spec).items():
        params.layers[i] = LayerParams(
            gen.uniform(-0.7, 0.7, size=w_shape), gen.uniform(-0.3, 0.3, size=b_shape)
        )
    return params


def _min_margins(spec: NetworkSpec, params: ParameterSet, batch: np.ndarray) -> float:
    """Smallest distance to a ReLU kink or pooling argmax switch.

    Finite differences are only a valid oracle when no nonlinearity changes
    branch within the perturbation; networks are resampled until this margin
    is comfortable.
    """
    margin = math.inf
    x = batch
    for i, layer in enumerate(spec.layers):
        if layer.kind == CONV2D:
            p = params.layers[i]
            x, _ = ops.conv2d_forward(x, p.weights, p.biases, layer.padding)
        elif layer.kind == RELU:
            margin = min(margin, float(np.abs(x).min()))
            x = ops.relu_forward(x)
        elif layer.kind == MAXPOOL2X2:
            b, h, w, c = x.shape
            h2, w2 = h // 2, w // 2
            win = (
                x[:, : h2 * 2, : w2 * 2, :]
                .reshape(b, h2, 2, w2, 2, c)
                .transpose(0, 1, 3, 5, 2, 4)
                .reshape(b, h2, w2, c, 4)
            )
            top2 = np.sort(win, axis=-1)[..., -2:]
            margin = min(margin, float((top2[..., 1] - top2[..., 0]).min()))
            x = ops.maxpool2x2_values(x)
        elif layer.kind == DENSE:
            p = params.layers[i]
            x = ops.dense_forward(x.reshape(x.shape[0], -1), p.weights, p.biases)
        else:  # flatten
            x = x.reshape(x.shape[0], -1)
    return margin


def make_toy_problem(seed: int, min_margin: float = 1e-3):
    """(spec, params, batch, labels) with all kinks at least min_margin away."""
    spec = TOY_LAYOUTS[seed % len(TOY_LAYOUTS)]
    for attempt in range(50):
        gen = SeededRng(seed, f"toy/attempt{attempt}").generator()
        params = _random_params(spec, gen)
        batch = gen.uniform(-0.5, 0.5, size=(3, *spec.input_shape))
        labels = gen.integers(0, spec.n_outputs, size=3)
        if _min_margins(spec, params, batch) >= min_margin:
            return spec, params, batch, labels
    raise AssertionError(f"no margin-safe toy problem found for seed {seed}")


def max_relative_error(analytic: ParameterSet, numeric: ParameterSet, floor: float = 1e-6) -> float:
    """Largest per-parameter relative error; `floor` absorbs the float64
    noise floor of finite differences near zero gradients."""
    worst = 0.0
    for (_, _, a), (_, _, b) in zip(analytic.arrays(), numeric.arrays()):
        denom = np.maximum.reduce([np.abs(a), np.abs(b), np.full_like(a, floor)])
        worst = max(worst, float((np.abs(a - b) / denom).max()))
    return worst


def ks_statistic_vs_normal(samples: np.ndarray, mean: float, std: float) -> float:
    """Two-sided KS statistic of samples against N(mean, std^2).

    Independent empirical-CDF implementation: sup over sorted samples of the
    distance between the empirical CDF steps and the normal CDF.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = x.size
    z = (x - mean) / (std * math.sqrt(2.0))
    cdf = 0.5 * (1.0 + np.array([math.erf(v) for v in z]))
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))
