"""Feature-specific final-layer prior.

The final dense layer's weight means are set from how strongly each hidden
feature responds to a handful of exemplars per class: connections from a
feature to the classes that activate it get positive means, the rest
negative. Means are centered per feature so only relative activation
matters. This conditions the final-layer prior on the earlier weights.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch
from ..rng import SeededRng
from ..tensor_nn.network import penultimate_features
from ..tensor_nn.types import NetworkSpec, ParameterSet


def feature_prior_means(
    spec: NetworkSpec,
    partial_params: ParameterSet,
    exemplars,
) -> np.ndarray:
    """Per-feature, per-class weight means, shape (h, n_classes).

    `partial_params` must cover every parametric layer before the final
    dense one. For each hidden feature k, means[k, j] is the mean activation
    over class-j exemplars, centered so each row sums to zero.
    """
    final = spec.final_dense_index()
    if final in partial_params.layers:
        raise ShapeMismatch("partial_params must not include the final dense layer")
    per_class = exemplars.images_per_class
    if len(per_class) == 0:
        raise ShapeMismatch("exemplars hold no classes")
    class_means = []
    for j, images in enumerate(per_class):
        if images.shape[0] < 1:
            raise ShapeMismatch(f"class {j} has no exemplars")
        feats = penultimate_features(spec, partial_params, images)  # (n_j, h)
        class_means.append(feats.mean(axis=0))
    means = np.stack(class_means, axis=1)  # (h, n_classes)
    return means - means.mean(axis=1, keepdims=True)


def sample_final_layer(rng: SeededRng, means: np.ndarray, weight_std: float) -> np.ndarray:
    """Independent Gaussian final-layer weights around `means`, shape (h, n_classes)."""
    if weight_std <= 0:
        raise ValueError("weight_std must be > 0")
    gen = rng.generator()
    return gen.normal(means, weight_std)
