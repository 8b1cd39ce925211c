"""Baseline i.i.d. layer sampling and whole-layer moment matching."""

from __future__ import annotations

import math

import numpy as np

from ..errors import DegenerateLayer
from ..rng import SeededRng


def sample_iid_layer(rng: SeededRng, shape: tuple[int, ...], n_in: int) -> np.ndarray:
    """i.i.d. Gaussian weights with mean 0 and variance 2/n_in."""
    if n_in < 1:
        raise ValueError("n_in must be >= 1")
    gen = rng.generator()
    return gen.normal(0.0, math.sqrt(2.0 / n_in), size=shape)


def standardize_layer(weights: np.ndarray, n_in: int) -> np.ndarray:
    """Affinely rescale a whole layer to mean 0 and variance 2/n_in.

    Variance is the plain population variance over every entry of the layer
    (all filters and channels jointly). The map is affine with positive
    scale, so the ordering of entries is preserved.
    """
    if n_in < 1:
        raise ValueError("n_in must be >= 1")
    weights = np.asarray(weights, dtype=np.float64)
    centered = weights - weights.mean()
    var = centered.var()
    if var == 0.0:
        raise DegenerateLayer("layer weights are constant; cannot match variance")
    out = centered * math.sqrt((2.0 / n_in) / var)
    # Re-center once more: for near-constant layers the rescale factor
    # amplifies the centering residual far past the 1e-12 contract.
    return out - out.mean()
