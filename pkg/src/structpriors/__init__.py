"""Structured weight priors for small convolutional networks.

Samplers for i.i.d., Gabor-filter, and feature-specific weight priors, a
deterministic float64 tensor engine to evaluate them, binary dataset
parsers, and the four prior-quality experiments (predictive entropy,
activation correlations, CAPPA, training curves).
"""

from . import datasets, errors, evaluation, priors, tensor_nn
from .rng import SeededRng

__version__ = "0.1.0"

__all__ = ["datasets", "errors", "evaluation", "priors", "tensor_nn", "SeededRng", "__version__"]
