"""Per-layer prior assignment and full network initialization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from ..errors import ConfigError, MissingExemplars
from ..rng import SeededRng
from ..tensor_nn.types import (
    CONV2D,
    DENSE,
    NetworkSpec,
    LayerParams,
    ParameterSet,
    expected_param_shapes,
    fan_in,
    layer_input_shapes,
)
from .feature import feature_prior_means, sample_final_layer
from .gabor import sample_gabor_bank
from .layers import sample_iid_layer, standardize_layer

# Default final-layer spread: the N(mu, 0.1 I) prior read as covariance 0.1,
# i.e. std sqrt(0.1). Pass weight_std=0.1 for the std reading instead.
DEFAULT_FEATURE_STD = math.sqrt(0.1)
DEFAULT_EXEMPLARS_PER_CLASS = 20


@dataclass(frozen=True)
class IID:
    """Independent N(0, 2/n_in) weights."""


@dataclass(frozen=True)
class Gabor:
    """Random Gabor filters for a first conv layer, moment-matched to i.i.d."""

    sigma_g: float = 0.0
    color: str = "grayscale"  # "grayscale" or "rgb"
    centered: bool = True  # centered filter coordinates (see eval_gabor)


@dataclass(frozen=True)
class FeatureSpecific:
    """Final dense layer conditioned on exemplar activations."""

    exemplars_per_class: int = DEFAULT_EXEMPLARS_PER_CLASS
    weight_std: float = DEFAULT_FEATURE_STD


Assignment = Union[IID, Gabor, FeatureSpecific]


@dataclass(frozen=True)
class PriorSpec:
    """Which prior initializes which layer; unlisted layers are i.i.d."""

    assignments: Mapping[int, Assignment] = field(default_factory=dict)

    def assignment(self, index: int) -> Assignment:
        return self.assignments.get(index, IID())


def first_conv_index(spec: NetworkSpec) -> int | None:
    for i, layer in enumerate(spec.layers):
        if layer.kind == CONV2D:
            return i
    return None


def validate_prior(spec: NetworkSpec, prior: PriorSpec) -> None:
    """Placement and range checks; raises ConfigError naming the problem."""
    in_shapes = layer_input_shapes(spec)
    first_conv = first_conv_index(spec)
    final = spec.final_dense_index()
    for idx, a in prior.assignments.items():
        if idx < 0 or idx >= len(spec.layers):
            raise ConfigError(f"prior assignment for nonexistent layer {idx}")
        kind = spec.layers[idx].kind
        if kind not in (CONV2D, DENSE):
            raise ConfigError(f"layer {idx} ({kind}) takes no prior assignment")
        if isinstance(a, Gabor):
            if idx != first_conv:
                raise ConfigError(f"Gabor prior only applies to the first conv layer, not layer {idx}")
            if a.sigma_g < 0:
                raise ConfigError("sigma_g must be >= 0")
            channels = in_shapes[idx][2]
            expected_color = "rgb" if channels == 3 else "grayscale"
            if a.color != expected_color:
                raise ConfigError(
                    f"Gabor color {a.color!r} does not match {channels}-channel input"
                )
        elif isinstance(a, FeatureSpecific):
            if idx != final:
                raise ConfigError(
                    f"FeatureSpecific prior only applies to the final dense layer, not layer {idx}"
                )
            if a.weight_std <= 0:
                raise ConfigError("weight_std must be > 0")
            if a.exemplars_per_class < 1:
                raise ConfigError("exemplars_per_class must be >= 1")
        elif not isinstance(a, IID):
            raise ConfigError(f"unknown prior assignment {a!r} for layer {idx}")


def init_network(
    rng: SeededRng,
    spec: NetworkSpec,
    prior: PriorSpec,
    exemplars=None,
) -> ParameterSet:
    """Sample a full ParameterSet, layers in topological order, biases zero.

    Gabor layers are sampled (parameters -> evaluate -> colorize -> noise)
    and then moment-matched to the i.i.d. prior over the whole layer. A
    feature-specific final layer is conditioned on the already-sampled
    earlier weights via the class exemplars.
    """
    validate_prior(spec, prior)
    shapes = expected_param_shapes(spec)
    params = ParameterSet()
    for idx in sorted(shapes):
        w_shape, b_shape = shapes[idx]
        layer_rng = rng.child(f"layer{idx:02d}")
        assignment = prior.assignment(idx)
        n_in = fan_in(spec, idx)
        if isinstance(assignment, Gabor):
            out_c, in_c, f_w, _ = w_shape
            bank = sample_gabor_bank(
                layer_rng, out_c, f_w, in_c, sigma_g=assignment.sigma_g, centered=assignment.centered
            )
            weights = standardize_layer(bank.raw_weights, n_in)
        elif isinstance(assignment, FeatureSpecific):
            if exemplars is None:
                raise MissingExemplars("FeatureSpecific prior requires class exemplars")
            means = feature_prior_means(spec, params, exemplars)
            if means.shape != w_shape:
                raise ConfigError(
                    f"exemplar classes ({means.shape[1]}) do not match network outputs ({w_shape[1]})"
                )
            weights = sample_final_layer(layer_rng, means, assignment.weight_std)
        else:
            weights = sample_iid_layer(layer_rng, w_shape, n_in)
        params.layers[idx] = LayerParams(weights, np.zeros(b_shape))
    return params


def make_prior_spec(
    spec: NetworkSpec,
    name: str,
    sigma_g: float = 0.0,
    exemplars_per_class: int = DEFAULT_EXEMPLARS_PER_CLASS,
    weight_std: float = DEFAULT_FEATURE_STD,
    centered: bool = True,
) -> PriorSpec:
    """Named prior layouts: "iid", "gabor", "feats", "gabor-feats"."""
    assignments: dict[int, Assignment] = {}
    if name not in ("iid", "gabor", "feats", "gabor-feats"):
        raise ConfigError(f"unknown prior name {name!r}")
    if name in ("gabor", "gabor-feats"):
        idx = first_conv_index(spec)
        if idx is None:
            raise ConfigError(f"prior {name!r} needs a conv layer")
        channels = layer_input_shapes(spec)[idx][2]
        color = "rgb" if channels == 3 else "grayscale"
        assignments[idx] = Gabor(sigma_g=sigma_g, color=color, centered=centered)
    if name in ("feats", "gabor-feats"):
        assignments[spec.final_dense_index()] = FeatureSpecific(
            exemplars_per_class=exemplars_per_class, weight_std=weight_std
        )
    return PriorSpec(assignments)
