"""Minimal deterministic tensor engine: CNN/fc forward pass, reverse-mode
gradients, Adam, and a finite-difference gradient oracle."""

from .adam import AdamState, adam_step, init_adam_state
from .builders import build_cnn, build_fcnn
from .network import (
    central_difference,
    forward,
    loss_and_grad,
    loss_only,
    numeric_grad,
    penultimate_features,
)
from .ops import softmax
from .types import (
    CONV2D,
    DENSE,
    FLATTEN,
    MAXPOOL2X2,
    RELU,
    LayerParams,
    LayerSpec,
    NetworkSpec,
    ParameterSet,
    conv2d,
    dense,
    expected_param_shapes,
    fan_in,
    flatten,
    infer_shapes,
    layer_input_shapes,
    maxpool2x2,
    relu,
    validate_params,
)

__all__ = [
    "AdamState",
    "adam_step",
    "init_adam_state",
    "build_cnn",
    "build_fcnn",
    "central_difference",
    "forward",
    "loss_and_grad",
    "loss_only",
    "numeric_grad",
    "penultimate_features",
    "softmax",
    "CONV2D",
    "DENSE",
    "FLATTEN",
    "MAXPOOL2X2",
    "RELU",
    "LayerParams",
    "LayerSpec",
    "NetworkSpec",
    "ParameterSet",
    "conv2d",
    "dense",
    "expected_param_shapes",
    "fan_in",
    "flatten",
    "infer_shapes",
    "layer_input_shapes",
    "maxpool2x2",
    "relu",
    "validate_params",
]
