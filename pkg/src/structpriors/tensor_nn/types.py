"""Architecture descriptions and parameter containers.

All numeric data lives in float64 numpy arrays (row-major). Image batches
are laid out (B, H, W, C); convolution weights (out_channels, in_channels,
f_w, f_w); dense weights (in_units, out_units).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from ..errors import ShapeMismatch

CONV2D = "conv2d"
MAXPOOL2X2 = "maxpool2x2"
RELU = "relu"
FLATTEN = "flatten"
DENSE = "dense"

PARAMETRIC_KINDS = (CONV2D, DENSE)


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    out_channels: int | None = None
    filter_width: int | None = None
    padding: str | None = None  # "valid" or "same", stride 1 only
    out_units: int | None = None


def conv2d(out_channels: int, filter_width: int, padding: str = "valid") -> LayerSpec:
    return LayerSpec(CONV2D, out_channels=out_channels, filter_width=filter_width, padding=padding)


def maxpool2x2() -> LayerSpec:
    return LayerSpec(MAXPOOL2X2)


def relu() -> LayerSpec:
    return LayerSpec(RELU)


def flatten() -> LayerSpec:
    return LayerSpec(FLATTEN)


def dense(out_units: int) -> LayerSpec:
    return LayerSpec(DENSE, out_units=out_units)


@dataclass(frozen=True)
class NetworkSpec:
    input_shape: tuple[int, int, int]  # (H, W, C)
    layers: tuple[LayerSpec, ...]
    n_outputs: int

    def final_dense_index(self) -> int:
        return len(self.layers) - 1


def infer_shapes(spec: NetworkSpec) -> list[tuple[int, ...]]:
    """Chain per-layer output shapes; raises ShapeMismatch naming the layer.

    Conv and pool shapes exclude the batch axis: (H, W, C) for spatial
    layers, (features,) after flatten/dense.
    """
    if len(spec.input_shape) != 3 or any(d < 1 for d in spec.input_shape):
        raise ShapeMismatch(f"input_shape must be (H, W, C) of positive ints, got {spec.input_shape}")
    if not spec.layers:
        raise ShapeMismatch("network has no layers")
    last = spec.layers[-1]
    if last.kind != DENSE or last.out_units != spec.n_outputs:
        raise ShapeMismatch(
            f"final layer must be dense({spec.n_outputs}), got {last.kind}({last.out_units})"
        )

    shape: tuple[int, ...] = spec.input_shape
    out: list[tuple[int, ...]] = []
    for i, layer in enumerate(spec.layers):
        if layer.kind == CONV2D:
            if len(shape) != 3:
                raise ShapeMismatch(f"layer {i}: conv2d needs a (H, W, C) input, got {shape}")
            f = layer.filter_width
            if f is None or f < 1 or f % 2 == 0:
                raise ShapeMismatch(f"layer {i}: conv2d filter_width must be odd and >= 1, got {f}")
            if layer.out_channels is None or layer.out_channels < 1:
                raise ShapeMismatch(f"layer {i}: conv2d out_channels must be positive")
            h, w, _ = shape
            if layer.padding == "valid":
                if h < f or w < f:
                    raise ShapeMismatch(f"layer {i}: {f}x{f} valid conv does not fit {h}x{w} input")
                shape = (h - f + 1, w - f + 1, layer.out_channels)
            elif layer.padding == "same":
                shape = (h, w, layer.out_channels)
            else:
                raise ShapeMismatch(f"layer {i}: unknown padding {layer.padding!r}")
        elif layer.kind == MAXPOOL2X2:
            if len(shape) != 3:
                raise ShapeMismatch(f"layer {i}: maxpool2x2 needs a (H, W, C) input, got {shape}")
            h, w, c = shape
            if h < 2 or w < 2:
                raise ShapeMismatch(f"layer {i}: maxpool2x2 needs H, W >= 2, got {h}x{w}")
            # Odd trailing rows/columns are dropped (stride-2 windows only).
            shape = (h // 2, w // 2, c)
        elif layer.kind == RELU:
            pass
        elif layer.kind == FLATTEN:
            shape = (int(np.prod(shape)),)
        elif layer.kind == DENSE:
            if len(shape) != 1:
                raise ShapeMismatch(f"layer {i}: dense needs a flat input, got {shape} (insert flatten)")
            if layer.out_units is None or layer.out_units < 1:
                raise ShapeMismatch(f"layer {i}: dense out_units must be positive")
            shape = (layer.out_units,)
        else:
            raise ShapeMismatch(f"layer {i}: unknown layer kind {layer.kind!r}")
        out.append(shape)
    return out


def layer_input_shapes(spec: NetworkSpec) -> list[tuple[int, ...]]:
    """Input shape seen by each layer (input_shape followed by outputs)."""
    outs = infer_shapes(spec)
    return [spec.input_shape] + outs[:-1]


def fan_in(spec: NetworkSpec, index: int) -> int:
    """Number of inputs feeding one unit of a parametric layer."""
    layer = spec.layers[index]
    in_shape = layer_input_shapes(spec)[index]
    if layer.kind == CONV2D:
        return in_shape[2] * layer.filter_width * layer.filter_width
    if layer.kind == DENSE:
        return in_shape[0]
    raise ShapeMismatch(f"layer {index} ({layer.kind}) has no parameters")


@dataclass
class LayerParams:
    weights: np.ndarray
    biases: np.ndarray

    def copy(self) -> "LayerParams":
        return LayerParams(self.weights.copy(), self.biases.copy())


@dataclass
class ParameterSet:
    """Weights and biases keyed by layer index into a NetworkSpec."""

    layers: dict[int, LayerParams] = field(default_factory=dict)

    def copy(self) -> "ParameterSet":
        return ParameterSet({i: p.copy() for i, p in self.layers.items()})

    def indices(self) -> list[int]:
        return sorted(self.layers)

    def arrays(self) -> Iterator[tuple[int, str, np.ndarray]]:
        """All parameter arrays in a fixed (layer, weights-then-biases) order."""
        for i in self.indices():
            yield i, "weights", self.layers[i].weights
            yield i, "biases", self.layers[i].biases

    def n_parameters(self) -> int:
        return sum(a.size for _, _, a in self.arrays())

    @classmethod
    def zeros_like(cls, other: "ParameterSet") -> "ParameterSet":
        return cls(
            {
                i: LayerParams(np.zeros_like(p.weights), np.zeros_like(p.biases))
                for i, p in other.layers.items()
            }
        )


def expected_param_shapes(spec: NetworkSpec) -> dict[int, tuple[tuple[int, ...], tuple[int, ...]]]:
    """(weights, biases) shapes for each parametric layer of `spec`."""
    in_shapes = layer_input_shapes(spec)
    shapes: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {}
    for i, layer in enumerate(spec.layers):
        if layer.kind == CONV2D:
            c_in = in_shapes[i][2]
            shapes[i] = (
                (layer.out_channels, c_in, layer.filter_width, layer.filter_width),
                (layer.out_channels,),
            )
        elif layer.kind == DENSE:
            shapes[i] = ((in_shapes[i][0], layer.out_units), (layer.out_units,))
    return shapes


def validate_params(spec: NetworkSpec, params: ParameterSet, *, require_all: bool = True) -> None:
    """Check that `params` carries exactly the shapes `spec` demands."""
    expected = expected_param_shapes(spec)
    for i, (w_shape, b_shape) in expected.items():
        if i not in params.layers:
            if require_all:
                raise ShapeMismatch(f"layer {i}: parameters missing")
            continue
        p = params.layers[i]
        if p.weights.shape != w_shape:
            raise ShapeMismatch(f"layer {i}: weights shape {p.weights.shape}, expected {w_shape}")
        if p.biases.shape != b_shape:
            raise ShapeMismatch(f"layer {i}: biases shape {p.biases.shape}, expected {b_shape}")
    for i in params.layers:
        if i not in expected:
            raise ShapeMismatch(f"layer {i} is not parametric but has parameters")
