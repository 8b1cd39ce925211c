"""Builders for the two architecture families used throughout.

CNNs: 16 first-layer filters of width 5 (valid padding), a 2x2 maxpool after
every conv layer, and 16**l filters of width 3 (same padding) for deeper
layers l, capped by `width_cap` for desk-scale runs. Fully-connected nets:
1024 hidden units per layer. ReLU follows every conv and hidden dense layer;
the output layer is a bare dense layer.
"""

from __future__ import annotations

from .types import NetworkSpec, conv2d, dense, flatten, maxpool2x2, relu


def build_cnn(
    input_shape: tuple[int, int, int],
    depth: int,
    n_outputs: int,
    first_filters: int = 16,
    width_cap: int | None = None,
    first_width: int = 5,
    later_width: int = 3,
) -> NetworkSpec:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    layers = []
    for l in range(1, depth + 1):
        filters = first_filters**l
        if width_cap is not None:
            filters = min(filters, width_cap)
        if l == 1:
            layers.append(conv2d(filters, first_width, padding="valid"))
        else:
            layers.append(conv2d(filters, later_width, padding="same"))
        layers.append(relu())
        layers.append(maxpool2x2())
    layers.append(flatten())
    layers.append(dense(n_outputs))
    return NetworkSpec(input_shape, tuple(layers), n_outputs)


def build_fcnn(
    input_shape: tuple[int, int, int],
    depth: int,
    n_outputs: int,
    hidden_units: int = 1024,
) -> NetworkSpec:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    layers = [flatten()]
    for _ in range(depth):
        layers.append(dense(hidden_units))
        layers.append(relu())
    layers.append(dense(n_outputs))
    return NetworkSpec(input_shape, tuple(layers), n_outputs)
