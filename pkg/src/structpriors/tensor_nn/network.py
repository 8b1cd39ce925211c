"""Whole-network forward pass, reverse-mode gradients, and the
finite-difference oracle used to test them."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch
from . import ops
from .types import (
    CONV2D,
    DENSE,
    FLATTEN,
    MAXPOOL2X2,
    RELU,
    NetworkSpec,
    LayerParams,
    ParameterSet,
    validate_params,
)


def _check_batch(spec: NetworkSpec, batch: np.ndarray) -> np.ndarray:
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 4 or batch.shape[1:] != spec.input_shape:
        raise ShapeMismatch(
            f"batch shape {batch.shape}, expected (B, {', '.join(map(str, spec.input_shape))})"
        )
    if batch.shape[0] < 1:
        raise ShapeMismatch("batch is empty")
    return batch


def _run_layers(
    spec: NetworkSpec,
    params: ParameterSet,
    batch: np.ndarray,
    *,
    start_at: int = 0,
    stop_before: int | None = None,
    keep_caches: bool = False,
    check_finite: bool = True,
):
    """Run layers [start_at, stop_before) and return (output, caches).

    Caches hold whatever each layer's backward pass needs: the layer input,
    plus im2col columns for conv and argmax indices for pooling. The
    inference-only path (keep_caches=False) pools via pairwise maxima,
    which is bitwise identical to the argmax path's values.
    """
    x = batch
    caches: list[tuple] = [() for _ in range(start_at)]
    end = len(spec.layers) if stop_before is None else stop_before
    for i in range(start_at, end):
        layer = spec.layers[i]
        if layer.kind == CONV2D:
            p = params.layers[i]
            y, cols = ops.conv2d_forward(x, p.weights, p.biases, layer.padding)
            if check_finite:
                ops.check_finite(y, f"layer {i} (conv2d) output")
            caches.append((x.shape, cols) if keep_caches else ())
            x = y
        elif layer.kind == MAXPOOL2X2:
            if keep_caches:
                y, arg = ops.maxpool2x2_forward(x)
                caches.append((x.shape, arg))
            else:
                y = ops.maxpool2x2_values(x)
                caches.append(())
            x = y
        elif layer.kind == RELU:
            y = ops.relu_forward(x)
            caches.append((x,) if keep_caches else ())
            x = y
        elif layer.kind == FLATTEN:
            caches.append((x.shape,) if keep_caches else ())
            x = x.reshape(x.shape[0], -1)
        elif layer.kind == DENSE:
            p = params.layers[i]
            if x.shape[1] != p.weights.shape[0]:
                raise ShapeMismatch(
                    f"layer {i}: dense input width {x.shape[1]} != weight rows {p.weights.shape[0]}"
                )
            y = ops.dense_forward(x, p.weights, p.biases)
            if check_finite:
                ops.check_finite(y, f"layer {i} (dense) output")
            caches.append((x,) if keep_caches else ())
            x = y
        else:  # pragma: no cover - blocked by infer_shapes
            raise ShapeMismatch(f"layer {i}: unknown kind {layer.kind!r}")
    return x, caches


def forward(spec: NetworkSpec, params: ParameterSet, batch: np.ndarray) -> np.ndarray:
    """Pre-softmax logits, shape (B, n_outputs). Deterministic and pure."""
    batch = _check_batch(spec, batch)
    validate_params(spec, params)
    logits, _ = _run_layers(spec, params, batch)
    return logits


def forward_from(
    spec: NetworkSpec, params: ParameterSet, activation: np.ndarray, start_at: int
) -> np.ndarray:
    """Continue the forward pass from the input of layer `start_at`."""
    logits, _ = _run_layers(spec, params, activation, start_at=start_at)
    return logits


def penultimate_features(spec: NetworkSpec, params: ParameterSet, batch: np.ndarray) -> np.ndarray:
    """Activations entering the final dense layer, shape (B, h).

    Only parameters for layers before the final dense layer are required.
    """
    batch = _check_batch(spec, batch)
    validate_params(spec, params, require_all=False)
    final = spec.final_dense_index()
    for i in range(final):
        if spec.layers[i].kind in (CONV2D, DENSE) and i not in params.layers:
            raise ShapeMismatch(f"layer {i}: parameters missing")
    feats, _ = _run_layers(spec, params, batch, stop_before=final)
    return feats


def loss_and_grad(
    spec: NetworkSpec, params: ParameterSet, batch: np.ndarray, labels: np.ndarray
):
    """Mean cross-entropy loss and gradients shaped exactly like `params`."""
    batch = _check_batch(spec, batch)
    validate_params(spec, params)
    logits, caches = _run_layers(spec, params, batch, keep_caches=True)
    loss, d = ops.cross_entropy(logits, labels)

    grads = ParameterSet()
    for i in range(len(spec.layers) - 1, -1, -1):
        layer = spec.layers[i]
        if layer.kind == DENSE:
            (x,) = caches[i]
            d, dw, db = ops.dense_backward(d, x, params.layers[i].weights)
            grads.layers[i] = LayerParams(dw, db)
        elif layer.kind == FLATTEN:
            (x_shape,) = caches[i]
            d = d.reshape(x_shape)
        elif layer.kind == RELU:
            (x,) = caches[i]
            d = ops.relu_backward(d, x)
        elif layer.kind == MAXPOOL2X2:
            x_shape, arg = caches[i]
            d = ops.maxpool2x2_backward(d, arg, x_shape)
        elif layer.kind == CONV2D:
            x_shape, cols = caches[i]
            d, dw, db = ops.conv2d_backward(d, cols, x_shape, params.layers[i].weights, layer.padding)
            grads.layers[i] = LayerParams(dw, db)
    return loss, grads


def loss_only(spec: NetworkSpec, params: ParameterSet, batch: np.ndarray, labels: np.ndarray) -> float:
    batch = _check_batch(spec, batch)
    logits, _ = _run_layers(spec, params, batch)
    loss, _ = ops.cross_entropy(logits, labels)
    return loss


def central_difference(f, x: float, h: float) -> float:
    """(f(x+h) - f(x-h)) / (2h)."""
    return (f(x + h) - f(x - h)) / (2.0 * h)


def numeric_grad(
    spec: NetworkSpec,
    params: ParameterSet,
    batch: np.ndarray,
    labels: np.ndarray,
    h: float = 1e-4,
) -> ParameterSet:
    """Central finite differences of the loss per scalar parameter.

    The test oracle for `loss_and_grad`; O(#parameters) loss evaluations,
    intended for toy networks only.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    work = params.copy()
    grads = ParameterSet.zeros_like(params)
    for idx, name, arr in work.arrays():
        target = getattr(grads.layers[idx], name)
        flat = arr.reshape(-1)
        out = target.reshape(-1)
        for j in range(flat.size):
            orig = flat[j]

            def loss_at(v: float, _j=j, _flat=flat) -> float:
                _flat[_j] = v
                return loss_only(spec, work, batch, labels)

            out[j] = central_difference(loss_at, orig, h)
            flat[j] = orig
    return grads
