"""Bias-corrected Adam updates over ParameterSets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeMismatch
from .types import LayerParams, ParameterSet


@dataclass
class AdamState:
    m: ParameterSet  # first moments, shapes mirror the parameters
    v: ParameterSet  # second moments
    t: int = 0


def init_adam_state(params: ParameterSet) -> AdamState:
    return AdamState(ParameterSet.zeros_like(params), ParameterSet.zeros_like(params), 0)


def adam_step(
    params: ParameterSet,
    grads: ParameterSet,
    state: AdamState,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[ParameterSet, AdamState]:
    """One Adam update; returns fresh (params, state), inputs untouched."""
    if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
        raise ValueError("beta1 and beta2 must lie in [0, 1)")
    if sorted(params.layers) != sorted(grads.layers):
        raise ShapeMismatch("grads cover different layers than params")

    t = state.t + 1
    bc1 = 1.0 - beta1**t
    bc2 = 1.0 - beta2**t

    new_params = ParameterSet()
    new_m = ParameterSet()
    new_v = ParameterSet()
    for i in params.indices():
        updated: dict[str, np.ndarray] = {}
        ms: dict[str, np.ndarray] = {}
        vs: dict[str, np.ndarray] = {}
        for name in ("weights", "biases"):
            theta = getattr(params.layers[i], name)
            g = getattr(grads.layers[i], name)
            if g.shape != theta.shape:
                raise ShapeMismatch(f"layer {i} {name}: grad shape {g.shape} != {theta.shape}")
            m = beta1 * getattr(state.m.layers[i], name) + (1.0 - beta1) * g
            v = beta2 * getattr(state.v.layers[i], name) + (1.0 - beta2) * g * g
            updated[name] = theta - lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
            ms[name] = m
            vs[name] = v
        new_params.layers[i] = LayerParams(updated["weights"], updated["biases"])
        new_m.layers[i] = LayerParams(ms["weights"], ms["biases"])
        new_v.layers[i] = LayerParams(vs["weights"], vs["biases"])
    return new_params, AdamState(new_m, new_v, t)
