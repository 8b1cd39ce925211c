"""Shared evaluation plumbing: chunked forwards, a first-layer im2col cache
for repeated prior draws over a fixed dataset, draw parallelism, stderr."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

from ..tensor_nn import ops
from ..tensor_nn.network import forward, forward_from
from ..tensor_nn.types import CONV2D, NetworkSpec, ParameterSet

T = TypeVar("T")

DEFAULT_BATCH_SIZE = 512
# Upper bound for cached first-layer patch matrices; beyond this the
# evaluation falls back to recomputing im2col every draw.
DEFAULT_CACHE_BYTES = 1_500_000_000


def map_indexed(fn: Callable[[int], T], n: int, threads: int = 1) -> list[T]:
    """Evaluate fn(0..n-1), optionally on a thread pool.

    Results are collected by index, so the output is independent of
    scheduling; each fn(i) must draw randomness only from streams keyed by i.
    """
    if threads <= 1 or n <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


def _chunk_bounds(n: int, batch_size: int) -> list[tuple[int, int]]:
    return [(s, min(s + batch_size, n)) for s in range(0, n, batch_size)]


@dataclass
class FirstConvCache:
    """Precomputed im2col patches of a fixed image set for layer 0.

    Valid for any parameter draw of the same network spec; chunk boundaries
    match `batched_logits` so cached and uncached paths are bit-identical.
    """

    chunks: list[np.ndarray]  # im2col patch rows per chunk
    bounds: list[tuple[int, int]]
    out_hw: tuple[int, int]
    batch_size: int


def make_forward_cache(
    spec: NetworkSpec,
    images: np.ndarray,
    batch_size: int = DEFAULT_BATCH_SIZE,
    max_bytes: int = DEFAULT_CACHE_BYTES,
) -> FirstConvCache | None:
    """Cache layer-0 patches if layer 0 is conv and the cache fits the budget."""
    layer = spec.layers[0]
    if layer.kind != CONV2D:
        return None
    f = layer.filter_width
    h, w, c = spec.input_shape
    if layer.padding == "same":
        oh, ow = h, w
    else:
        oh, ow = h - f + 1, w - f + 1
    n = images.shape[0]
    if n * oh * ow * f * f * c * 8 > max_bytes:
        return None
    bounds = _chunk_bounds(n, batch_size)
    chunks = []
    for start, stop in bounds:
        cols, _, _ = ops.im2col(images[start:stop], f, layer.padding)
        chunks.append(cols)
    return FirstConvCache(chunks, bounds, (oh, ow), batch_size)


def batched_logits(
    spec: NetworkSpec,
    params: ParameterSet,
    images: np.ndarray,
    batch_size: int = DEFAULT_BATCH_SIZE,
    cache: FirstConvCache | None = None,
) -> np.ndarray:
    """Forward a large image array in fixed-size chunks; (N, n_outputs)."""
    n = images.shape[0]
    out = np.empty((n, spec.n_outputs), dtype=np.float64)
    if cache is None:
        for start, stop in _chunk_bounds(n, batch_size):
            out[start:stop] = forward(spec, params, images[start:stop])
        return out

    if cache.batch_size != batch_size:
        raise ValueError("cache was built with a different batch size")
    p0 = params.layers[0]
    wmat = ops.conv_weight_matrix(p0.weights)
    oh, ow = cache.out_hw
    for (start, stop), cols in zip(cache.bounds, cache.chunks):
        y = ops.row_stable_matmul(cols, wmat) + p0.biases
        y = y.reshape(stop - start, oh, ow, p0.weights.shape[0])
        ops.check_finite(y, "layer 0 (conv2d) output")
        out[start:stop] = forward_from(spec, params, y, start_at=1)
    return out


def standard_error(values: Sequence[float]) -> float:
    """Standard error of the mean (ddof=1); 0 for a single value."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        return 0.0
    return float(arr.std(ddof=1) / math.sqrt(arr.size))
