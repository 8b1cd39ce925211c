"""Numeric kernels: convolution (im2col), pooling, dense, relu, softmax.

Everything is float64 and deterministic. Reduction orders are fixed, and
batch-dependent matrix products route through `row_stable_matmul`, which
always issues BLAS calls of exactly ROW_BLOCK rows (zero-padding the tail).
BLAS kernel selection -- and therefore last-ulp rounding -- depends on the
operand shapes, so pinning the shape makes each row's result independent of
how many other rows share the batch.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import LabelOutOfRange, NonFiniteValue, ShapeMismatch

ROW_BLOCK = 128


def row_stable_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """`a @ b` with bitwise row-stable results for any number of rows."""
    m, k = a.shape
    out = np.empty((m, b.shape[1]), dtype=np.float64)
    full = m - m % ROW_BLOCK
    for start in range(0, full, ROW_BLOCK):
        np.matmul(a[start : start + ROW_BLOCK], b, out=out[start : start + ROW_BLOCK])
    if m > full:
        padded = np.zeros((ROW_BLOCK, k), dtype=np.float64)
        padded[: m - full] = a[full:]
        out[full:] = (padded @ b)[: m - full]
    return out


def check_finite(arr: np.ndarray, what: str) -> None:
    if not np.isfinite(arr).all():
        raise NonFiniteValue(f"{what} contains NaN or Inf")


def _pad_same(x: np.ndarray, f: int) -> np.ndarray:
    p = (f - 1) // 2
    if p == 0:
        return x
    return np.pad(x, ((0, 0), (p, p), (p, p), (0, 0)))


def im2col(x: np.ndarray, f: int, padding: str) -> tuple[np.ndarray, int, int]:
    """Unfold (B, H, W, C) into patch rows of length C*f*f.

    Rows are ordered (batch, out_row, out_col); columns (channel, dy, dx),
    matching `conv_weight_matrix`.
    """
    if padding == "same":
        x = _pad_same(x, f)
    b, h, w, c = x.shape
    oh, ow = h - f + 1, w - f + 1
    if oh < 1 or ow < 1:
        raise ShapeMismatch(f"{f}x{f} filter does not fit {h}x{w} input")
    view = sliding_window_view(x, (f, f), axis=(1, 2))  # (b, oh, ow, c, f, f)
    return np.ascontiguousarray(view).reshape(b * oh * ow, c * f * f), oh, ow


def conv_weight_matrix(weights: np.ndarray) -> np.ndarray:
    """(out, in, f, f) filters as a (C*f*f, out) matmul operand."""
    return weights.reshape(weights.shape[0], -1).T


def conv2d_forward(x: np.ndarray, weights: np.ndarray, biases: np.ndarray, padding: str):
    """Cross-correlation, stride 1. Returns (y, cols) with cols cached for backward."""
    f = weights.shape[2]
    cols, oh, ow = im2col(x, f, padding)
    y = row_stable_matmul(cols, conv_weight_matrix(weights)) + biases
    return y.reshape(x.shape[0], oh, ow, weights.shape[0]), cols


def conv2d_backward(
    d_out: np.ndarray,
    cols: np.ndarray,
    x_shape: tuple[int, ...],
    weights: np.ndarray,
    padding: str,
):
    """Gradients of conv2d_forward. Returns (d_x, d_weights, d_biases)."""
    b, oh, ow, out_c = d_out.shape
    in_c, f = weights.shape[1], weights.shape[2]
    d_flat = d_out.reshape(b * oh * ow, out_c)

    d_weights = (cols.T @ d_flat).T.reshape(out_c, in_c, f, f)
    d_biases = d_flat.sum(axis=0)

    d_cols = row_stable_matmul(d_flat, conv_weight_matrix(weights).T)
    d_cols = d_cols.reshape(b, oh, ow, in_c, f, f)
    # One gather up front so each (dy, dx) slice below reads contiguously.
    d_cols = np.ascontiguousarray(d_cols.transpose(4, 5, 0, 1, 2, 3))

    h, w = x_shape[1], x_shape[2]
    p = (f - 1) // 2 if padding == "same" else 0
    d_xp = np.zeros((b, h + 2 * p, w + 2 * p, in_c), dtype=d_out.dtype)
    for dy in range(f):
        for dx in range(f):
            d_xp[:, dy : dy + oh, dx : dx + ow, :] += d_cols[dy, dx]
    if p:
        return d_xp[:, p : p + h, p : p + w, :], d_weights, d_biases
    return d_xp, d_weights, d_biases


def maxpool2x2_values(x: np.ndarray) -> np.ndarray:
    """2x2/stride-2 max pooling values only (pairwise maxima, no argmax)."""
    h2, w2 = x.shape[1] // 2, x.shape[2] // 2
    rows = np.maximum(x[:, 0 : h2 * 2 : 2, :, :], x[:, 1 : h2 * 2 : 2, :, :])
    return np.maximum(rows[:, :, 0 : w2 * 2 : 2, :], rows[:, :, 1 : w2 * 2 : 2, :])


def maxpool2x2_forward(x: np.ndarray):
    """2x2 max pooling, stride 2; odd trailing rows/columns are dropped.

    Returns (y, argmax) where argmax holds each window's flat winner index
    in (dy, dx) row-major order, ties going to the first maximum. Values
    are bitwise identical to `maxpool2x2_values`.
    """
    b, h, w, c = x.shape
    h2, w2 = h // 2, w // 2
    windows = (
        x[:, : h2 * 2, : w2 * 2, :]
        .reshape(b, h2, 2, w2, 2, c)
        .transpose(0, 1, 3, 5, 2, 4)
        .reshape(b, h2, w2, c, 4)
    )
    arg = windows.argmax(axis=-1)
    y = np.take_along_axis(windows, arg[..., None], axis=-1)[..., 0]
    return y, arg


def maxpool2x2_backward(d_out: np.ndarray, arg: np.ndarray, x_shape: tuple[int, ...]) -> np.ndarray:
    b, h, w, c = x_shape
    h2, w2 = h // 2, w // 2
    d_win = np.zeros((b, h2, w2, c, 4), dtype=d_out.dtype)
    np.put_along_axis(d_win, arg[..., None], d_out[..., None], axis=-1)
    d_x = np.zeros(x_shape, dtype=d_out.dtype)
    d_x[:, : h2 * 2, : w2 * 2, :] = (
        d_win.reshape(b, h2, w2, c, 2, 2).transpose(0, 1, 4, 2, 5, 3).reshape(b, h2 * 2, w2 * 2, c)
    )
    return d_x


def relu_forward(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(d_out: np.ndarray, x: np.ndarray) -> np.ndarray:
    # Subgradient 0 at exactly 0.
    return d_out * (x > 0.0)


def dense_forward(x: np.ndarray, weights: np.ndarray, biases: np.ndarray) -> np.ndarray:
    return row_stable_matmul(x, weights) + biases


def dense_backward(d_out: np.ndarray, x: np.ndarray, weights: np.ndarray):
    d_weights = x.T @ d_out
    d_biases = d_out.sum(axis=0)
    d_x = row_stable_matmul(d_out, weights.T)
    return d_x, d_weights, d_biases


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max subtraction; rows sum to 1 within 1e-12."""
    logits = np.asarray(logits, dtype=np.float64)
    check_finite(logits, "softmax input")
    if logits.ndim == 1:
        logits = logits[None, :]
        squeeze = True
    else:
        squeeze = False
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    p = e / e.sum(axis=1, keepdims=True)
    return p[0] if squeeze else p


def cross_entropy(logits: np.ndarray, labels: np.ndarray):
    """Mean softmax cross-entropy and its logit gradient.

    Returns (loss, d_logits) with d_logits = (softmax - onehot) / batch.
    """
    b, n_classes = logits.shape
    labels = np.asarray(labels)
    if labels.shape != (b,):
        raise ShapeMismatch(f"labels shape {labels.shape}, expected ({b},)")
    if not np.issubdtype(labels.dtype, np.integer):
        raise LabelOutOfRange(f"labels must be integers, got dtype {labels.dtype}")
    if labels.min() < 0 or labels.max() >= n_classes:
        raise LabelOutOfRange(f"labels must lie in [0, {n_classes})")

    z = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1))
    log_p = z - log_norm[:, None]
    loss = -log_p[np.arange(b), labels].mean()

    d_logits = np.exp(log_p)
    d_logits[np.arange(b), labels] -= 1.0
    d_logits /= b
    return float(loss), d_logits
