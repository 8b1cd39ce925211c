"""Procedural oriented-glyph dataset.

Ten classes of stroke glyphs (bars, diagonals, crosses, rings) rendered at
random positions, rotations, thicknesses, and intensities with additive
pixel noise. Serves as a stand-in image-classification task for desk-scale
runs and tests when the real MNIST-family files are not on disk: classes
are separable by shape and carry strong oriented-edge structure.
"""

from __future__ import annotations

import math

import numpy as np

from ..rng import SeededRng
from .types import Dataset

N_CLASSES = 10

# Glyph strokes in a coordinate frame centered on the canvas, units pixels.
# ("seg", (x0, y0), (x1, y1)) or ("ring", (cx, cy), radius). Total stroke
# length is kept near 30 px for every class so that overall "ink" does not
# separate classes on its own.
_GLYPHS: dict[int, list[tuple]] = {
    0: [("ring", (0.0, 0.0), 5.0)],
    1: [("seg", (-4.0, -7.5), (-4.0, 7.5)), ("seg", (4.0, -7.5), (4.0, 7.5))],
    2: [("seg", (-7.5, -4.0), (7.5, -4.0)), ("seg", (-7.5, 4.0), (7.5, 4.0))],
    3: [("seg", (-7.0, 7.0), (7.0, -7.0)), ("seg", (1.5, 1.5), (5.5, 5.5))],
    4: [("seg", (-7.0, -7.0), (7.0, 7.0)), ("seg", (1.5, -1.5), (5.5, -5.5))],
    5: [("seg", (0.0, -7.5), (0.0, 7.5)), ("seg", (-7.5, 0.0), (7.5, 0.0))],
    6: [("seg", (-5.5, -5.5), (5.5, 5.5)), ("seg", (-5.5, 5.5), (5.5, -5.5))],
    7: [("seg", (-7.0, -7.0), (7.0, -7.0)), ("seg", (0.0, -7.0), (0.0, 8.0))],
    8: [("seg", (-5.0, -8.0), (-5.0, 2.0)), ("seg", (-5.0, 2.0), (5.0, 2.0)), ("seg", (5.0, 2.0), (5.0, -8.0))],
    9: [("seg", (-6.5, -8.0), (-6.5, 7.0)), ("seg", (-6.5, 7.0), (8.0, 7.0))],
}


def _rotate(x: float, y: float, angle: float) -> tuple[float, float]:
    c, s = math.cos(angle), math.sin(angle)
    return c * x - s * y, s * x + c * y


def _segment_distance(px: np.ndarray, py: np.ndarray, a, b) -> np.ndarray:
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    norm2 = dx * dx + dy * dy
    if norm2 == 0.0:
        return np.hypot(px - ax, py - ay)
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / norm2, 0.0, 1.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _render(label: int, side: int, gen: np.random.Generator) -> np.ndarray:
    ys, xs = np.mgrid[0:side, 0:side].astype(np.float64)
    cx = side / 2.0 - 0.5 + gen.uniform(-3.0, 3.0)
    cy = side / 2.0 - 0.5 + gen.uniform(-3.0, 3.0)
    angle = gen.uniform(-0.18, 0.18)  # ~10 degree jitter
    thickness = gen.uniform(1.2, 2.2)
    intensity = gen.uniform(0.7, 1.0)

    canvas = np.zeros((side, side), dtype=np.float64)
    for stroke in _GLYPHS[label]:
        if stroke[0] == "seg":
            (x0, y0), (x1, y1) = stroke[1], stroke[2]
            x0, y0 = _rotate(x0, y0, angle)
            x1, y1 = _rotate(x1, y1, angle)
            d = _segment_distance(xs, ys, (cx + x0, cy + y0), (cx + x1, cy + y1))
        else:
            (ox, oy), radius = stroke[1], stroke[2]
            ox, oy = _rotate(ox, oy, angle)
            d = np.abs(np.hypot(xs - (cx + ox), ys - (cy + oy)) - radius)
        canvas = np.maximum(canvas, np.clip(thickness + 0.7 - d, 0.0, 1.0))
    return canvas * intensity


def make_synthetic(
    rng: SeededRng,
    n: int,
    side: int = 28,
    color: bool = False,
    noise_std: float = 0.0,
    split: str = "train",
) -> Dataset:
    """Generate n images with an exactly balanced, shuffled class mix."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = rng.generator()
    labels = (np.arange(n) % N_CLASSES).astype(np.int64)
    labels = labels[gen.permutation(n)]

    channels = 3 if color else 1
    images = np.empty((n, side, side, channels), dtype=np.float64)
    for i in range(n):
        glyph = _render(int(labels[i]), side, gen)
        if color:
            scales = gen.uniform(0.25, 1.0, size=3)
            img = glyph[:, :, None] * scales[None, None, :]
        else:
            img = glyph[:, :, None]
        if noise_std > 0:
            img = img + gen.normal(0.0, noise_std, size=img.shape)
        images[i] = np.clip(img, 0.0, 1.0)
    return Dataset(images, labels, N_CLASSES, split)
