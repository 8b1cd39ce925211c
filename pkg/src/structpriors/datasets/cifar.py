"""CIFAR-10 binary batches.

Each record is 3073 bytes: one label byte (0..9) followed by 3072 pixel
bytes in channel-planar order (1024 red, 1024 green, 1024 blue), row-major
32x32 per plane. Files are consumed uncompressed.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..errors import LabelOutOfRange, TruncatedFile
from .types import Dataset

RECORD_SIZE = 3073
SIDE = 32
N_CLASSES = 10

# Published class ordering.
CLASS_NAMES = (
    "airplane",
    "automobile",
    "bird",
    "cat",
    "deer",
    "dog",
    "frog",
    "horse",
    "ship",
    "truck",
)


def load_cifar10(batch_paths: Sequence[str | Path] | Iterable[str | Path], split: str = "train") -> Dataset:
    """Parse one or more CIFAR-10 binary batch files into a Dataset."""
    all_images = []
    all_labels = []
    for path in batch_paths:
        path = Path(path)
        data = path.read_bytes()
        if len(data) == 0 or len(data) % RECORD_SIZE != 0:
            raise TruncatedFile(
                f"{path}: {len(data)} bytes is not a positive multiple of {RECORD_SIZE}"
            )
        records = np.frombuffer(data, dtype=np.uint8).reshape(-1, RECORD_SIZE)
        labels = records[:, 0].astype(np.int64)
        if labels.max() >= N_CLASSES:
            bad = int(labels.max())
            raise LabelOutOfRange(f"{path}: label byte {bad} outside [0, {N_CLASSES})")
        planes = records[:, 1:].reshape(-1, 3, SIDE, SIDE)
        all_images.append(planes.transpose(0, 2, 3, 1).astype(np.float64) / 255.0)
        all_labels.append(labels)
    images = np.concatenate(all_images, axis=0)
    labels = np.concatenate(all_labels, axis=0)
    return Dataset(images, labels, N_CLASSES, split)


def save_cifar10(dataset: Dataset, path: str | Path) -> None:
    """Serialize a 3-channel dataset to one CIFAR-10 binary batch file."""
    n, h, w, c = dataset.images.shape
    if (h, w, c) != (SIDE, SIDE, 3):
        raise ValueError(f"CIFAR-10 records are {SIDE}x{SIDE}x3, got {h}x{w}x{c}")
    pixels = np.rint(dataset.images * 255.0).astype(np.uint8).transpose(0, 3, 1, 2)
    records = np.empty((n, RECORD_SIZE), dtype=np.uint8)
    records[:, 0] = dataset.labels.astype(np.uint8)
    records[:, 1:] = pixels.reshape(n, -1)
    Path(path).write_bytes(records.tobytes())
