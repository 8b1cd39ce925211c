"""IDX binary format (MNIST / Fashion-MNIST containers).

Big-endian headers: images carry magic 0x00000803 then (count, rows, cols);
labels carry magic 0x00000801 then (count). Payloads are unsigned bytes.
Files are consumed uncompressed.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import BadMagic, CountMismatch, TruncatedFile
from .types import Dataset

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


def _read_header(data: bytes, n_fields: int, path) -> tuple[int, ...]:
    size = 4 * n_fields
    if len(data) < size:
        raise TruncatedFile(f"{path}: header needs {size} bytes, file has {len(data)}")
    return struct.unpack(f">{n_fields}I", data[:size])


def load_idx(images_path: str | Path, labels_path: str | Path, split: str = "train") -> Dataset:
    """Parse an IDX image/label file pair into a normalized Dataset."""
    images_path, labels_path = Path(images_path), Path(labels_path)
    img_bytes = images_path.read_bytes()
    magic, n, rows, cols = _read_header(img_bytes, 4, images_path)
    if magic != IMAGE_MAGIC:
        raise BadMagic(f"{images_path}: magic 0x{magic:08x}, expected 0x{IMAGE_MAGIC:08x}")
    expected = 16 + n * rows * cols
    if len(img_bytes) < expected:
        raise TruncatedFile(f"{images_path}: need {expected} bytes, file has {len(img_bytes)}")
    pixels = np.frombuffer(img_bytes, dtype=np.uint8, count=n * rows * cols, offset=16)

    lbl_bytes = labels_path.read_bytes()
    lmagic, ln = _read_header(lbl_bytes, 2, labels_path)
    if lmagic != LABEL_MAGIC:
        raise BadMagic(f"{labels_path}: magic 0x{lmagic:08x}, expected 0x{LABEL_MAGIC:08x}")
    if len(lbl_bytes) < 8 + ln:
        raise TruncatedFile(f"{labels_path}: need {8 + ln} bytes, file has {len(lbl_bytes)}")
    if ln != n:
        raise CountMismatch(f"{n} images but {ln} labels")
    labels = np.frombuffer(lbl_bytes, dtype=np.uint8, count=ln, offset=8).astype(np.int64)

    images = pixels.reshape(n, rows, cols, 1).astype(np.float64) / 255.0
    n_classes = int(labels.max()) + 1 if labels.size else 0
    return Dataset(images, labels, n_classes, split)


def save_idx(dataset: Dataset, images_path: str | Path, labels_path: str | Path) -> None:
    """Serialize a single-channel dataset back to an IDX file pair."""
    n, rows, cols, c = dataset.images.shape
    if c != 1:
        raise ValueError(f"IDX stores single-channel images, got {c} channels")
    pixels = np.rint(dataset.images * 255.0).astype(np.uint8)
    with open(images_path, "wb") as fh:
        fh.write(struct.pack(">4I", IMAGE_MAGIC, n, rows, cols))
        fh.write(pixels.tobytes())
    with open(labels_path, "wb") as fh:
        fh.write(struct.pack(">2I", LABEL_MAGIC, n))
        fh.write(dataset.labels.astype(np.uint8).tobytes())
