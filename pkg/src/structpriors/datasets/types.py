"""Dataset containers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import LabelOutOfRange, ShapeMismatch


@dataclass
class Dataset:
    """Images (N, H, W, C) in [0, 1] with integer labels in [0, n_classes)."""

    images: np.ndarray
    labels: np.ndarray
    n_classes: int
    split: str = "train"

    def __post_init__(self) -> None:
        if self.images.ndim != 4:
            raise ShapeMismatch(f"images must be (N, H, W, C), got shape {self.images.shape}")
        if self.labels.shape != (self.images.shape[0],):
            raise ShapeMismatch(
                f"{self.images.shape[0]} images but {self.labels.shape[0]} labels"
            )
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise LabelOutOfRange(f"labels must lie in [0, {self.n_classes})")

    def __len__(self) -> int:
        return self.images.shape[0]

    @property
    def image_shape(self) -> tuple[int, int, int]:
        return tuple(self.images.shape[1:])  # type: ignore[return-value]


@dataclass
class ClassExemplars:
    """A few training images per class, equally many for each."""

    images_per_class: tuple[np.ndarray, ...]  # each (n_per_class, H, W, C)
    indices_per_class: tuple[np.ndarray, ...]  # source indices, for provenance

    @property
    def n_classes(self) -> int:
        return len(self.images_per_class)

    @property
    def n_per_class(self) -> int:
        return self.images_per_class[0].shape[0] if self.images_per_class else 0
