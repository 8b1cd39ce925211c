"""Class-stratified sampling and binary-task construction."""

from __future__ import annotations

import numpy as np

from ..errors import InsufficientClassExamples
from ..rng import SeededRng
from .types import ClassExemplars, Dataset


def sample_exemplars(rng: SeededRng, dataset: Dataset, n_per_class: int) -> ClassExemplars:
    """Draw n_per_class images per class, without replacement."""
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    gen = rng.generator()
    images, indices = [], []
    for j in range(dataset.n_classes):
        pool = np.flatnonzero(dataset.labels == j)
        if pool.size < n_per_class:
            raise InsufficientClassExamples(
                f"class {j} has {pool.size} examples, need {n_per_class}"
            )
        chosen = gen.choice(pool, size=n_per_class, replace=False)
        indices.append(chosen)
        images.append(dataset.images[chosen])
    return ClassExemplars(tuple(images), tuple(indices))


def binary_subset(dataset: Dataset, class_a: int, class_b: int, n_per_class: int) -> Dataset:
    """Balanced two-class dataset; labels remapped a -> 0, b -> 1.

    Selection is deterministic (first n_per_class occurrences of each class
    in dataset order).
    """
    if class_a == class_b:
        raise ValueError("binary task needs two distinct classes")
    for c in (class_a, class_b):
        if not (0 <= c < dataset.n_classes):
            raise ValueError(f"class {c} outside [0, {dataset.n_classes})")
    parts = []
    for new_label, c in enumerate((class_a, class_b)):
        pool = np.flatnonzero(dataset.labels == c)
        if pool.size < n_per_class:
            raise InsufficientClassExamples(f"class {c} has {pool.size} examples, need {n_per_class}")
        take = pool[:n_per_class]
        parts.append((dataset.images[take], np.full(n_per_class, new_label, dtype=np.int64)))
    images = np.concatenate([p[0] for p in parts], axis=0)
    labels = np.concatenate([p[1] for p in parts], axis=0)
    return Dataset(images, labels, 2, f"{dataset.split}:binary{class_a}v{class_b}")


def stratified_subsample(rng: SeededRng, dataset: Dataset, n_total: int) -> Dataset:
    """Stratified subsample of n_total examples, class shares preserved.

    Per-class counts follow the largest-remainder rule so they sum exactly
    to n_total; within a class, examples are drawn without replacement.
    """
    n = len(dataset)
    if not (1 <= n_total <= n):
        raise ValueError(f"n_total must lie in [1, {n}]")
    counts = np.bincount(dataset.labels, minlength=dataset.n_classes)
    exact = counts * (n_total / n)
    base = np.floor(exact).astype(np.int64)
    remainder = n_total - base.sum()
    order = np.argsort(-(exact - base), kind="stable")
    base[order[:remainder]] += 1

    gen = rng.generator()
    chosen = []
    for j in range(dataset.n_classes):
        if base[j] == 0:
            continue
        pool = np.flatnonzero(dataset.labels == j)
        chosen.append(gen.choice(pool, size=base[j], replace=False))
    idx = np.sort(np.concatenate(chosen))
    return Dataset(
        dataset.images[idx], dataset.labels[idx], dataset.n_classes, f"{dataset.split}:sub{n_total}"
    )
