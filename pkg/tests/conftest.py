"""Shared fixtures: small synthetic datasets and data-dir discovery."""

from __future__ import annotations

import os
from pathlib import Path

import pytest

from structpriors import SeededRng
from structpriors.datasets import make_synthetic

# Real datasets are optional: point this at a directory containing
# mnist/, fashion-mnist/ (IDX files) and cifar10/ (binary batches) to run
# the faithful paper-claim acceptance tests.
DATA_ENV = "STRUCTPRIORS_DATA_DIR"


def real_data_root() -> Path | None:
    root = os.environ.get(DATA_ENV)
    if root and Path(root).is_dir():
        return Path(root)
    return None


def mnist_dir(name: str) -> Path | None:
    """Directory holding the IDX files for `name` (mnist / fashion-mnist)."""
    root = real_data_root()
    if root is None:
        return None
    cand = root / name
    if (cand / "train-images-idx3-ubyte").is_file():
        return cand
    return None


@pytest.fixture(scope="session")
def rng() -> SeededRng:
    return SeededRng(20260809)


@pytest.fixture(scope="session")
def tiny_dataset(rng):
    """Small synthetic dataset for fast unit tests."""
    return make_synthetic(rng.child("tiny"), 200, split="train")


@pytest.fixture(scope="session")
def tiny_test_dataset(rng):
    return make_synthetic(rng.child("tiny-test"), 100, split="test")
