"""Bit-exact binary dataset parsers, stratified sampling, and binary tasks."""

from .cifar import CLASS_NAMES as CIFAR10_CLASS_NAMES
from .cifar import load_cifar10, save_cifar10
from .idx import load_idx, save_idx
from .sampling import binary_subset, sample_exemplars, stratified_subsample
from .synthetic import make_synthetic
from .types import ClassExemplars, Dataset

__all__ = [
    "CIFAR10_CLASS_NAMES",
    "load_cifar10",
    "save_cifar10",
    "load_idx",
    "save_idx",
    "binary_subset",
    "sample_exemplars",
    "stratified_subsample",
    "make_synthetic",
    "ClassExemplars",
    "Dataset",
]
