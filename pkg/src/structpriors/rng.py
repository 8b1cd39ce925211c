"""Reproducible random streams keyed by (seed, label).

Every consumer of randomness receives a `SeededRng` and derives further
streams by extending the label (`rng.child("layer00")`). A stream's draws
depend only on the pair (seed, label), never on how many values other
streams consumed, so work units can be evaluated in any order -- or in
parallel -- without changing results.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def _label_words(label: str) -> list[int]:
    # First 128 bits of SHA-256, as four uint32 words. Stable across
    # platforms and Python hash randomization.
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]


@dataclass(frozen=True)
class SeededRng:
    """A deterministic random stream identified by a seed and a label."""

    seed: int
    label: str = ""

    def child(self, suffix: str) -> "SeededRng":
        """Derive an independent stream by extending the label."""
        label = f"{self.label}/{suffix}" if self.label else suffix
        return SeededRng(self.seed, label)

    def generator(self) -> np.random.Generator:
        """Fresh PCG64 generator for this stream.

        Calling twice returns generators that produce identical draws.
        """
        entropy = [self.seed & _MASK64] + _label_words(self.label)
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
