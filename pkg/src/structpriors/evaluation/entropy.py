"""Prior predictive diversity: entropy of the argmax-class histogram an
untrained, prior-sampled network produces over a dataset."""

from __future__ import annotations

import numpy as np

from ..errors import EmptyHistogram
from ..priors.init import PriorSpec, init_network
from ..rng import SeededRng
from ..tensor_nn.types import NetworkSpec
from .common import (
    DEFAULT_BATCH_SIZE,
    batched_logits,
    make_forward_cache,
    map_indexed,
    standard_error,
)
from .reports import EntropyReport


def histogram_entropy(counts) -> float:
    """Entropy in nats of a count histogram, with 0 * ln 0 = 0."""
    counts = np.asarray(counts, dtype=np.float64)
    if counts.size == 0 or counts.sum() <= 0:
        raise EmptyHistogram("histogram has no mass")
    if (counts < 0).any():
        raise EmptyHistogram("histogram has negative counts")
    p = counts / counts.sum()
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def predictive_histogram(logits: np.ndarray, n_classes: int) -> tuple[np.ndarray, int]:
    """Histogram of argmax classes and the number of exact ties.

    Ties (two or more outputs sharing the row maximum bit-for-bit) resolve
    to the lowest class index; they are measure-zero for continuous priors
    and are counted so reports can flag them.
    """
    top = logits.max(axis=1)
    n_ties = int(((logits == top[:, None]).sum(axis=1) > 1).sum())
    preds = logits.argmax(axis=1)
    return np.bincount(preds, minlength=n_classes), n_ties


def prior_predictive_entropy(
    rng: SeededRng,
    spec: NetworkSpec,
    prior: PriorSpec,
    dataset,
    n_draws: int,
    exemplars=None,
    batch_size: int = DEFAULT_BATCH_SIZE,
    threads: int = 1,
    config: dict | None = None,
) -> EntropyReport:
    """Mean histogram entropy over independent prior draws."""
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    cache = make_forward_cache(spec, dataset.images, batch_size)

    def one_draw(i: int):
        params = init_network(rng.child(f"draw{i:05d}"), spec, prior, exemplars)
        logits = batched_logits(spec, params, dataset.images, batch_size, cache)
        counts, n_ties = predictive_histogram(logits, dataset.n_classes)
        return counts, histogram_entropy(counts), n_ties

    results = map_indexed(one_draw, n_draws, threads)
    histograms = np.stack([r[0] for r in results])
    entropies = np.array([r[1] for r in results])
    ties = np.array([r[2] for r in results], dtype=np.int64)
    return EntropyReport(
        histograms=histograms,
        entropies=entropies,
        tie_counts=ties,
        mean_entropy=float(entropies.mean()),
        stderr=standard_error(entropies),
        n_draws=n_draws,
        config=config or {},
    )
