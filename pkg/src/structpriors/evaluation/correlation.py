"""Prior activation correlations: how similarly one network output responds
to two inputs across prior draws, for same-class vs different-class pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConstantSequence
from ..priors.init import PriorSpec, init_network
from ..rng import SeededRng
from ..tensor_nn.types import NetworkSpec
from .common import DEFAULT_BATCH_SIZE, batched_logits, make_forward_cache, map_indexed
from .reports import CorrelationReport


def pearson(xs, ys) -> float:
    """Pearson product-moment correlation of two equal-length sequences."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1-D and equally long")
    if xs.size < 2:
        raise ValueError("need at least 2 points")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise ConstantSequence("correlation undefined for a constant sequence")
    return float((dx @ dy) / (sx * sy))


@dataclass(frozen=True)
class PairSet:
    """Fixed input pairs, as indices into one dataset.

    Sharing one PairSet across priors removes pair-sampling variance from
    their comparison.
    """

    same_pairs: np.ndarray  # (n, 2) indices, same class
    diff_pairs: np.ndarray  # (n, 2) indices, different classes


def sample_pairs(rng: SeededRng, dataset, n_pairs: int) -> PairSet:
    """Uniform same-class and different-class index pairs.

    Same-class: a class drawn uniformly, then two distinct members.
    Different-class: two distinct classes drawn uniformly, one member each.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    gen = rng.generator()
    by_class = [np.flatnonzero(dataset.labels == j) for j in range(dataset.n_classes)]
    usable = [j for j, idx in enumerate(by_class) if idx.size >= 2]
    if len(usable) < 2:
        raise ValueError("need at least two classes with two examples each")

    same = np.empty((n_pairs, 2), dtype=np.int64)
    for i in range(n_pairs):
        j = usable[gen.integers(len(usable))]
        same[i] = gen.choice(by_class[j], size=2, replace=False)

    diff = np.empty((n_pairs, 2), dtype=np.int64)
    for i in range(n_pairs):
        j, k = gen.choice(len(usable), size=2, replace=False)
        diff[i, 0] = gen.choice(by_class[usable[j]])
        diff[i, 1] = gen.choice(by_class[usable[k]])
    return PairSet(same, diff)


def activation_correlations(
    rng: SeededRng,
    spec: NetworkSpec,
    prior: PriorSpec,
    dataset,
    n_draws: int,
    n_pairs: int | None = None,
    pairs: PairSet | None = None,
    output_index: int = 0,
    exemplars=None,
    batch_size: int = DEFAULT_BATCH_SIZE,
    threads: int = 1,
    keep_pair_values: bool = False,
    config: dict | None = None,
) -> CorrelationReport:
    """Mean per-pair Pearson correlation of one output's logit across draws.

    Pairs come from `pairs` or are sampled from rng.child("pairs") when only
    `n_pairs` is given. Pairs whose logit sequence is constant across draws
    are excluded from the mean and counted in the report.
    """
    if n_draws < 2:
        raise ValueError("n_draws must be >= 2")
    if pairs is None:
        if n_pairs is None:
            raise ValueError("give either pairs or n_pairs")
        pairs = sample_pairs(rng.child("pairs"), dataset, n_pairs)

    unique = np.unique(np.concatenate([pairs.same_pairs.ravel(), pairs.diff_pairs.ravel()]))
    position = {int(idx): pos for pos, idx in enumerate(unique)}
    images = dataset.images[unique]
    cache = make_forward_cache(spec, images, batch_size)

    def one_draw(i: int) -> np.ndarray:
        params = init_network(rng.child(f"draw{i:05d}"), spec, prior, exemplars)
        logits = batched_logits(spec, params, images, batch_size, cache)
        return logits[:, output_index]

    values = np.stack(map_indexed(one_draw, n_draws, threads))  # (n_draws, n_unique)

    def pair_means(pair_array: np.ndarray):
        correlations = []
        excluded = 0
        for a, b in pair_array:
            xs = values[:, position[int(a)]]
            ys = values[:, position[int(b)]]
            try:
                correlations.append(pearson(xs, ys))
            except ConstantSequence:
                excluded += 1
        return np.array(correlations), excluded

    same_corr, excl_same = pair_means(pairs.same_pairs)
    diff_corr, excl_diff = pair_means(pairs.diff_pairs)
    return CorrelationReport(
        mean_same=float(same_corr.mean()) if same_corr.size else float("nan"),
        mean_diff=float(diff_corr.mean()) if diff_corr.size else float("nan"),
        n_draws=n_draws,
        n_pairs=len(pairs.same_pairs),
        n_excluded_same=excl_same,
        n_excluded_diff=excl_diff,
        same_correlations=same_corr if keep_pair_values else None,
        diff_correlations=diff_corr if keep_pair_values else None,
        config=config or {},
    )
