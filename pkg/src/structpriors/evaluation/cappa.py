"""Class-agnostic prior predictive accuracy (CAPPA).

For a balanced binary task, an untrained prior-sampled network classifies
every example; the per-draw score is the larger of the accuracy and the
label-inverted accuracy, so it measures how usefully the prior splits the
input space regardless of which side it calls class 0.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch
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
from .reports import CappaReport


def cappa(
    rng: SeededRng,
    spec: NetworkSpec,
    prior: PriorSpec,
    binary_dataset,
    n_draws: int,
    exemplars=None,
    batch_size: int = DEFAULT_BATCH_SIZE,
    threads: int = 1,
    task: str = "",
    config: dict | None = None,
) -> CappaReport:
    """Mean CAPPA over prior draws; each draw scores in [0.5, 1.0]."""
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    if binary_dataset.n_classes != 2:
        raise ShapeMismatch("CAPPA needs a binary dataset")
    if spec.n_outputs != 2:
        raise ShapeMismatch("CAPPA needs a 2-output network")
    counts = np.bincount(binary_dataset.labels, minlength=2)
    if counts[0] != counts[1]:
        raise ShapeMismatch(f"binary task must be balanced, got counts {counts.tolist()}")
    labels = binary_dataset.labels
    cache = make_forward_cache(spec, binary_dataset.images, batch_size)

    def one_draw(i: int) -> float:
        params = init_network(rng.child(f"draw{i:05d}"), spec, prior, exemplars)
        logits = batched_logits(spec, params, binary_dataset.images, batch_size, cache)
        preds = logits.argmax(axis=1)
        return float((preds == labels).mean())

    accuracies = np.array(map_indexed(one_draw, n_draws, threads))
    cappas = np.maximum(accuracies, 1.0 - accuracies)
    return CappaReport(
        accuracies=accuracies,
        cappas=cappas,
        mean_cappa=float(cappas.mean()),
        stderr=standard_error(cappas),
        n_draws=n_draws,
        task=task or binary_dataset.split,
        config=config or {},
    )
