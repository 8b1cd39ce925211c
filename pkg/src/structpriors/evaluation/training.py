"""Training curves from prior initializations, and the structure ablation."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import NonFiniteLoss
from ..priors.init import PriorSpec, init_network, make_prior_spec
from ..rng import SeededRng
from ..tensor_nn.adam import adam_step, init_adam_state
from ..tensor_nn.network import loss_and_grad, loss_only
from ..tensor_nn.types import NetworkSpec
from ..datasets.sampling import stratified_subsample
from .common import DEFAULT_BATCH_SIZE, batched_logits, map_indexed
from .reports import TrainingCurve, aggregate_curves


@dataclass(frozen=True)
class TrainHyperparams:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 128
    epochs: int = 3
    eval_every: int = 50  # optimizer steps between test-accuracy logs
    test_subsample: int | None = None  # cap test-set size for desk-scale runs

    def to_dict(self) -> dict:
        return asdict(self)


def accuracy(spec: NetworkSpec, params, dataset, batch_size: int = DEFAULT_BATCH_SIZE) -> float:
    logits = batched_logits(spec, params, dataset.images, batch_size)
    return float((logits.argmax(axis=1) == dataset.labels).mean())


def train_run(
    rng: SeededRng,
    spec: NetworkSpec,
    prior: PriorSpec,
    train_set,
    test_set,
    hp: TrainHyperparams,
    exemplars=None,
    config: dict | None = None,
) -> TrainingCurve:
    """Initialize from the prior and train with minibatch Adam.

    Test accuracy is logged at step 0 and every `hp.eval_every` optimizer
    steps (plus the final step); the logged train loss is the minibatch loss
    at that step. Raises NonFiniteLoss with the offending step if the loss
    diverges.
    """
    if hp.epochs < 1:
        raise ValueError("epochs must be >= 1")
    if len(train_set) < hp.batch_size:
        raise ValueError(f"train set ({len(train_set)}) smaller than one batch ({hp.batch_size})")
    params = init_network(rng.child("init"), spec, prior, exemplars)
    state = init_adam_state(params)
    if hp.test_subsample is not None and len(test_set) > hp.test_subsample:
        test_set = stratified_subsample(rng.child("testsub"), test_set, hp.test_subsample)

    gen = rng.child("batches").generator()
    n = len(train_set)
    steps: list[int] = []
    losses: list[float] = []
    accs: list[float] = []

    first_order = None
    step = 0
    for epoch in range(hp.epochs):
        order = gen.permutation(n)
        if epoch == 0:
            first_order = order
            first_batch = first_order[: hp.batch_size]
            loss0 = loss_only(
                spec, params, train_set.images[first_batch], train_set.labels[first_batch]
            )
            steps.append(0)
            losses.append(loss0)
            accs.append(accuracy(spec, params, test_set))
        for start in range(0, n - n % hp.batch_size, hp.batch_size):
            batch_idx = order[start : start + hp.batch_size]
            loss, grads = loss_and_grad(
                spec, params, train_set.images[batch_idx], train_set.labels[batch_idx]
            )
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"loss diverged at step {step} (epoch {epoch})")
            params, state = adam_step(
                params, grads, state, lr=hp.lr, beta1=hp.beta1, beta2=hp.beta2, eps=hp.eps
            )
            step += 1
            if step % hp.eval_every == 0:
                steps.append(step)
                losses.append(loss)
                accs.append(accuracy(spec, params, test_set))
    if steps[-1] != step:
        steps.append(step)
        losses.append(losses[-1] if step == 0 else loss)
        accs.append(accuracy(spec, params, test_set))
    return TrainingCurve(steps, losses, accs, seed=rng.seed, config=config or {})


def train_experiment(
    rng: SeededRng,
    spec: NetworkSpec,
    prior: PriorSpec,
    train_set,
    test_set,
    hp: TrainHyperparams,
    n_runs: int,
    exemplars=None,
    threads: int = 1,
    config: dict | None = None,
) -> dict:
    """n_runs independent training runs plus their aggregate curve.

    Run r draws everything from the substream rng.child(f"run{r:02d}"), so
    two priors evaluated under the same root rng share batch orders and all
    unstructured layer draws -- a paired comparison.
    """

    def one_run(r: int) -> TrainingCurve:
        return train_run(rng.child(f"run{r:02d}"), spec, prior, train_set, test_set, hp, exemplars, config)

    curves = map_indexed(one_run, n_runs, threads)
    return {"curves": curves, "aggregate": aggregate_curves(curves)}


ABLATION_VARIANTS = ("iid", "feats-only", "gabor-sg0", "gabor-sg2e-2")


def ablation_grid(
    rng: SeededRng,
    spec: NetworkSpec,
    train_set,
    test_set,
    hp: TrainHyperparams,
    n_runs: int = 5,
    exemplars=None,
    noisy_sigma: float = 0.02,
    threads: int = 1,
    config: dict | None = None,
) -> dict:
    """Structure ablation: each single element of the structured prior alone.

    Variants: shared i.i.d. baseline, feature-specific final layer only,
    noiseless Gabor first layer only, and noisy Gabor (sigma_g = 0.02 by
    default). All variants share per-run substreams, so non-varied layers
    and batch orders are identical across variants.
    """
    priors = {
        "iid": make_prior_spec(spec, "iid"),
        "feats-only": make_prior_spec(spec, "feats"),
        "gabor-sg0": make_prior_spec(spec, "gabor", sigma_g=0.0),
        f"gabor-sg{noisy_sigma:g}": make_prior_spec(spec, "gabor", sigma_g=noisy_sigma),
    }
    results = {}
    for name, prior in priors.items():
        results[name] = train_experiment(
            rng, spec, prior, train_set, test_set, hp, n_runs, exemplars, threads, config
        )
    return results
