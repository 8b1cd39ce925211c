"""Entropy, correlation, CAPPA, and training-curve machinery."""

import json
import math

import numpy as np
import pytest

from structpriors import SeededRng
from structpriors.datasets import binary_subset, make_synthetic, stratified_subsample
from structpriors.errors import ConstantSequence, EmptyHistogram, ShapeMismatch
from structpriors.evaluation import (
    PairSet,
    TrainHyperparams,
    activation_correlations,
    aggregate_curves,
    cappa,
    histogram_entropy,
    pearson,
    predictive_histogram,
    prior_predictive_entropy,
    sample_pairs,
    train_run,
)
from structpriors.evaluation.reports import config_fingerprint, strip_timing
from structpriors.priors import PriorSpec, make_prior_spec
from structpriors.tensor_nn import build_cnn, build_fcnn


def small_net(n_outputs=10):
    # 8 filters keeps unit-test evaluation fast.
    return build_cnn((28, 28, 1), 1, n_outputs, first_filters=8)


class TestHistogramEntropy:
    def test_uniform_is_ln_classes(self):
        assert histogram_entropy([10] * 10) == pytest.approx(math.log(10), abs=1e-12)

    def test_point_mass_is_zero(self):
        assert histogram_entropy([0, 42, 0]) == 0.0

    def test_hand_value(self):
        # counts (3, 1): -(0.75 ln 0.75 + 0.25 ln 0.25).
        assert histogram_entropy([3, 1]) == pytest.approx(0.5623351446188083, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(EmptyHistogram):
            histogram_entropy([0, 0])
        with pytest.raises(EmptyHistogram):
            histogram_entropy([])
        with pytest.raises(EmptyHistogram):
            histogram_entropy([3, -1])


class TestPredictiveHistogram:
    def test_zero_logits_tie_to_class_zero(self):
        counts, ties = predictive_histogram(np.zeros((7, 4)), 4)
        assert counts.tolist() == [7, 0, 0, 0]
        assert ties == 7
        assert histogram_entropy(counts) == 0.0

    def test_no_ties_counted_for_distinct_logits(self):
        logits = np.array([[0.0, 1.0], [2.0, -1.0]])
        counts, ties = predictive_histogram(logits, 2)
        assert counts.tolist() == [1, 1]
        assert ties == 0


class TestPearson:
    def test_perfect_correlation(self):
        xs = np.array([0.3, 1.7, 2.9, -4.0])
        assert pearson(xs, xs) == pytest.approx(1.0, abs=1e-12)

    def test_perfect_anticorrelation(self):
        xs = np.array([0.3, 1.7, 2.9, -4.0])
        assert pearson(xs, -xs) == pytest.approx(-1.0, abs=1e-12)

    def test_hand_value(self):
        # xs=(1,2,3), ys=(2,2,4) -> sqrt(3)/2.
        assert pearson([1, 2, 3], [2, 2, 4]) == pytest.approx(math.sqrt(3) / 2, abs=1e-12)

    def test_constant_sequence_raises(self):
        with pytest.raises(ConstantSequence):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_permutation_invariant(self, rng):
        gen = rng.child("perm").generator()
        xs, ys = gen.normal(size=(2, 40))
        perm = gen.permutation(40)
        assert pearson(xs[perm], ys[perm]) == pytest.approx(pearson(xs, ys), abs=1e-12)

    def test_bounds(self, rng):
        gen = rng.child("bounds").generator()
        for _ in range(50):
            xs, ys = gen.normal(size=(2, 10))
            assert -1.0 <= pearson(xs, ys) <= 1.0


class TestEntropyExperiment:
    def test_report_invariants(self, rng, tiny_dataset):
        net = small_net()
        report = prior_predictive_entropy(
            rng.child("ent"), net, PriorSpec(), tiny_dataset, n_draws=5
        )
        assert report.histograms.shape == (5, 10)
        assert (report.histograms.sum(axis=1) == len(tiny_dataset)).all()
        assert ((report.entropies >= 0) & (report.entropies <= math.log(10) + 1e-12)).all()
        assert report.mean_entropy == pytest.approx(report.entropies.mean())

    def test_bit_reproducible(self, rng, tiny_dataset):
        net = small_net()
        a = prior_predictive_entropy(rng.child("rep"), net, PriorSpec(), tiny_dataset, n_draws=3)
        b = prior_predictive_entropy(rng.child("rep"), net, PriorSpec(), tiny_dataset, n_draws=3)
        assert np.array_equal(a.entropies, b.entropies)
        assert np.array_equal(a.histograms, b.histograms)

    def test_threads_do_not_change_results(self, rng, tiny_dataset):
        net = small_net()
        a = prior_predictive_entropy(rng.child("thr"), net, PriorSpec(), tiny_dataset, n_draws=6, threads=1)
        b = prior_predictive_entropy(rng.child("thr"), net, PriorSpec(), tiny_dataset, n_draws=6, threads=8)
        assert np.array_equal(a.entropies, b.entropies)

    def test_subsample_consistency(self, rng):
        # Desk-scale consistency check: entropy on a 10% stratified
        # subsample of a 10,000-example set stays within 0.05 of the
        # full-set value for >= 95% of draws.
        data = make_synthetic(rng.child("subcon"), 10_000)
        sub = stratified_subsample(rng.child("subcon/sel"), data, 1_000)
        net = small_net()
        full = prior_predictive_entropy(rng.child("subcon/H"), net, PriorSpec(), data, n_draws=20, threads=2)
        part = prior_predictive_entropy(rng.child("subcon/H"), net, PriorSpec(), sub, n_draws=20, threads=2)
        close = np.abs(full.entropies - part.entropies) <= 0.05
        assert close.mean() >= 0.95


class TestCorrelationExperiment:
    def test_identical_pair_is_perfectly_correlated(self, rng, tiny_dataset):
        pairs = PairSet(np.array([[0, 0]]), np.array([[0, 1]]))
        net = small_net()
        report = activation_correlations(
            rng.child("ident"), net, PriorSpec(), tiny_dataset, n_draws=10, pairs=pairs
        )
        assert report.mean_same == pytest.approx(1.0, abs=1e-12)

    def test_sample_pairs_classes(self, rng, tiny_dataset):
        pairs = sample_pairs(rng.child("sp"), tiny_dataset, 50)
        labels = tiny_dataset.labels
        assert (labels[pairs.same_pairs[:, 0]] == labels[pairs.same_pairs[:, 1]]).all()
        assert (labels[pairs.diff_pairs[:, 0]] != labels[pairs.diff_pairs[:, 1]]).all()
        assert (pairs.same_pairs[:, 0] != pairs.same_pairs[:, 1]).all()

    def test_same_class_correlation_exceeds_diff(self, rng, tiny_dataset):
        net = small_net()
        report = activation_correlations(
            rng.child("gap"), net, PriorSpec(), tiny_dataset, n_draws=12, n_pairs=60
        )
        assert -1.0 <= report.mean_diff <= report.mean_same <= 1.0

    def test_reproducible(self, rng, tiny_dataset):
        net = small_net()
        kwargs = dict(n_draws=6, n_pairs=20, keep_pair_values=True)
        a = activation_correlations(rng.child("crep"), net, PriorSpec(), tiny_dataset, **kwargs)
        b = activation_correlations(rng.child("crep"), net, PriorSpec(), tiny_dataset, **kwargs)
        assert np.array_equal(a.same_correlations, b.same_correlations)
        assert np.array_equal(a.diff_correlations, b.diff_correlations)


class TestCappaExperiment:
    def test_bounds_and_max_identity(self, rng, tiny_dataset):
        task = binary_subset(tiny_dataset, 1, 2, 15)
        net = small_net(2)
        report = cappa(rng.child("cap"), net, PriorSpec(), task, n_draws=8)
        assert ((report.cappas >= 0.5) & (report.cappas <= 1.0)).all()
        assert np.array_equal(report.cappas, np.maximum(report.accuracies, 1 - report.accuracies))

    def test_relabeling_invariance(self, rng, tiny_dataset):
        # Swapping the two classes inverts the accuracy, leaving CAPPA fixed.
        task = binary_subset(tiny_dataset, 1, 2, 15)
        swapped = binary_subset(tiny_dataset, 2, 1, 15)
        # Same images in a different order; rebuild as the same order with
        # flipped labels for an exact comparison.
        from structpriors.datasets import Dataset

        flipped = Dataset(task.images, 1 - task.labels, 2, task.split)
        net = small_net(2)
        a = cappa(rng.child("swap"), net, PriorSpec(), task, n_draws=6)
        b = cappa(rng.child("swap"), net, PriorSpec(), flipped, n_draws=6)
        assert np.array_equal(a.cappas, b.cappas)
        assert np.allclose(a.accuracies, 1 - b.accuracies)
        assert swapped.n_classes == 2

    def test_unbalanced_rejected(self, rng, tiny_dataset):
        from structpriors.datasets import Dataset

        task = binary_subset(tiny_dataset, 1, 2, 15)
        unbalanced = Dataset(task.images[1:], task.labels[1:], 2, "u")
        with pytest.raises(ShapeMismatch):
            cappa(rng.child("unb"), small_net(2), PriorSpec(), unbalanced, n_draws=2)

    def test_needs_two_outputs(self, rng, tiny_dataset):
        task = binary_subset(tiny_dataset, 1, 2, 15)
        with pytest.raises(ShapeMismatch):
            cappa(rng.child("out"), small_net(10), PriorSpec(), task, n_draws=2)


class TestTraining:
    def test_zero_learning_rate_flat_curve(self, rng, tiny_dataset, tiny_test_dataset):
        net = small_net()
        hp = TrainHyperparams(lr=0.0, epochs=1, batch_size=50, eval_every=2)
        curve = train_run(rng.child("zero"), net, PriorSpec(), tiny_dataset, tiny_test_dataset, hp)
        assert len(set(curve.test_accuracies)) == 1

    def test_curve_structure(self, rng, tiny_dataset, tiny_test_dataset):
        net = small_net()
        hp = TrainHyperparams(epochs=1, batch_size=50, eval_every=2)
        curve = train_run(rng.child("struct"), net, PriorSpec(), tiny_dataset, tiny_test_dataset, hp)
        assert curve.steps[0] == 0 and curve.steps[-1] == 4  # 200 // 50 = 4 steps
        assert all(b > a for a, b in zip(curve.steps, curve.steps[1:]))
        assert all(0.0 <= a <= 1.0 for a in curve.test_accuracies)
        assert len(curve.steps) == len(curve.train_losses) == len(curve.test_accuracies)

    def test_reproducible(self, rng, tiny_dataset, tiny_test_dataset):
        net = small_net()
        hp = TrainHyperparams(epochs=1, batch_size=50, eval_every=2)
        a = train_run(rng.child("trep"), net, PriorSpec(), tiny_dataset, tiny_test_dataset, hp)
        b = train_run(rng.child("trep"), net, PriorSpec(), tiny_dataset, tiny_test_dataset, hp)
        assert a.train_losses == b.train_losses
        assert a.test_accuracies == b.test_accuracies

    def test_loss_decreases_on_easy_task(self, rng, tiny_dataset, tiny_test_dataset):
        net = small_net()
        hp = TrainHyperparams(epochs=3, batch_size=50, eval_every=4)
        curve = train_run(rng.child("easy"), net, PriorSpec(), tiny_dataset, tiny_test_dataset, hp)
        assert curve.train_losses[-1] < curve.train_losses[0]

    def test_aggregate_curves(self):
        from structpriors.evaluation import TrainingCurve

        curves = [
            TrainingCurve([0, 1], [1.0, 0.5], [0.2, 0.8], seed=0),
            TrainingCurve([0, 1], [1.1, 0.6], [0.4, 0.6], seed=1),
        ]
        agg = aggregate_curves(curves)
        assert agg["mean_test_accuracy"] == [pytest.approx(0.3), pytest.approx(0.7)]
        # 2 stderr of {0.2, 0.4}: std(ddof=1)=0.1414..., stderr=0.1, doubled.
        assert agg["two_stderr"][0] == pytest.approx(0.2, rel=1e-9)
        assert agg["final_mean_test_accuracy"] == pytest.approx(0.7)


class TestReports:
    def test_fingerprint_stable_and_sensitive(self):
        a = config_fingerprint({"x": 1, "y": [1, 2]})
        b = config_fingerprint({"y": [1, 2], "x": 1})
        c = config_fingerprint({"x": 2, "y": [1, 2]})
        assert a == b
        assert a != c

    def test_strip_timing(self):
        assert strip_timing({"a": 1, "timing": {"s": 2}}) == {"a": 1}

    def test_report_round_trips_through_json(self, rng, tiny_dataset):
        net = small_net()
        report = prior_predictive_entropy(
            rng.child("json"), net, PriorSpec(), tiny_dataset, n_draws=2, config={"scale": "desk"}
        )
        payload = json.loads(json.dumps(report.to_dict()))
        assert payload["n_draws"] == 2
        assert payload["config"] == {"scale": "desk"}
