"""Reverse-mode gradients against closed forms and finite differences."""

import numpy as np
import pytest

from helpers import make_toy_problem, max_relative_error
from structpriors import SeededRng
from structpriors.errors import LabelOutOfRange
from structpriors.tensor_nn import (
    LayerParams,
    NetworkSpec,
    ParameterSet,
    central_difference,
    dense,
    flatten,
    loss_and_grad,
    numeric_grad,
    softmax,
)


def linear_softmax_net(n_in, n_out):
    return NetworkSpec((1, 1, n_in), (flatten(), dense(n_out)), n_out)


class TestClosedForms:
    def test_uniform_logits_loss_is_log_c(self):
        # Zero weights -> uniform prediction -> loss = ln(n_classes).
        for c in (2, 5, 10):
            spec = linear_softmax_net(4, c)
            params = ParameterSet({1: LayerParams(np.zeros((4, c)), np.zeros(c))})
            x = np.ones((3, 1, 1, 4))
            loss, _ = loss_and_grad(spec, params, x, np.zeros(3, dtype=np.int64))
            assert loss == pytest.approx(np.log(c), abs=1e-12)

    def test_linear_softmax_analytic_gradient(self, rng):
        # For a single dense layer the CE gradient is x^T (p - onehot) / B.
        gen = rng.child("linsoft").generator()
        spec = linear_softmax_net(6, 4)
        w = gen.normal(size=(6, 4))
        b = gen.normal(size=4)
        params = ParameterSet({1: LayerParams(w, b)})
        x = gen.normal(size=(5, 1, 1, 6))
        labels = gen.integers(0, 4, size=5)

        _, grads = loss_and_grad(spec, params, x, labels)

        flat = x.reshape(5, 6)
        p = softmax(flat @ w + b)
        onehot = np.zeros((5, 4))
        onehot[np.arange(5), labels] = 1.0
        expected_w = flat.T @ (p - onehot) / 5
        expected_b = (p - onehot).sum(axis=0) / 5
        assert np.abs(grads.layers[1].weights - expected_w).max() < 1e-12
        assert np.abs(grads.layers[1].biases - expected_b).max() < 1e-12

    def test_label_out_of_range(self):
        spec = linear_softmax_net(2, 2)
        params = ParameterSet({1: LayerParams(np.zeros((2, 2)), np.zeros(2))})
        x = np.zeros((1, 1, 1, 2))
        with pytest.raises(LabelOutOfRange):
            loss_and_grad(spec, params, x, np.array([2]))


class TestCentralDifference:
    def test_quadratic_slope(self):
        # d/dx x^2 at 3 is 6.
        assert central_difference(lambda t: t * t, 3.0, 1e-4) == pytest.approx(6.0, abs=1e-7)

    def test_zero_input_dense(self):
        # Zero images: weight gradients vanish, bias gradients do not.
        spec = linear_softmax_net(3, 2)
        params = ParameterSet({1: LayerParams(np.ones((3, 2)), np.zeros(2))})
        x = np.zeros((4, 1, 1, 3))
        labels = np.zeros(4, dtype=np.int64)
        ng = numeric_grad(spec, params, x, labels, 1e-4)
        assert np.abs(ng.layers[1].weights).max() == 0.0
        assert np.abs(ng.layers[1].biases).max() > 0.1


class TestFiniteDifferenceAgreement:
    @pytest.mark.parametrize("seed", range(6))
    def test_toy_net_agreement(self, seed):
        spec, params, batch, labels = make_toy_problem(seed)
        _, analytic = loss_and_grad(spec, params, batch, labels)
        numeric = numeric_grad(spec, params, batch, labels, 1e-4)
        assert max_relative_error(analytic, numeric) < 1e-5

    def test_oracle_self_consistency(self):
        # numeric_grad at two step sizes agrees with itself (O(h^2) error).
        spec, params, batch, labels = make_toy_problem(1)
        g1 = numeric_grad(spec, params, batch, labels, 1e-4)
        g2 = numeric_grad(spec, params, batch, labels, 5e-5)
        assert max_relative_error(g1, g2) < 1e-4
