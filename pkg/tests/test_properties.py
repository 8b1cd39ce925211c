"""Property tests for the scalar/array kernels with searched inputs."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from structpriors.evaluation import histogram_entropy, pearson
from structpriors.errors import ConstantSequence
from structpriors.priors import standardize_layer
from structpriors.tensor_nn import softmax

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


@given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(2, 12)), elements=finite_floats))
@settings(max_examples=200, deadline=None)
def test_softmax_rows_are_distributions(logits):
    p = softmax(logits)
    assert np.all(p >= 0.0) and np.all(p <= 1.0)
    assert np.abs(p.sum(axis=1) - 1.0).max() < 1e-12


@given(st.lists(st.integers(0, 10_000), min_size=1, max_size=30).filter(lambda c: sum(c) > 0))
@settings(max_examples=200, deadline=None)
def test_entropy_within_bounds(counts):
    h = histogram_entropy(counts)
    assert 0.0 <= h <= math.log(len(counts)) + 1e-12


@given(arrays(np.float64, st.tuples(st.just(2), st.integers(3, 40)), elements=finite_floats))
@settings(max_examples=200, deadline=None)
def test_pearson_bounded(xy):
    xs, ys = xy
    try:
        r = pearson(xs, ys)
    except ConstantSequence:
        return
    assert -1.0 - 1e-12 <= r <= 1.0 + 1e-12


@given(
    arrays(np.float64, st.integers(4, 200), elements=st.floats(-100, 100)),
    st.integers(1, 500),
)
@settings(max_examples=200, deadline=None)
def test_standardize_hits_target_moments(weights, n_in):
    if weights.var() == 0.0:
        return
    out = standardize_layer(weights, n_in)
    assert abs(out.mean()) < 1e-9
    assert abs(out.var() - 2.0 / n_in) < 1e-9
