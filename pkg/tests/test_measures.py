import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specmeas import (
    CircleAtomicMeasure,
    IntervalAtomicMeasure,
    InvalidMeasure,
    NotSymmetric,
    RealCanonicalVector,
    VerblunskyVector,
    is_symmetric,
    moments_circle,
    moments_interval,
    project_R,
)
from specmeas.measures import canonical_angle


@st.composite
def circle_measures(draw, max_atoms=8):
    k = draw(st.integers(1, max_atoms))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    angles = np.sort(rng.uniform(-np.pi, np.pi, k))
    return CircleAtomicMeasure(angles, rng.dirichlet(np.ones(k)))


@st.composite
def symmetric_measures(draw, max_pairs=5):
    k = draw(st.integers(1, max_pairs))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    th = rng.uniform(0.05, np.pi - 0.05, k)
    w = rng.dirichlet(np.ones(k + 2))
    angles = np.concatenate([th, -th, [0.0, -np.pi]])
    weights = np.concatenate([w[:k] / 2, w[:k] / 2, w[k:]])
    return CircleAtomicMeasure(angles, weights)


def test_canonical_angle_range():
    th = canonical_angle([np.pi, -np.pi, 3 * np.pi, -1e-17 - np.pi, 0.5])
    assert np.all(th >= -np.pi) and np.all(th < np.pi)
    assert th[0] == -np.pi and th[1] == -np.pi
    assert th[4] == 0.5


def test_circle_measure_validation():
    with pytest.raises(InvalidMeasure):
        CircleAtomicMeasure([0.0, 1.0], [0.5, 0.6])
    with pytest.raises(InvalidMeasure):
        CircleAtomicMeasure([0.0, 1e-11], [0.5, 0.5])
    with pytest.raises(InvalidMeasure):
        CircleAtomicMeasure([np.pi, -np.pi], [0.5, 0.5])
    with pytest.raises(InvalidMeasure):
        CircleAtomicMeasure([], [])
    with pytest.raises(InvalidMeasure):
        CircleAtomicMeasure([0.0, 1.0], [1.5, -0.5])


def test_tiny_weights_are_kept():
    mu = CircleAtomicMeasure([0.0, 1.0], [1 - 1e-15, 1e-15])
    assert len(mu) == 2 and mu.weights[1] == 1e-15


def test_interval_measure_sorted_and_validated():
    mu = IntervalAtomicMeasure([0.9, 0.1], [0.25, 0.75])
    assert np.array_equal(mu.points, [0.1, 0.9])
    assert np.array_equal(mu.weights, [0.75, 0.25])
    with pytest.raises(InvalidMeasure):
        IntervalAtomicMeasure([1.2], [1.0])
    with pytest.raises(InvalidMeasure):
        IntervalAtomicMeasure([0.3, 0.3], [0.5, 0.5])


def test_measures_are_immutable():
    mu = CircleAtomicMeasure([0.0], [1.0])
    with pytest.raises(ValueError):
        mu.weights[0] = 0.5
    with pytest.raises(AttributeError):
        mu.angles = np.array([1.0])


def test_json_round_trip():
    mu = CircleAtomicMeasure([0.1, -2.0], [0.3, 0.7])
    d = json.loads(mu.to_json())
    assert set(d) == {"angles", "weights"}
    back = CircleAtomicMeasure.from_json(mu.to_json())
    assert np.array_equal(back.angles, mu.angles) and np.array_equal(back.weights, mu.weights)
    nu = IntervalAtomicMeasure([0.0, 0.5, 1.0], [0.2, 0.3, 0.5])
    assert set(json.loads(nu.to_json())) == {"points", "weights"}
    back = IntervalAtomicMeasure.from_json(nu.to_json())
    assert np.array_equal(back.points, nu.points)


def test_coefficient_vector_types():
    v = VerblunskyVector([0.1, 0.2j], -1.0)
    assert len(v) == 3 and v.coefficients[-1] == -1
    with pytest.raises(InvalidMeasure):
        VerblunskyVector([1.0])
    with pytest.raises(InvalidMeasure):
        VerblunskyVector([0.1], 0.9)
    p = RealCanonicalVector([0.5, 0.25], 1)
    assert p.values == [0.5, 0.25, 1]
    with pytest.raises(InvalidMeasure):
        RealCanonicalVector([0.0, 0.5])
    with pytest.raises(InvalidMeasure):
        RealCanonicalVector([0.5], 1.5)


def test_moments_examples():
    mu = CircleAtomicMeasure([0.0, np.pi], [0.5, 0.5])
    assert np.allclose(moments_circle(mu, 4), [0, 1, 0, 1])
    nu = IntervalAtomicMeasure([0.0, 1.0], [0.5, 0.5])
    assert np.allclose(moments_interval(nu, 3), [0.5, 0.5, 0.5])
    with pytest.raises(ValueError):
        moments_circle(mu, 0)


@given(circle_measures())
@settings(max_examples=60, deadline=None)
def test_circle_moments_bounded(mu):
    assert np.all(np.abs(moments_circle(mu, 12)) <= 1 + 1e-12)


@given(symmetric_measures())
@settings(max_examples=60, deadline=None)
def test_symmetric_measures_have_real_moments(mu):
    assert is_symmetric(mu)
    assert np.abs(moments_circle(mu, 10).imag).max() < 1e-12


@given(symmetric_measures())
@settings(max_examples=60, deadline=None)
def test_projection_matches_chebyshev_lifted_moments(mu):
    gamma = project_R(mu)
    assert np.isclose(gamma.weights.sum(), 1.0, atol=1e-12)
    K = 6
    # int ((2 + z + conj z)/4)^k dmu via the binomial expansion of the circle moments
    t = np.concatenate([[1.0], moments_circle(mu, K).real])
    for k in range(1, K + 1):
        # ((1 + cos)/2)^k = 2^-k sum_j C(k, j) cos^j with cos^j = 2^-j sum_i C(j, i) t_{|j - 2i|}
        acc = sum(math.comb(k, j) * sum(math.comb(j, i) * t[abs(j - 2 * i)] for i in range(j + 1)) / 2**j
                  for j in range(k + 1))
        assert abs(acc / 2**k - moments_interval(gamma, k)[-1]) < 1e-10


def test_projection_merges_pairs():
    mu = CircleAtomicMeasure([0.7, -0.7, np.pi], [0.3, 0.3, 0.4])
    gamma = project_R(mu)
    assert len(gamma) == 2
    assert np.allclose(gamma.points, [0.0, (1 + np.cos(0.7)) / 2])
    assert np.allclose(gamma.weights, [0.4, 0.6])


def test_asymmetric_projection_rejected():
    mu = CircleAtomicMeasure([0.7, -0.7], [0.4, 0.6])
    assert not is_symmetric(mu)
    with pytest.raises(NotSymmetric):
        project_R(mu)
