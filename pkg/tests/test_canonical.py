from fractions import Fraction as Fr
from math import comb

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from specmeas import (
    Degenerate,
    IntervalAtomicMeasure,
    MomentSpaceViolation,
    canonical_moments_of_measure,
    canonical_to_moments_real,
    chebyshev_lift,
    extreme_moments,
    gauss_quadrature,
    moments_interval,
    moments_to_canonical_real,
    moments_to_verblunsky,
    principal_representation,
    recurrence_from_canonical,
)
from specmeas.canonical import PrincipalRepSpec, canonical_moments_of_atoms, support_structure
from specmeas.samplers import sample_uniform_moments


def lp_extremes(m, grid=2001):
    """Independent oracle: min / max of the next moment over measures on a grid."""
    x = np.linspace(0.0, 1.0, grid)
    n = len(m)
    A = np.vstack([np.ones_like(x)] + [x**k for k in range(1, n + 1)])
    b = np.concatenate([[1.0], m])
    obj = x ** (n + 1)
    lo = linprog(obj, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    hi = linprog(-obj, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    return lo.fun, -hi.fun


@st.composite
def canonical_vectors(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return np.array([rng.beta(n - j + 1, n - j + 1) for j in range(1, n + 1)])


@st.composite
def interval_measures(draw, max_atoms=6):
    k = draw(st.integers(1, max_atoms))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return IntervalAtomicMeasure(rng.uniform(0.02, 0.98, k), rng.dirichlet(np.ones(k)))


def test_extreme_moment_examples():
    assert extreme_moments([]) == (0.0, 1.0)
    assert extreme_moments([Fr(1, 2)]) == (Fr(1, 4), Fr(1, 2))
    assert extreme_moments([Fr(1, 2), Fr(3, 8)]) == (Fr(9, 32), Fr(11, 32))


def test_extreme_moments_against_lp_oracle():
    lo, hi = lp_extremes([0.5, 0.375])
    assert np.isclose(lo, 9 / 32, atol=1e-9) and np.isclose(hi, 11 / 32, atol=1e-9)
    # a vector whose extremal measures sit on grid points
    m = moments_interval(IntervalAtomicMeasure([0.1, 0.45, 0.8], [0.2, 0.5, 0.3]), 3)
    lo, hi = lp_extremes(m, grid=2001)
    e_lo, e_hi = extreme_moments(m)
    assert e_lo <= lo + 1e-9 and hi <= e_hi + 1e-9
    assert abs(lo - e_lo) < 1e-5 and abs(hi - e_hi) < 1e-5


def test_extreme_moments_rejects_boundary():
    with pytest.raises(MomentSpaceViolation):
        extreme_moments([Fr(1, 2), Fr(1, 4)])


def test_canonical_examples():
    assert moments_to_canonical_real([0.5]).values == [0.5]
    assert moments_to_canonical_real([Fr(1, 2), Fr(3, 8)]).values == [Fr(1, 2), Fr(1, 2)]
    arcsine = [Fr(comb(2 * k, k), 4**k) for k in range(1, 5)]
    assert list(canonical_to_moments_real([Fr(1, 2)] * 4)) == arcsine
    assert list(canonical_to_moments_real([Fr(1)])) == [1]
    assert np.allclose(canonical_to_moments_real([1.0]), [1.0])


def test_arcsine_canonical_moments_are_half():
    arcsine = [comb(2 * k, k) / 4**k for k in range(1, 16)]
    p = moments_to_canonical_real(arcsine).values
    assert np.abs(np.array(p) - 0.5).max() < 1e-10


def test_errors():
    with pytest.raises(MomentSpaceViolation):
        moments_to_canonical_real([0.5, 0.6])
    with pytest.raises(MomentSpaceViolation):
        canonical_to_moments_real([1.2])
    # point mass at 1/2: the second moment range collapses
    with pytest.raises(Degenerate):
        moments_to_canonical_real([0.5, 0.25, 0.125])


def test_boundary_last_moment_is_terminal():
    p = moments_to_canonical_real([Fr(1, 2), Fr(1, 4)])
    assert p.values == [Fr(1, 2), 0]
    assert p.terminal == 0


@given(canonical_vectors(20))
@settings(max_examples=60, deadline=None)
def test_moment_canonical_moment_round_trip(p):
    # float64 only: beyond n ~ 20 the admissible range of m_n falls below moment rounding
    m = canonical_to_moments_real(p)
    back = canonical_to_moments_real(moments_to_canonical_real(m).values)
    assert np.abs(back - m).max() < 1e-10


@given(canonical_vectors(20))
@settings(max_examples=30, deadline=None)
def test_exact_round_trip(p):
    exact = [Fr(float(v)) for v in p]
    assert moments_to_canonical_real(list(canonical_to_moments_real(exact))).values == exact


@given(canonical_vectors(30))
@settings(max_examples=20, deadline=None)
def test_mpmath_round_trips(p):
    with mpmath.workdps(60):
        tol = mpmath.mpf(10) ** -50
        mp = [mpmath.mpf(float(v)) for v in p]
        m = list(canonical_to_moments_real(mp))
        back = moments_to_canonical_real(m, tol=tol).values
        assert max(abs(a - b) for a, b in zip(back, mp)) < 1e-40
        m_back = canonical_to_moments_real(back)
        assert max(abs(a - b) for a, b in zip(m_back, m)) < 1e-10


@given(canonical_vectors(12), st.data())
@settings(max_examples=40, deadline=None)
def test_triangularity(p, data):
    m = canonical_to_moments_real(p)
    k = data.draw(st.integers(1, len(m)))
    assert np.allclose(canonical_to_moments_real(p[:k]), m[:k], atol=0)


@given(interval_measures())
@settings(max_examples=60, deadline=None)
def test_reflection_rule(mu):
    n = 2 * len(mu) - 1
    p = canonical_moments_of_measure(mu, n)
    q = canonical_moments_of_measure(IntervalAtomicMeasure(1 - mu.points, mu.weights), n)
    odd = np.arange(n) % 2 == 0  # p_1, p_3, ...
    assert np.allclose(q[odd], 1 - p[odd], atol=1e-8)
    assert np.allclose(q[~odd], p[~odd], atol=1e-8)


def test_reflection_rule_exact():
    pts, w = [Fr(1, 5), Fr(1, 2), Fr(7, 8)], [Fr(1, 4), Fr(1, 4), Fr(1, 2)]
    mom = lambda xs: [sum(wi * x**k for x, wi in zip(xs, w)) for k in range(1, 6)]
    p = moments_to_canonical_real(mom(pts)).values
    q = moments_to_canonical_real(mom([1 - x for x in pts])).values
    assert q == [1 - v if i % 2 == 0 else v for i, v in enumerate(p)]


@given(interval_measures())
@settings(max_examples=60, deadline=None)
def test_canonical_moments_of_measure_matches_moment_route(mu):
    n = min(2 * len(mu) - 1, 7)
    exact_m = [sum(Fr(float(w)) * Fr(float(x)) ** k for x, w in zip(mu.points, mu.weights)) for k in range(1, n + 1)]
    exact_m = [v / sum(Fr(float(w)) for w in mu.weights) for v in exact_m]
    want = [float(v) for v in moments_to_canonical_real(exact_m).values]
    assert np.allclose(canonical_moments_of_measure(mu, n), want, atol=1e-8)


def test_chebyshev_lift_examples():
    assert np.allclose(chebyshev_lift([Fr(1, 2), Fr(3, 8)]), [0, 0])
    assert np.allclose(chebyshev_lift([1.0, 1.0, 1.0]), [1.0, 1.0, 1.0])
    with pytest.raises(MomentSpaceViolation):
        chebyshev_lift([0.5, 0.6])


@given(canonical_vectors(8))
@settings(max_examples=60, deadline=None)
def test_lift_relates_canonical_and_verblunsky(p):
    m = canonical_to_moments_real(p)
    c = moments_to_verblunsky(chebyshev_lift(m)).coefficients
    assert np.abs(c - (2 * p - 1)).max() < 1e-9


@given(canonical_vectors(16))
@settings(max_examples=30, deadline=None)
def test_exact_lift_relates_canonical_and_verblunsky(p):
    # the power-basis lift is ill-conditioned in floats; lift exactly, then round
    exact = [Fr(float(v)) for v in p]
    t = np.array([float(v) for v in chebyshev_lift(list(canonical_to_moments_real(exact)))])
    c = moments_to_verblunsky(t).coefficients
    assert np.abs(c - (2 * p - 1)).max() < 1e-9


def test_recurrence_examples():
    rec = recurrence_from_canonical([0.5] * 6)
    assert rec.diag[0] == 0.5
    assert np.allclose(rec.diag, 0.5)
    assert np.allclose(rec.offdiag ** 2, [1 / 8, 1 / 16, 1 / 16])
    rec = recurrence_from_canonical([1.0])
    assert np.allclose(rec.matrix(), [[1.0]])


@given(canonical_vectors(15))
@settings(max_examples=60, deadline=None)
def test_golub_welsch_consistency(p):
    rec = recurrence_from_canonical(p)
    assert np.all(rec.offdiag > 0)
    J = rec.matrix()
    vals, vecs = np.linalg.eigh(J)
    w = vecs[0] ** 2
    m = canonical_to_moments_real(p)
    # a k x k Jacobi matrix integrates polynomials of degree <= 2k - 1 exactly
    kmax = min(len(p), 2 * len(rec.diag) - 1)
    got = [np.dot(w, vals**k) for k in range(1, kmax + 1)]
    assert np.abs(np.array(got) - m[:kmax]).max() < 1e-9


def test_gauss_quadrature_examples():
    mu = gauss_quadrature([0.5, 0.5, 0.5, 0.0])
    assert np.allclose(mu.points, [(2 - np.sqrt(2)) / 4, (2 + np.sqrt(2)) / 4])
    assert np.allclose(mu.weights, [0.5, 0.5])
    mu = gauss_quadrature([0.5, 1.0])
    assert np.array_equal(mu.points, [0.0, 1.0]) and np.allclose(mu.weights, [0.5, 0.5])
    mu = gauss_quadrature([0.5, 0.5, 0.0])
    assert mu.points[0] == 0.0
    assert np.allclose(mu.points, [0, 0.75]) and np.allclose(mu.weights, [1 / 3, 2 / 3])
    with pytest.raises(ValueError):
        gauss_quadrature([0.5, 0.5])


def test_principal_representation_examples():
    mu = principal_representation([0.5, 0.375, 0.3125], "lower")
    assert support_structure(mu) == (False, False, 2)
    mu = principal_representation([0.5], "upper")
    assert np.array_equal(mu.points, [0.0, 1.0])
    mu = principal_representation([0.5, 0.375], "lower")
    assert support_structure(mu) == (True, False, 1)
    with pytest.raises(ValueError):
        principal_representation([0.5], "middle")


def test_principal_rep_spec_cases():
    assert PrincipalRepSpec.for_moments(5, "lower").structure(5) == (False, False, 3)
    assert PrincipalRepSpec.for_moments(5, "upper").structure(5) == (True, True, 2)
    assert PrincipalRepSpec.for_moments(4, "lower").structure(4) == (True, False, 2)
    assert PrincipalRepSpec.for_moments(4, "upper").structure(4) == (False, True, 2)


@given(st.integers(1, 9), st.integers(0, 2**32 - 1), st.sampled_from(["lower", "upper"]))
@settings(max_examples=80, deadline=None)
def test_principal_representations(n, seed, side):
    m = sample_uniform_moments(np.random.default_rng(seed), "interval", n)
    mu = principal_representation(m, side)
    assert np.abs(moments_interval(mu, n) - m).max() < 1e-10
    assert support_structure(mu) == PrincipalRepSpec.for_moments(n, side).structure(n)
    # extremality: the next moment is the bound
    lo, hi = extreme_moments(m)
    nxt = moments_interval(mu, n + 1)[-1]
    assert abs(nxt - (lo if side == "lower" else hi)) < 1e-9


def test_canonical_moments_of_atoms_terminates():
    p = canonical_moments_of_atoms(np.array([0.0, 1.0]), np.array([0.5, 0.5]), 2)
    assert np.allclose(p, [0.5, 1.0])
    with pytest.raises(Degenerate):
        canonical_moments_of_atoms(np.array([0.0, 1.0]), np.array([0.5, 0.5]), 3)
