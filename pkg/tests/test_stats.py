import json

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from specmeas import BinUnderflow
from specmeas.stats import (
    TestReport,
    bonferroni,
    chi2_2d,
    chi2_two_sample,
    ks_test,
    regularized_incomplete_beta,
    regularized_incomplete_gamma,
    spearman,
    spearman_report,
    two_sample_ks,
)

params = st.floats(0.05, 30.0)
unit = st.floats(0.0, 1.0)


def test_report_clamps_and_serializes():
    r = TestReport.make("t", 1.5, 1.0000001, 100, 1e-3)
    assert r.p_value == 1.0 and r.passed
    r = TestReport.make("t", 9.0, -1e-18, 100, 1e-3)
    assert r.p_value == 0.0 and not r.passed
    back = json.loads(r.to_json())
    assert back == r.to_dict() and back["sample_size"] == 100
    assert r.line().startswith("FAIL t:")


def test_incomplete_beta_examples():
    for x in (0.0, 0.2, 0.77, 1.0):
        assert abs(regularized_incomplete_beta(1, 1, x) - x) < 1e-15
    assert abs(regularized_incomplete_beta(0.5, 0.5, 0.5) - 0.5) < 1e-14
    x = 0.4
    assert abs(regularized_incomplete_beta(2, 3, x) - (6 * x**2 - 8 * x**3 + 3 * x**4)) < 1e-14
    assert abs(regularized_incomplete_beta(2, 3, 0.4) - 0.5248) < 1e-14
    with pytest.raises(ValueError):
        regularized_incomplete_beta(0, 1, 0.5)
    with pytest.raises(ValueError):
        regularized_incomplete_beta(1, 1, 1.5)


@given(params, params, unit)
@settings(max_examples=200, deadline=None)
def test_incomplete_beta_reflection(a, b, x):
    # make x and 1 - x both exact so the identity is testable in floating point
    x = 1.0 - (1.0 - x)
    assert abs(regularized_incomplete_beta(a, b, x) + regularized_incomplete_beta(b, a, 1 - x) - 1) < 1e-12


@given(params, params, unit)
@settings(max_examples=60, deadline=None)
def test_incomplete_beta_against_mpmath(a, b, x):
    with mpmath.workdps(40):
        ref = float(mpmath.betainc(a, b, 0, x, regularized=True))
    assert abs(regularized_incomplete_beta(a, b, x) - ref) < 1e-12


@given(params, st.floats(0.0, 80.0))
@settings(max_examples=60, deadline=None)
def test_incomplete_gamma_against_mpmath(a, x):
    with mpmath.workdps(40):
        ref = float(mpmath.gammainc(a, 0, x, regularized=True))
    assert abs(regularized_incomplete_gamma(a, x) - ref) < 1e-12


def test_ks_calibration():
    rng = np.random.default_rng(11)
    p = np.array([ks_test(rng.random(200), sps.uniform.cdf).p_value for _ in range(1000)])
    assert np.mean(p < 1e-3) <= 0.005
    # and the null p-values are themselves roughly uniform
    assert sps.kstest(p, "uniform").pvalue > 1e-3


def test_ks_negative_control_and_two_sample():
    rng = np.random.default_rng(12)
    assert ks_test(rng.normal(0.3, 1, 5000), sps.norm.cdf).p_value < 1e-6
    x = rng.random(500)
    same = two_sample_ks(x, x)
    assert same.statistic == 0 and same.passed
    assert two_sample_ks(rng.random(4000), rng.random(4000) ** 1.3).p_value < 1e-6
    with pytest.raises(ValueError):
        ks_test(rng.random(99), sps.uniform.cdf)
    with pytest.raises(ValueError):
        two_sample_ks(rng.random(99), rng.random(500))


def _product_density(x, y):
    return 6 * x * (1 - x) * np.ones_like(y)


def test_chi2_2d_calibration_and_negative_control():
    rng = np.random.default_rng(13)
    ranges = [(0, 1), (0, 1)]
    p = []
    for _ in range(200):
        s = np.column_stack([rng.beta(2, 2, 2000), rng.random(2000)])
        p.append(chi2_2d(s, _product_density, bins=(6, 6), ranges=ranges).p_value)
    p = np.array(p)
    assert np.mean(p < 1e-3) <= 0.02
    assert sps.kstest(p, "uniform").pvalue > 1e-3
    bad = np.column_stack([rng.random(5000), rng.random(5000)])
    assert chi2_2d(bad, _product_density, bins=(6, 6), ranges=ranges).p_value < 1e-6


def test_chi2_2d_bin_underflow_and_shape():
    rng = np.random.default_rng(14)
    s = rng.random((50, 2))
    with pytest.raises(BinUnderflow):
        chi2_2d(s, lambda x, y: np.ones_like(x), bins=(10, 10), ranges=[(0, 1), (0, 1)])
    with pytest.raises(ValueError):
        chi2_2d(rng.random((50, 3)), lambda x, y: np.ones_like(x))


def test_chi2_two_sample():
    rng = np.random.default_rng(15)
    ranges = [(0, 1), (0, 1)]
    a, b = rng.random((4000, 2)), rng.random((4000, 2))
    assert chi2_two_sample(a, b, bins=(5, 5), ranges=ranges).passed
    c = rng.beta(2, 1, (4000, 2))
    assert chi2_two_sample(a, c, bins=(5, 5), ranges=ranges).p_value < 1e-6
    with pytest.raises(BinUnderflow):
        chi2_two_sample(a[:3], b[:3], bins=(5, 5), ranges=ranges)


def test_spearman():
    rng = np.random.default_rng(16)
    x = rng.standard_normal(1000)
    assert spearman(x, x) == pytest.approx(1.0)
    assert spearman(x, -x ** 3) == pytest.approx(-1.0)
    u, v = rng.random(10_000), rng.random(10_000)
    assert abs(spearman(u, v)) < 0.05
    rep = spearman_report(u, v)
    assert rep.passed and 0 <= rep.p_value <= 1
    assert not spearman_report(u, u + 0.1 * v).passed
    with pytest.raises(ValueError):
        spearman([1, 2], [1, 2])


def test_bonferroni():
    assert bonferroni(1e-3, 20) == pytest.approx(5e-5)
    assert bonferroni(0.05, 1) == 0.05
    with pytest.raises(ValueError):
        bonferroni(0.05, 0)
