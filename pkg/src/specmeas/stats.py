"""Goodness-of-fit and independence tests returning uniform report records."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special
from scipy import stats as sps

from .errors import BinUnderflow

__all__ = [
    "TestReport",
    "regularized_incomplete_beta",
    "regularized_incomplete_gamma",
    "ks_test",
    "two_sample_ks",
    "chi2_2d",
    "chi2_two_sample",
    "spearman",
    "spearman_report",
    "bonferroni",
]

MIN_KS_SAMPLES = 100
MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class TestReport:
    """Outcome of one hypothesis test; ``passed`` means p_value >= alpha."""

    __test__ = False

    name: str
    statistic: float
    p_value: float
    sample_size: int
    alpha: float
    passed: bool

    @classmethod
    def make(cls, name, statistic, p_value, n, alpha) -> "TestReport":
        p = float(min(max(p_value, 0.0), 1.0))
        return cls(name, float(statistic), p, int(n), float(alpha), bool(p >= alpha))

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: stat={self.statistic:.4g} p={self.p_value:.3g} n={self.sample_size}"


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """``I_x(a, b)``."""
    if not (a > 0 and b > 0) or not 0 <= x <= 1:
        raise ValueError("need a, b > 0 and x in [0, 1]")
    return float(special.betainc(a, b, x))


def regularized_incomplete_gamma(a: float, x: float) -> float:
    """Lower regularized ``P(a, x)``."""
    if not a > 0 or x < 0:
        raise ValueError("need a > 0 and x >= 0")
    return float(special.gammainc(a, x))


def ks_test(samples, cdf: Callable, alpha: float = 1e-3, name: str = "ks") -> TestReport:
    """One-sample Kolmogorov-Smirnov test with the asymptotic p-value."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < MIN_KS_SAMPLES:
        raise ValueError(f"KS needs at least {MIN_KS_SAMPLES} samples")
    res = sps.kstest(x, cdf, method="asymp")
    return TestReport.make(name, res.statistic, res.pvalue, x.size, alpha)


def two_sample_ks(a_samples, b_samples, alpha: float = 1e-3, name: str = "ks2") -> TestReport:
    a = np.asarray(a_samples, dtype=float).ravel()
    b = np.asarray(b_samples, dtype=float).ravel()
    if min(a.size, b.size) < MIN_KS_SAMPLES:
        raise ValueError(f"KS needs at least {MIN_KS_SAMPLES} samples per group")
    res = sps.ks_2samp(a, b, method="asymp")
    return TestReport.make(name, res.statistic, res.pvalue, a.size + b.size, alpha)


def _bin_masses(density, xedges, yedges, order):
    """Integral of density over each rectangle by tensor Gauss-Legendre."""
    t, wt = np.polynomial.legendre.leggauss(order)
    xl, xr = xedges[:-1], xedges[1:]
    yl, yr = yedges[:-1], yedges[1:]
    xs = 0.5 * (xl[:, None] + xr[:, None]) + 0.5 * (xr - xl)[:, None] * t  # (nx, order)
    ys = 0.5 * (yl[:, None] + yr[:, None]) + 0.5 * (yr - yl)[:, None] * t
    X = xs[:, None, :, None]
    Y = ys[None, :, None, :]
    vals = density(np.broadcast_to(X, (xs.shape[0], ys.shape[0], order, order)),
                   np.broadcast_to(Y, (xs.shape[0], ys.shape[0], order, order)))
    jac = 0.25 * (xr - xl)[:, None] * (yr - yl)[None, :]
    return jac * np.einsum("ijkl,k,l->ij", vals, wt, wt)


def chi2_2d(samples_2d, density: Callable, bins=(10, 10), ranges=None, alpha: float = 1e-3,
            name: str = "chi2_2d", quad_order: int = 12) -> TestReport:
    """Pearson chi-square of a 2-d histogram against ``density(x, y)``.

    Expected counts integrate the density over each bin; every expected count
    must be at least 5.  ``bins`` holds a count or an array of edges per axis.
    ``ranges`` defaults to the sample bounding box, but should be the
    density's support so that the masses add up to one.
    """
    s = np.asarray(samples_2d, dtype=float)
    if s.ndim != 2 or s.shape[1] != 2:
        raise ValueError("samples_2d must have shape (n, 2)")
    if np.isscalar(bins):
        bins = (bins, bins)
    bins = [np.asarray(b) if np.ndim(b) else int(b) for b in bins]
    if ranges is None:
        ranges = [(s[:, 0].min(), s[:, 0].max()), (s[:, 1].min(), s[:, 1].max())]
    obs, xe, ye = np.histogram2d(s[:, 0], s[:, 1], bins=bins, range=ranges)
    exp = _bin_masses(density, xe, ye, quad_order)
    exp = exp / exp.sum() * s.shape[0]
    if exp.min() < MIN_EXPECTED:
        raise BinUnderflow(f"smallest expected count {exp.min():.3g} < {MIN_EXPECTED}")
    stat = float(((obs - exp) ** 2 / exp).sum())
    dof = obs.size - 1
    return TestReport.make(name, stat, special.gammaincc(dof / 2, stat / 2), s.shape[0], alpha)


def chi2_two_sample(a_samples, b_samples, bins, ranges, alpha: float = 1e-3,
                    name: str = "chi2_two_sample") -> TestReport:
    """Chi-square homogeneity test of two d-dimensional samples on a common grid.

    Bins with fewer than 5 expected counts in either sample are pooled into a
    single remainder cell.
    """
    a = np.asarray(a_samples, dtype=float)
    b = np.asarray(b_samples, dtype=float)
    ha, _ = np.histogramdd(a, bins=bins, range=ranges)
    hb, _ = np.histogramdd(b, bins=bins, range=ranges)
    ha, hb = ha.ravel(), hb.ravel()
    na, nb = ha.sum(), hb.sum()
    tot = ha + hb
    ea, eb = tot * na / (na + nb), tot * nb / (na + nb)
    keep = (ea >= MIN_EXPECTED) & (eb >= MIN_EXPECTED)
    if keep.sum() < 2:
        raise BinUnderflow("fewer than two bins with enough expected counts")
    oa = np.append(ha[keep], ha[~keep].sum())
    ob = np.append(hb[keep], hb[~keep].sum())
    ea = np.append(ea[keep], ea[~keep].sum())
    eb = np.append(eb[keep], eb[~keep].sum())
    if ea[-1] < MIN_EXPECTED or eb[-1] < MIN_EXPECTED:
        oa, ob, ea, eb = oa[:-1], ob[:-1], ea[:-1], eb[:-1]
        # remainder too small to test; drop it and renormalise the rest
        sa, sb = oa.sum(), ob.sum()
        ea = (oa + ob) * sa / (sa + sb)
        eb = (oa + ob) * sb / (sa + sb)
    stat = float(((oa - ea) ** 2 / ea).sum() + ((ob - eb) ** 2 / eb).sum())
    dof = oa.size - 1
    return TestReport.make(name, stat, special.gammaincc(dof / 2, stat / 2), int(na + nb), alpha)


def spearman(a, b) -> float:
    """Spearman rank correlation."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size != b.size or a.size < 3:
        raise ValueError("need two samples of equal length >= 3")
    return float(sps.spearmanr(a, b).statistic)


def spearman_report(a, b, bound: float = 0.05, alpha: float = 1e-3, name: str = "spearman") -> TestReport:
    """Independence check: passes when ``|rho| < bound``.  The p-value is the
    large-sample normal approximation ``rho sqrt(n - 1) ~ N(0, 1)``."""
    rho = spearman(a, b)
    n = np.asarray(a).size
    p = float(special.erfc(abs(rho) * np.sqrt(n - 1) / np.sqrt(2)))
    return TestReport(name, rho, p, int(n), float(alpha), bool(abs(rho) < bound))


def bonferroni(alpha: float, m: int) -> float:
    """Per-test level for a family of `m` tests at family level `alpha`."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return alpha / m
