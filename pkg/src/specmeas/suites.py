"""Named statistical batteries checking the ensemble samplers against their laws.

Each suite draws its own sample from an explicit generator and returns a
list of :class:`~specmeas.stats.TestReport`.  KS tests use the Bonferroni
level ``alpha / m`` with m the number of distributional tests in the suite;
independence and structural checks are reported alongside and must hold
outright.  ``negative=True`` draws from a deliberately wrong law while
keeping the hypotheses, which should make the suite fail.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy import stats as sps

from .canonical import canonical_moments_of_atoms, support_structure, PrincipalRepSpec
from .matrix_models import dual_compose, haar_special_orthogonal, haar_unitary_coefficients, spectral_measure
from .measures import is_symmetric, project_R
from .opuc import verblunsky_from_atoms
from .samplers import (
    bizth_dimension,
    sample_bizth_batch,
    sample_cbe_batch,
    sample_eta,
    sample_jacobi_batch,
    sample_so2n_batch,
    sample_jtilde_batch,
    sample_sun_batch,
    sample_beta,
)
from .stats import TestReport, bonferroni, chi2_2d, ks_test, spearman_report, two_sample_ks

__all__ = [
    "SUITES",
    "run_suite",
    "eta_cdf",
    "beta_s_cdf",
    "jacobi_rejection",
    "cbe_suite",
    "circle_uniform_suite",
    "cross_validation_suite",
    "sun_suite",
    "so2n_suite",
    "jacobi_suite",
    "bizth_suite",
    "unif2_suite",
    "eta_suite",
]


def eta_cdf(r: float):
    """CDF of ``|z|^2`` under eta_r: ``1 - (1 - b)^(r+1)``."""
    return lambda b: 1.0 - (1.0 - np.clip(b, 0.0, 1.0)) ** (r + 1.0)


def beta_s_cdf(a: float, b: float):
    """CDF of Beta_s(a, b) (density ~ (1-x)^(a-1) (1+x)^(b-1))."""
    return lambda x: sps.beta(a, b).sf((1.0 - np.asarray(x)) / 2.0)


def _uniform_angle_cdf(t):
    return (np.asarray(t) + np.pi) / (2 * np.pi)


def _struct(name: str, ok: bool, stat: float, n: int) -> TestReport:
    return TestReport(name, float(stat), 1.0 if ok else 0.0, int(n), 0.0, bool(ok))


def _finalize(ks_specs, extra, alpha):
    """Run the KS tests at the Bonferroni level and append the extra reports."""
    level = bonferroni(alpha, max(len(ks_specs), 1))
    out = []
    for name, fn in ks_specs:
        out.append(fn(level, name))
    return out + extra


def _disk_tests(coeffs, laws, alpha, prefix, with_spearman=True, angle_coords=None):
    """KS on |c_j|^2 against eta laws and on arg c_j against uniform."""
    specs = []
    for j, r in enumerate(laws):
        c = coeffs[:, j]
        specs.append((f"{prefix}|c_{j+1}|^2 ~ eta_{r:g}",
                      lambda lv, nm, c=c, r=r: ks_test(np.abs(c) ** 2, eta_cdf(r), lv, nm)))
    for j in (range(len(laws)) if angle_coords is None else angle_coords):
        c = coeffs[:, j]
        specs.append((f"{prefix}arg c_{j+1} uniform",
                      lambda lv, nm, c=c: ks_test(np.angle(c), _uniform_angle_cdf, lv, nm)))
    extra = []
    if with_spearman:
        for i, j in combinations(range(len(laws)), 2):
            extra.append(spearman_report(np.abs(coeffs[:, i]), np.abs(coeffs[:, j]),
                                         name=f"{prefix}spearman(|c_{i+1}|, |c_{j+1}|)"))
    return specs, extra


def cbe_suite(rng, N: int, beta: float = 2.0, samples: int = 10_000, alpha: float = 1e-3,
              negative: bool = False) -> list[TestReport]:
    """Coefficients re-extracted from CbetaE measures against their laws."""
    angles, weights, _ = sample_cbe_batch(rng, N, beta + 2.0 if negative else beta, samples)
    c = verblunsky_from_atoms(np.exp(1j * angles), weights, N)
    laws = [beta * (N - j) / 2 - 1 for j in range(1, N)]
    specs, extra = _disk_tests(c, laws, alpha, "cbe ")
    specs.append(("cbe arg c_N uniform", lambda lv, nm: ks_test(np.angle(c[:, -1]), _uniform_angle_cdf, lv, nm)))
    if N > 1:
        law = sps.beta(beta / 2, (N - 1) * beta / 2)
        specs.append(("cbe w_1 ~ Beta(beta/2, (N-1)beta/2)", lambda lv, nm: ks_test(weights[:, 0], law.cdf, lv, nm)))
    return _finalize(specs, extra, alpha)


def circle_uniform_suite(rng, N: int, samples: int = 10_000, alpha: float = 1e-3,
                         negative: bool = False) -> list[TestReport]:
    """Haar unitary matrices: ``c_j ~ eta_{N-1-j}`` for j < N (so that the
    first N - 1 moments are uniform on the moment space), arguments uniform,
    coordinates uncorrelated."""
    if negative:
        angles, weights, _ = sample_cbe_batch(rng, N, 4.0, samples)
        c = verblunsky_from_atoms(np.exp(1j * angles), weights, N)
    else:
        _, _, c, _ = haar_unitary_coefficients(rng, N, samples)
    laws = [N - 1 - j for j in range(1, N)]
    specs, extra = _disk_tests(c[:, : N - 1], laws, alpha, "cue ")
    return _finalize(specs, extra, alpha)


def cross_validation_suite(rng, N: int, samples: int = 10_000, alpha: float = 1e-3,
                           negative: bool = False) -> list[TestReport]:
    """Two-sample KS, coefficient route (CbetaE, beta = 2) against Haar matrices."""
    r1, r2 = rng.spawn(2)
    angles, weights, _ = sample_cbe_batch(r1, N, 4.0 if negative else 2.0, samples)
    c1 = verblunsky_from_atoms(np.exp(1j * angles), weights, N)
    _, _, c2, _ = haar_unitary_coefficients(r2, N, samples)
    specs = []
    for j in range(N - 1):
        for part, fn in (("Re", np.real), ("Im", np.imag)):
            a, b = fn(c1[:, j]), fn(c2[:, j])
            specs.append((f"xval {part} c_{j+1}", lambda lv, nm, a=a, b=b: two_sample_ks(a, b, lv, nm)))
    return _finalize(specs, [], alpha)


def sun_suite(rng, N: int, samples: int = 10_000, alpha: float = 1e-3, negative: bool = False) -> list[TestReport]:
    if negative:
        angles, weights, _ = sample_cbe_batch(rng, N, 4.0, samples)
    else:
        angles, weights, _ = sample_sun_batch(rng, N, samples)
    c = verblunsky_from_atoms(np.exp(1j * angles), weights, N)
    dev = np.abs(np.exp(1j * angles.sum(axis=1)) - 1.0).max()
    laws = [N - 1 - j for j in range(1, N)]
    specs, extra = _disk_tests(c[:, : N - 1], laws, alpha, "sun ")
    extra.append(_struct("sun det = 1 on every draw", dev <= 1e-8, dev, samples))
    return _finalize(specs, extra, alpha)


def _real_coefficients(angles, weights, n):
    """Real parts of the re-extracted coefficients, plus the largest
    deviation from the symmetric structure (imaginary parts, and c_n + 1).

    Re-extraction loses about eps / rho_{k-1} at step k, with
    ``rho_k = prod_{j <= k} (1 - |c_j|^2)``, so deviations are scaled by rho.
    """
    c = verblunsky_from_atoms(np.exp(1j * angles), weights, n)
    rho = np.cumprod(1 - np.abs(c[:, :-1]) ** 2, axis=1)
    rho = np.column_stack([np.ones(len(c)), rho])
    dev = np.abs(c.imag)
    dev[:, -1] = np.maximum(dev[:, -1], np.abs(c[:, -1] + 1))
    return c.real, float((dev * rho).max())


def so2n_suite(rng, N: int, samples: int = 10_000, alpha: float = 1e-3, negative: bool = False) -> list[TestReport]:
    """Haar SO(2N) coefficients ``c_k ~ Beta_s((2N-k)/2, (2N-k)/2)`` and folded
    weights ``Dir_N(1)``."""
    if negative:
        angles, weights, _ = sample_jtilde_batch(rng, N, 2.0, 1.5, 1.5, samples)
    else:
        angles, weights, _ = sample_so2n_batch(rng, N, samples)
    c, imag = _real_coefficients(angles, weights, 2 * N)
    specs = []
    for k in range(1, 2 * N):
        A = (2 * N - k) / 2
        specs.append((f"so2n c_{k} ~ Beta_s({A:g}, {A:g})",
                      lambda lv, nm, x=c[:, k - 1], A=A: ks_test(x, beta_s_cdf(A, A), lv, nm)))
    if N > 1:
        # weights are independent of the atoms, so any fixed pair has the Dir_N(1) marginal
        pair_w = 2 * weights[:, -1]
        specs.append(("so2n folded w' ~ Beta(1, N-1)",
                      lambda lv, nm: ks_test(pair_w, sps.beta(1, N - 1).cdf, lv, nm)))
    extra = [_struct("so2n real coefficients and c_2N = -1", imag <= 1e-10, imag, samples)]
    return _finalize(specs, extra, alpha)


def jacobi_suite(rng, N: int, beta: float, samples: int = 10_000, alpha: float = 1e-3,
                 negative: bool = False) -> list[TestReport]:
    """Jacobi ensemble with a = b = beta/4: canonical moments
    ``p_k ~ Beta((2N-k) beta/4, (2N-k) beta/4)``, k < 2N."""
    a = beta / 4 + (1.0 if negative else 0.0)
    x, w = sample_jacobi_batch(rng, N, beta, a, a, samples)
    P = np.array([canonical_moments_of_atoms(xi, wi / wi.sum(), 2 * N - 1) for xi, wi in zip(x, w)])
    specs = []
    for k in range(1, 2 * N):
        A = (2 * N - k) * beta / 4
        specs.append((f"jacobi(beta={beta:g}) p_{k} ~ Beta({A:g}, {A:g})",
                      lambda lv, nm, p=P[:, k - 1], A=A: ks_test(p, sps.beta(A, A).cdf, lv, nm)))
    return _finalize(specs, [], alpha)


def jacobi_rejection(rng, N: int, beta: float, a: float, b: float, size: int) -> np.ndarray:
    """Sorted draws from ``|Delta(x)|^beta prod x^(b-1) (1-x)^(a-1)`` on [0,1]^N
    by rejection from independent Beta(b, a) proposals (|Delta|^beta <= 1)."""
    out = []
    have = 0
    while have < size:
        m = 20 * (size - have) + 1000
        x = sample_beta(rng, b, a, (m, N))
        acc = np.ones(m)
        for i, j in combinations(range(N), 2):
            acc *= np.abs(x[:, i] - x[:, j]) ** beta
        keep = rng.random(m) < acc
        out.append(np.sort(x[keep], axis=1))
        have += int(keep.sum())
    return np.concatenate(out)[:size]


def bizth_suite(rng, case: int, N: int, samples: int = 10_000, alpha: float = 1e-3,
                negative: bool = False) -> list[TestReport]:
    """Principal representations of uniform moment vectors: canonical moments
    ``p_j ~ Beta(n-j+1, n-j+1)``, exact endpoint structure, and for case 2 at
    N = 2 a two-sample comparison with direct J(4, 1, 3, 2) rejection draws."""
    n, pad = bizth_dimension(case, N)
    r1, r2 = rng.spawn(2)
    if negative:
        # p_j drawn one Beta parameter too wide
        from .canonical import gauss_quadrature
        ms = [gauss_quadrature([float(sample_beta(r1, n - j + 2, n - j + 2)) for j in range(1, n + 1)] + [pad])
              for _ in range(samples)]
    else:
        ms = sample_bizth_batch(r1, case, N, samples)
    side = "lower" if pad == 0.0 else "upper"
    want = PrincipalRepSpec.for_moments(n, side).structure(n)
    structs = [support_structure(m) for m in ms]
    bad = sum(s != want for s in structs)
    P = np.array([canonical_moments_of_atoms(m.points, m.weights, n) for m in ms])
    specs = []
    for j in range(1, n + 1):
        A = n - j + 1
        specs.append((f"bizth{case} N={N} p_{j} ~ Beta({A}, {A})",
                      lambda lv, nm, p=P[:, j - 1], A=A: ks_test(p, sps.beta(A, A).cdf, lv, nm)))
    if case == 2 and N == 2:
        ref = jacobi_rejection(r2, 2, 4.0, 1.0, 3.0, samples)
        inner = np.array([m.points[m.points > 0] for m in ms])
        for i in range(2):
            specs.append((f"bizth2 x_({i+1}) vs J(4,1,3,2) rejection",
                          lambda lv, nm, u=inner[:, i], v=ref[:, i]: two_sample_ks(u, v, lv, nm)))
        w0 = np.array([m.weights[0] for m in ms])
        specs.append(("bizth2 w_0 ~ Beta(1, 4)", lambda lv, nm: ks_test(w0, sps.beta(1, 4).cdf, lv, nm)))
    extra = [_struct(f"bizth{case} N={N} support structure {want}", bad == 0, bad, samples)]
    return _finalize(specs, extra, alpha)


def unif2_suite(rng, n: int, samples: int = 5_000, alpha: float = 1e-3, negative: bool = False,
                merge_tol: float = 1e-6) -> list[TestReport]:
    """``g^D g`` for Haar g in SO(2n): the folded spectral measure has moments
    uniform on M_{n-1}, i.e. ``p_j ~ Beta(n-j, n-j)`` for j < n."""
    P = np.empty((samples, n - 1))
    asym = 0
    for i in range(samples):
        g = haar_special_orthogonal(rng, 2 * n)
        U = g if negative else dual_compose(g)
        mu = spectral_measure(U, merge_tol=merge_tol)
        if not is_symmetric(mu, 1e-7):
            asym += 1
            P[i] = np.nan
            continue
        gam = project_R(mu, 1e-7)
        P[i] = canonical_moments_of_atoms(gam.points, gam.weights, n - 1)
    P = P[~np.isnan(P[:, 0])]
    specs = []
    for j in range(1, n):
        A = n - j
        specs.append((f"unif2 n={n} p_{j} ~ Beta({A}, {A})",
                      lambda lv, nm, p=P[:, j - 1], A=A: ks_test(p, sps.beta(A, A).cdf, lv, nm)))
    extra = [_struct("unif2 symmetric spectral measure on every draw", asym == 0, asym, samples)]
    return _finalize(specs, extra, alpha)


def eta_suite(rng, samples: int = 10_000, alpha: float = 1e-3, negative: bool = False,
              rs=(0.0, 1.0, 2.5)) -> list[TestReport]:
    """2-d chi-square of ``(|z|^2, arg z)`` against ``(r+1)(1-b)^r / (2 pi)``.

    Radial bins are equiprobable under the null.  The negative control draws
    ``|z|^2 ~ Beta(1, r)`` (Beta(1, 1/2) at r = 0) instead of Beta(1, r+1).
    """
    specs = []
    for r in rs:
        if negative:
            u = sample_beta(rng, 1.0, r if r > 0 else 0.5, samples)
            z = np.sqrt(u) * np.exp(1j * rng.uniform(-np.pi, np.pi, samples))
        else:
            z = sample_eta(rng, r, samples)
        pts = np.column_stack([np.abs(z) ** 2, np.angle(z)])
        q = np.linspace(0.0, 1.0, 11)
        edges = 1.0 - (1.0 - q) ** (1.0 / (r + 1.0))
        dens = lambda b, t, r=r: (r + 1.0) * (1.0 - b) ** r / (2 * np.pi)
        specs.append((f"eta_{r:g} 2-d chi2",
                      lambda lv, nm, pts=pts, edges=edges, dens=dens: chi2_2d(
                          pts, dens, bins=(edges, 10), ranges=[(0, 1), (-np.pi, np.pi)], alpha=lv, name=nm)))
    return _finalize(specs, [], alpha)


SUITES = {
    "cbe": cbe_suite,
    "uniform-moments-circle": circle_uniform_suite,
    "cross-validation": cross_validation_suite,
    "sun": sun_suite,
    "so2n": so2n_suite,
    "jacobi": jacobi_suite,
    "bizth": bizth_suite,
    "unif2": unif2_suite,
    "eta": eta_suite,
}


def run_suite(name: str, rng, *, n: int = 6, beta: float = 2.0, case: int = 1, samples: int = 10_000,
              alpha: float = 1e-3, negative: bool = False) -> list[TestReport]:
    """Dispatch by suite name with the CLI's parameter set."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    if name == "cbe":
        return cbe_suite(rng, n, beta, samples, alpha, negative)
    if name == "jacobi":
        return jacobi_suite(rng, n, beta, samples, alpha, negative)
    if name == "bizth":
        return bizth_suite(rng, case, n, samples, alpha, negative)
    if name == "eta":
        return eta_suite(rng, samples, alpha, negative)
    return SUITES[name](rng, n, samples, alpha, negative)
