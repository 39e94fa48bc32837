"""Large-deviation experiments for linear statistics of random spectral measures.

The rate of ``mu_N(f) >= x`` under the circular ensembles is
``(beta/2) J(x)`` with ``J(x) = inf { K(lambda | mu) : mu(f) = x }`` and the
reversed Kullback information ``K(lambda | mu) = -int log(dmu/dlambda) dlambda``.
The infimum is attained at ``dmu/dlambda = 1 / (a f + b)``; (a, b) solve two
moment equations, which is what :func:`solve_tilt` does.

Interval test functions are handled by lifting to the circle through
``x = (1 + cos theta) / 2``: the uniform law on the circle pushes forward to
the arcsine law, so the same machinery gives the arcsine-reference rate.
"""
from __future__ import annotations

import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import GridMismatch, InsideSpectrum, NewtonDivergence, OutOfRange, ZeroHits
from .samplers import EnsembleSpec, sample_ensemble_batch

__all__ = [
    "TestFunction",
    "RateEstimate",
    "reversed_kullback",
    "solve_tilt",
    "rate_linear_statistic",
    "dual_objective",
    "linear_statistic",
    "mc_tail",
    "stieltjes_transform",
    "stieltjes_limits",
    "r_transform",
    "spherical_limit",
    "mc_spherical",
]

NEWTON_TOL = 1e-10
NEWTON_MAXIT = 500
CHUNK = 4096
N_BATCHES = 20
T_975_19 = 2.093  # Student t, 19 degrees of freedom


@dataclass(frozen=True)
class TestFunction:
    """A bounded continuous function on the circle (angles) or on [0, 1].

    ``grid_size`` nodes of the periodic trapezoidal rule are used for the
    rate solver; ``grid='midpoint'`` shifts the nodes by half a step, which
    avoids sampling a kink at theta = 0.  ``fmin``/``fmax`` may be given
    when the extremes are known exactly; otherwise they are located on the
    grid and polished with a bounded scalar search.
    """

    __test__ = False

    func: Callable
    grid_size: int = 4096
    domain: Literal["circle", "interval"] = "circle"
    name: str = "f"
    grid: Literal["endpoint", "midpoint"] = "endpoint"
    fmin: float | None = None
    fmax: float | None = None

    def __post_init__(self):
        if self.domain not in ("circle", "interval"):
            raise ValueError("domain must be 'circle' or 'interval'")
        if self.grid_size < 8:
            raise ValueError("grid_size must be at least 8")
        vals = self.values
        if not np.all(np.isfinite(vals)):
            raise ValueError("test function must be finite on the grid")
        lo, hi = self._polish(vals)
        object.__setattr__(self, "fmin", lo)
        object.__setattr__(self, "fmax", hi)

    # circle representation -------------------------------------------------
    def on_circle(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.domain == "circle":
            return np.asarray(self.func(theta), dtype=float) * np.ones_like(theta)
        return np.asarray(self.func(0.5 * (1.0 + np.cos(theta))), dtype=float) * np.ones_like(theta)

    def __call__(self, t):
        """Evaluate on the native domain (angles or points of [0, 1])."""
        t = np.asarray(t, dtype=float)
        return np.asarray(self.func(t), dtype=float) * np.ones_like(t)

    @property
    def nodes(self) -> np.ndarray:
        M = self.grid_size
        shift = 0.5 if self.grid == "midpoint" else 0.0
        return -np.pi + 2 * np.pi * (np.arange(M) + shift) / M

    @property
    def values(self) -> np.ndarray:
        return self.on_circle(self.nodes)

    def mean(self) -> float:
        """``lambda(f)`` (uniform reference on the circle, arcsine on [0, 1])."""
        return float(self.values.mean())

    def _polish(self, vals):
        h = 2 * np.pi / self.grid_size
        out = []
        for sign, given in ((1.0, self.fmin), (-1.0, self.fmax)):
            if given is not None:
                out.append(float(given))
                continue
            k = int(np.argmin(sign * vals))
            t0 = self.nodes[k]
            # stay inside [-pi, pi]: callables need not be written periodically
            lo_t, hi_t = max(t0 - h, -np.pi), min(t0 + h, np.pi)
            res = optimize.minimize_scalar(lambda t: sign * float(self.on_circle(t)), bounds=(lo_t, hi_t),
                                           method="bounded", options={"xatol": 1e-13})
            ends = sign * self.on_circle(np.array([lo_t, hi_t]))
            out.append(float(min(sign * vals[k], res.fun, ends.min()) * sign))
        lo, hi = out
        if lo > vals.min() + 1e-12 or hi < vals.max() - 1e-12:
            raise ValueError("fmin/fmax do not bracket the sampled values")
        return lo, hi

    def describe(self) -> dict:
        return {"name": self.name, "domain": self.domain, "grid_size": self.grid_size, "grid": self.grid}

    def quad(self, g: Callable, points=()) -> float:
        """Adaptive integral of ``g(theta)`` against the uniform law on the circle."""
        pts = sorted({float(p) for p in points if -np.pi < p < np.pi})
        with warnings.catch_warnings():
            # tolerances are deliberately tight; roundoff notices are expected near the edge
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(g, -np.pi, np.pi, points=pts or None, limit=400, epsabs=1e-14, epsrel=1e-13)
        return val / (2 * np.pi)


def linear_statistic(f: TestFunction, support, weights) -> np.ndarray:
    """``mu(f) = sum_k w_k f(x_k)`` along the last axis."""
    return np.sum(np.asarray(weights) * f(support), axis=-1)


# reversed Kullback and the tilted minimiser -------------------------------

def reversed_kullback(reference_density, mu_density, grid=None) -> float:
    """``K(ref | mu) = int log(ref / mu) ref``.

    Densities are sampled on a common grid.  Without ``grid`` the nodes are
    taken to be equispaced on the circle and the densities are relative to
    the uniform probability (so the integral is a plain mean); with ``grid``
    (increasing nodes) the trapezoidal rule on those nodes is used.  Returns
    ``math.inf`` when mu vanishes where the reference does not.
    """
    ref = np.asarray(reference_density, dtype=float)
    mu = np.asarray(mu_density, dtype=float)
    if ref.shape != mu.shape or ref.ndim != 1:
        raise GridMismatch("densities must be 1-d arrays on the same grid")
    if np.any(ref < 0) or np.any(mu < 0):
        raise ValueError("densities must be nonnegative")
    if grid is None:
        wq = np.full(ref.size, 1.0 / ref.size)
    else:
        x = np.asarray(grid, dtype=float)
        if x.shape != ref.shape:
            raise GridMismatch("grid and densities differ in length")
        wq = np.zeros_like(x)
        dx = np.diff(x)
        wq[:-1] += dx / 2
        wq[1:] += dx / 2
    total = float(wq @ ref)
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"reference integrates to {total!r}, not 1")
    pos = ref > 0
    if np.any(pos & (mu == 0)):
        return math.inf
    return float(np.sum(wq[pos] * ref[pos] * np.log(ref[pos] / mu[pos])))


def _tilt_terms(vals, a, b):
    g = a * vals + b
    if np.any(g <= 0):
        return None
    r = 1.0 / g
    return g, r


def solve_tilt(f: TestFunction, x: float) -> tuple[float, float, float]:
    """(a, b, J) with ``mean(1/(a f + b)) = 1``, ``mean(f/(a f + b)) = x``
    and ``J = mean(log(a f + b))``.

    Damped Newton ascent on the concave dual
    ``D(a, b) = 1 + mean(log(a f + b)) - a x - b``, whose gradient is the
    pair of moment residuals.
    """
    vals = f.values
    lo, hi = vals.min(), vals.max()
    if not lo < x < hi:
        raise OutOfRange(f"x = {x} outside the open range ({lo:.6g}, {hi:.6g}) of f")

    def dual(a, b):
        t = _tilt_terms(vals, a, b)
        return -np.inf if t is None else 1.0 + np.log(t[0]).mean() - a * x - b

    a, b = 0.0, 1.0
    for _ in range(NEWTON_MAXIT):
        g, r = _tilt_terms(vals, a, b)
        grad = np.array([(vals * r).mean() - x, r.mean() - 1.0])
        if np.abs(grad).max() < NEWTON_TOL:
            return a, b, float(np.log(g).mean())
        r2 = r * r
        H = -np.array([[(vals * vals * r2).mean(), (vals * r2).mean()],
                       [(vals * r2).mean(), r2.mean()]])
        step = np.linalg.solve(H, -grad)
        d0, t = dual(a, b), 1.0
        while t > 1e-16:
            if dual(a + t * step[0], b + t * step[1]) >= d0 + 1e-4 * t * grad @ step:
                break
            t *= 0.5
        else:
            break
        a, b = a + t * step[0], b + t * step[1]
    raise NewtonDivergence(f"tilt equations unsolved after {NEWTON_MAXIT} iterations (x = {x})")


def rate_linear_statistic(f: TestFunction, x: float, beta: float) -> float:
    """``(beta/2) J(x)``: the speed-N rate of ``mu_N(f) ~ x``."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    if abs(x - f.mean()) < 1e-14:
        return 0.0
    return 0.5 * beta * solve_tilt(f, x)[2]


def dual_objective(f: TestFunction, a: float, b: float, s: float) -> float:
    """Value of ``int g dmu* + int log(1 - g) dlambda`` for
    ``g = s (1 - (a f + b))`` and the tilted density ``m* = 1/(a f + b)``."""
    vals = f.values
    h = a * vals + b
    g = s * (1.0 - h)
    if np.any(g >= 1):
        return -np.inf
    return float((g / h).mean() + np.log1p(-g).mean())


# Monte Carlo tails --------------------------------------------------------

@dataclass
class RateEstimate:
    """Per-N tail estimates and the extrapolated rate."""

    N_values: list
    log_prob: list
    ci_low: list
    ci_high: list
    hits: list
    samples: list
    rate: float
    rate_se: float
    theory: float | None = None
    raw_intercept: float | None = None
    dropped: list = field(default_factory=list)
    records: list = field(default_factory=list)

    @property
    def per_N_rate(self) -> np.ndarray:
        return -np.asarray(self.log_prob) / np.asarray(self.N_values)

    def rate_ci(self, z: float = 1.96) -> tuple[float, float]:
        """Interval around the raw intercept, clipped to the nonnegative axis."""
        c = self.rate if self.raw_intercept is None else self.raw_intercept
        return max(c - z * self.rate_se, 0.0), max(c + z * self.rate_se, 0.0)

    def relative_error(self) -> float:
        if self.theory is None or self.theory == 0:
            raise ValueError("no nonzero theoretical rate to compare with")
        return abs(self.rate - self.theory) / self.theory

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def csv_rows(self) -> list[tuple[float, float]]:
        """(1/N, -log_prob/N) pairs."""
        return [(1.0 / n, -lp / n) for n, lp in zip(self.N_values, self.log_prob)]


def _threads() -> int:
    try:
        cap = int(os.environ.get("SPECMEAS_THREADS", "1"))
    except ValueError:
        cap = 1
    return max(1, min(cap, os.cpu_count() or 1))


def _statistic_batch(rng, spec: EnsembleSpec, f: TestFunction, n: int) -> np.ndarray:
    out = np.empty(n)
    done = 0
    while done < n:
        m = min(CHUNK, n - done)
        support, weights = sample_ensemble_batch(rng, spec, m)
        out[done : done + m] = linear_statistic(f, support, weights)
        done += m
    return out


def _count_hits(rng, spec, f, x, n):
    return int(np.count_nonzero(_statistic_batch(rng, spec, f, n) >= x))


def _affine_intercept(inv_n, r, se):
    """Least-squares intercept of r = R + c / N and its propagated error."""
    X = np.column_stack([np.ones_like(inv_n), inv_n])
    if len(r) == 1:
        return float(r[0]), float(se[0])
    H = np.linalg.pinv(X)[0]
    return float(H @ r), float(np.sqrt(np.sum((H * se) ** 2)))


def mc_tail(rng, ensemble: EnsembleSpec, f: TestFunction, x: float, N_list: Sequence[int], samples: int,
            seed=None) -> RateEstimate:
    """Estimate ``-(1/N) log P(mu_N(f) >= x)`` for each N and extrapolate in 1/N.

    ``samples`` is the total budget, split evenly across ``N_list``; each
    N runs 20 batches on independent substreams, and the batch means give the
    confidence intervals.  An N with no exceedance is dropped and listed in
    ``dropped``; :class:`ZeroHits` is raised only if every N is dropped.
    """
    if samples < 10_000:
        raise ValueError("samples must be at least 10^4")
    N_list = list(N_list)
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("N_list must be increasing")
    if ensemble.on_circle != (f.domain == "circle"):
        raise ValueError("test function domain does not match the ensemble")
    if isinstance(rng, (int, np.integer)) or rng is None:
        seed = rng if seed is None else seed
        rng = np.random.default_rng(rng)
    per_N = samples // len(N_list)
    sizes = [per_N // N_BATCHES + (i < per_N % N_BATCHES) for i in range(N_BATCHES)]

    Ns, lps, los, his, hits_l, ns, rs, ses, dropped, records = [], [], [], [], [], [], [], [], [], []
    streams_per_N = rng.spawn(len(N_list))
    for N, stream in zip(N_list, streams_per_N):
        spec = EnsembleSpec(ensemble.family, N, ensemble.beta, ensemble.a, ensemble.b)
        subs = stream.spawn(N_BATCHES)
        with ThreadPoolExecutor(_threads()) as ex:
            counts = list(ex.map(lambda a: _count_hits(a[0], spec, f, x, a[1]), zip(subs, sizes)))
        counts = np.array(counts)
        hits = int(counts.sum())
        rec = {"ensemble": ensemble.to_dict() | {"N": N}, "f": f.describe(), "x": x, "N": N,
               "hits": hits, "samples": per_N, "log_prob": None, "ci_low": None, "ci_high": None,
               "seed": seed}
        if hits == 0:
            dropped.append(N)
            records.append(rec)
            continue
        frac = counts / np.array(sizes)
        p = hits / per_N
        se_p = frac.std(ddof=1) / np.sqrt(N_BATCHES)
        se_log = se_p / p
        lp = math.log(p)
        lo, hi = lp - T_975_19 * se_log, lp + T_975_19 * se_log
        rec.update(log_prob=lp, ci_low=lo, ci_high=hi)
        records.append(rec)
        Ns.append(N); lps.append(lp); los.append(lo); his.append(hi)
        hits_l.append(hits); ns.append(per_N)
        rs.append(-lp / N); ses.append(se_log / N)
    if not Ns:
        raise ZeroHits(f"no exceedances of x = {x} at any N")
    intercept, rate_se = _affine_intercept(1.0 / np.array(Ns, float), np.array(rs), np.array(ses))
    # rates are nonnegative; a negative intercept is extrapolation noise
    rate = max(intercept, 0.0)
    theory = None
    if ensemble.family in ("cbe", "jacobi", "dirichlet-knob"):
        scale = 2 * ensemble.a if ensemble.family == "dirichlet-knob" else ensemble.beta
        theory = rate_linear_statistic(f, x, scale) if x > f.mean() else 0.0
    return RateEstimate(Ns, lps, los, his, hits_l, ns, rate, rate_se, theory, intercept, dropped, records)


# Stieltjes / R-transform and the spherical-integral limit -----------------

def _check_outside(f: TestFunction, x: float):
    if f.fmin <= x <= f.fmax:
        raise InsideSpectrum(f"x = {x} lies in [{f.fmin:.6g}, {f.fmax:.6g}]")


def stieltjes_transform(f: TestFunction, x: float) -> float:
    """``H(x) = int dlambda / (x - f)`` for x outside the range of f."""
    _check_outside(f, x)
    if f.fmin == f.fmax:
        return 1.0 / (x - f.fmin)
    vals = f.values
    near = min(abs(x - f.fmax), abs(x - f.fmin)) / (f.fmax - f.fmin)
    if near > 1e-2:
        return float((1.0 / (x - vals)).mean())
    # close to the spectrum the integrand peaks; let adaptive quadrature find it
    k = int(np.argmax(vals) if x > f.fmax else np.argmin(vals))
    return f.quad(lambda t: 1.0 / (x - f.on_circle(t)), points=(f.nodes[k],))


def _one_sided_limit(f: TestFunction, upper: bool) -> float:
    edge = f.fmax if upper else f.fmin
    sgn = 1.0 if upper else -1.0
    span = max(f.fmax - f.fmin, 1e-300)
    hs = span * np.array([1e-5, 1e-7, 1e-9])
    H = [stieltjes_transform(f, edge + sgn * h) for h in hs]
    d1, d2 = H[1] - H[0], H[2] - H[1]
    if abs(d2) >= 0.5 * abs(d1) and abs(d2) > 1e-6 * abs(H[2]):
        return sgn * math.inf
    q = d2 / d1 if d1 else 0.0
    return float(H[2] + d2 * q / (1 - q))


def stieltjes_limits(f: TestFunction) -> tuple[float, float]:
    """``(H_min, H_max)``: limits of H at the lower edge (from below, <= 0) and
    at the upper edge (from above, >= 0); infinite when the integral diverges."""
    if f.fmin == f.fmax:
        return -math.inf, math.inf
    return _one_sided_limit(f, upper=False), _one_sided_limit(f, upper=True)


def r_transform(f: TestFunction, y: float, limits=None) -> float:
    """``R(y)`` defined by ``H(R(y) + 1/y) = y`` for ``y`` in ``(H_min, 0) U (0, H_max)``."""
    h_min, h_max = stieltjes_limits(f) if limits is None else limits
    if y == 0 or not h_min < y < h_max:
        raise OutOfRange(f"y = {y} outside ({h_min:.6g}, 0) U (0, {h_max:.6g})")
    if f.fmin == f.fmax:
        return f.fmin
    if y > 0:
        lo, hi = max(f.fmax, f.fmin + 1.0 / y), f.fmax + 1.0 / y
    else:
        lo, hi = f.fmin + 1.0 / y, min(f.fmin, f.fmax + 1.0 / y)
    g = lambda s: stieltjes_transform(f, s) - y
    # keep the bracket off the edge, where H is undefined
    gap = 1e-12 * (f.fmax - f.fmin)
    a, b = (max(lo, f.fmax + gap), hi) if y > 0 else (lo, min(hi, f.fmin - gap))
    if g(a) * g(b) > 0:
        raise OutOfRange(f"y = {y} is numerically at the edge of the range of H")
    xs = optimize.brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    if abs(g(xs)) > 1e-10:
        raise OutOfRange(f"could not solve H(x) = {y} to 1e-10")
    return float(xs - 1.0 / y)


def spherical_limit(f: TestFunction) -> float:
    """``F(1) = v - int log(1 + v - f) dlambda`` with
    ``v = R(1)`` if ``H_min <= 1 <= H_max``, ``v = f_max - 1`` if ``1 > H_max``,
    ``v = f_min - 1`` otherwise."""
    h_min, h_max = stieltjes_limits(f)
    if h_min <= 1 <= h_max:
        v = r_transform(f, 1.0, (h_min, h_max)) if h_max > 1 else f.fmax - 1.0
    elif 1 > h_max:
        v = f.fmax - 1.0
    else:
        v = f.fmin - 1.0
    if f.fmin == f.fmax:
        return float(v - math.log(1 + v - f.fmin))
    k = int(np.argmax(f.values))
    # an estimated f_max can sit a hair below a cusp; the log singularity there is integrable
    tiny = np.finfo(float).tiny
    integral = f.quad(lambda t: np.log(np.maximum(1.0 + v - f.on_circle(t), tiny)), points=(f.nodes[k],))
    return float(v - integral)


def mc_spherical(rng, f: TestFunction, N: int, samples: int, beta: float = 2.0) -> tuple[float, float]:
    """Monte Carlo ``(1/N) log E exp(N mu_N(f))`` under CbetaE_N, with a
    batch-means standard error (20 batches)."""
    if f.domain != "circle":
        raise ValueError("spherical limit is defined for circle test functions")
    spec = EnsembleSpec("cbe", N, beta)
    subs = rng.spawn(N_BATCHES)
    sizes = [samples // N_BATCHES + (i < samples % N_BATCHES) for i in range(N_BATCHES)]
    with ThreadPoolExecutor(_threads()) as ex:
        stats = list(ex.map(lambda a: _statistic_batch(a[0], spec, f, a[1]), zip(subs, sizes)))
    s = np.concatenate(stats) * N
    shift = s.max()
    est = (shift + math.log(np.mean(np.exp(s - shift)))) / N
    batch = np.array([(shift + math.log(np.mean(np.exp(b * N - shift)))) / N for b in stats])
    return float(est), float(batch.std(ddof=1) / np.sqrt(N_BATCHES))
