"""Random measures built from independent coefficient laws.

Every sampler takes an explicit :class:`numpy.random.Generator`.  Scalar
samplers return measure objects; the ``*_batch`` variants return stacked
arrays ``(angles, weights, coefficients)`` (or ``(points, weights)``) and are
what the Monte Carlo code uses.

Conventions
-----------
``sample_beta_s(a, b)`` has density proportional to
``(1 - x)^(a-1) (1 + x)^(b-1)`` on (-1, 1), i.e. it is ``1 - 2 Beta(a, b)``.
With this order the one-pair case of the symmetric Jacobi circle ensemble
comes out right (``c_1 = cos theta`` carries the ``(1 - cos)^(a-1/2)`` factor
through ``a``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .canonical import canonical_to_moments_real, gauss_quadrature
from .measures import CircleAtomicMeasure, IntervalAtomicMeasure, VerblunskyVector, project_R
from .opuc import atoms_from_verblunsky, verblunsky_to_moments

__all__ = [
    "RngStream",
    "EnsembleSpec",
    "make_rng",
    "substreams",
    "sample_gamma",
    "sample_dirichlet",
    "sample_beta",
    "sample_beta_s",
    "sample_eta",
    "cbe_coefficients",
    "sun_coefficients",
    "so2n_coefficients",
    "jtilde_coefficients",
    "sample_cbe_spectral",
    "sample_sun_spectral",
    "sample_so2n_spectral",
    "sample_jtilde_spectral",
    "sample_jacobi_gamma",
    "sample_uniform_moments",
    "sample_bizth",
    "sample_cbe_batch",
    "sample_sun_batch",
    "sample_so2n_batch",
    "sample_jtilde_batch",
    "sample_jacobi_batch",
    "sample_bizth_batch",
    "sample_dirichlet_knob_batch",
    "sample_ensemble_batch",
    "fold_batch",
    "bizth_dimension",
]

RngStream = np.random.Generator

FAMILIES = (
    "cbe", "sun", "so2n", "jtilde", "jacobi",
    "uniform-moments-circle", "uniform-moments-interval",
    "bizth1", "bizth2", "bizth3", "bizth4",
    "dirichlet-knob",
)


@dataclass(frozen=True)
class EnsembleSpec:
    """Which random measure to draw.

    ``family`` is one of :data:`FAMILIES`.  ``beta`` is the inverse
    temperature; ``a`` and ``b`` are the Jacobi exponents (``a`` doubles as
    the Dirichlet parameter of the ``dirichlet-knob`` family).
    """

    family: str
    N: int
    beta: float = 2.0
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown ensemble family {self.family!r}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")
        if self.family == "bizth3" and self.N < 2:
            raise ValueError("bizth case 3 needs N >= 2")
        if not self.beta > 0 or not self.a > 0 or not self.b > 0:
            raise ValueError("beta, a, b must be positive")

    @property
    def on_circle(self) -> bool:
        return self.family in ("cbe", "sun", "so2n", "jtilde", "dirichlet-knob")

    def to_dict(self) -> dict:
        return {"family": self.family, "N": self.N, "beta": self.beta, "a": self.a, "b": self.b}


def make_rng(seed) -> RngStream:
    return np.random.default_rng(seed)


def substreams(seed, k: int) -> list[RngStream]:
    """`k` independent generators derived deterministically from `seed`."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.default_rng(s) for s in ss.spawn(k)]


# elementary laws ----------------------------------------------------------

def sample_gamma(rng: RngStream, shape: float, size=None):
    if not shape > 0:
        raise ValueError("shape must be positive")
    return rng.standard_gamma(shape, size)


def sample_dirichlet(rng: RngStream, params: Sequence[float], size=None) -> np.ndarray:
    """Normalised independent gammas; last axis indexes the coordinates."""
    params = np.asarray(params, dtype=float)
    if params.ndim != 1 or np.any(params <= 0):
        raise ValueError("Dirichlet parameters must be a 1-d array of positive reals")
    shape = params.shape if size is None else tuple(np.atleast_1d(size)) + params.shape
    y = rng.standard_gamma(np.broadcast_to(params, shape))
    total = y.sum(axis=-1, keepdims=True)
    # tiny shapes can underflow every coordinate at once; redraw those rows
    bad = (total[..., 0] == 0)
    while np.any(bad):
        y[bad] = rng.standard_gamma(np.broadcast_to(params, y[bad].shape))
        total = y.sum(axis=-1, keepdims=True)
        bad = (total[..., 0] == 0)
    return y / total


def sample_beta(rng: RngStream, a: float, b: float, size=None):
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    x = rng.standard_gamma(a, size)
    y = rng.standard_gamma(b, size)
    s = x + y
    # both gammas underflow only for tiny shapes; fall back on the larger shape
    return np.where(s > 0, x / np.where(s > 0, s, 1.0), float(a >= b))


def sample_beta_s(rng: RngStream, a: float, b: float, size=None):
    """Density proportional to ``(1 - x)^(a-1) (1 + x)^(b-1)`` on (-1, 1)."""
    return 1.0 - 2.0 * sample_beta(rng, a, b, size)


def sample_eta(rng: RngStream, r: float, size=None):
    """Rotation-invariant law on the disk with density ``(r+1)/pi (1-|z|^2)^r``.

    ``|z|^2`` is Beta(1, r + 1), drawn by inversion of ``1 - (1 - b)^(r+1)``.
    """
    if not r > -1:
        raise ValueError("r must exceed -1")
    u = rng.random(size)
    theta = rng.uniform(0.0, 2 * np.pi, size)
    b = -np.expm1(np.log1p(-u) / (r + 1.0))
    return np.sqrt(b) * np.exp(1j * theta)


# coefficient laws ---------------------------------------------------------

INTERIOR_MARGIN = 1e-12


def _interior(c):
    """Pull coefficients that rounded onto the unit circle back inside."""
    r = np.abs(c)
    cap = 1.0 - INTERIOR_MARGIN
    return np.where(r > cap, c * (cap / np.where(r > 0, r, 1.0)), c)


def cbe_coefficients(rng: RngStream, N: int, beta: float, size: int = 1) -> np.ndarray:
    """(size, N) Verblunsky coefficients of the circular beta ensemble:
    ``c_j ~ eta_{beta (N - j) / 2 - 1}`` for j < N and ``c_N`` uniform on the circle."""
    out = np.empty((size, N), dtype=complex)
    for j in range(1, N):
        out[:, j - 1] = _interior(sample_eta(rng, beta * (N - j) / 2 - 1, size))
    out[:, N - 1] = np.exp(1j * rng.uniform(0.0, 2 * np.pi, size))
    return out


def sun_coefficients(rng: RngStream, N: int, size: int = 1) -> np.ndarray:
    """CUE coefficients conditioned on determinant one: ``c_N = (-1)^(N+1)``."""
    out = cbe_coefficients(rng, N, 2.0, size)
    out[:, N - 1] = (-1.0) ** (N + 1)
    return out


def jtilde_coefficients(rng: RngStream, N: int, beta: float, a: float, b: float, size: int = 1) -> np.ndarray:
    """(size, 2N) real coefficients of the symmetric Jacobi circle ensemble.

    Odd k: ``Beta_s((2N-k-1) beta/4 + a, (2N-k-1) beta/4 + b)``;
    even k: ``Beta_s((2N-k-2) beta/4 + a + b, (2N-k) beta/4)``; ``c_2N = -1``.
    """
    if not (beta > 0 and a > 0 and b > 0):
        raise ValueError("beta, a, b must be positive")
    out = np.empty((size, 2 * N))
    for k in range(1, 2 * N):
        if k % 2:
            s = (2 * N - k - 1) * beta / 4
            out[:, k - 1] = sample_beta_s(rng, s + a, s + b, size)
        else:
            out[:, k - 1] = sample_beta_s(rng, (2 * N - k - 2) * beta / 4 + a + b, (2 * N - k) * beta / 4, size)
    out[:, :-1] = _interior(out[:, :-1])
    out[:, -1] = -1.0
    return out


def so2n_coefficients(rng: RngStream, N: int, size: int = 1) -> np.ndarray:
    """Haar SO(2N): ``c_k ~ Beta_s((2N-k)/2, (2N-k)/2)``, ``c_2N = -1``."""
    return jtilde_coefficients(rng, N, 2.0, 0.5, 0.5, size)


# batched measures ---------------------------------------------------------

def _circle_batch(coeffs):
    angles, weights = atoms_from_verblunsky(coeffs)
    return angles, weights, coeffs


def sample_cbe_batch(rng: RngStream, N: int, beta: float, size: int):
    return _circle_batch(cbe_coefficients(rng, N, beta, size))


def sample_sun_batch(rng: RngStream, N: int, size: int):
    return _circle_batch(sun_coefficients(rng, N, size))


def sample_so2n_batch(rng: RngStream, N: int, size: int):
    return _circle_batch(so2n_coefficients(rng, N, size).astype(complex))


def sample_jtilde_batch(rng: RngStream, N: int, beta: float, a: float, b: float, size: int):
    return _circle_batch(jtilde_coefficients(rng, N, beta, a, b, size).astype(complex))


def fold_batch(angles, weights):
    """Project batched conjugation-symmetric circle measures onto [0, 1]."""
    N = angles.shape[-1] // 2
    # sorted angles: the upper half-circle atoms are the last N
    th = np.abs(angles[..., N:])
    w = weights[..., N:] + weights[..., :N][..., ::-1]
    x = 0.5 * (1.0 + np.cos(th))
    order = np.argsort(x, axis=-1)
    return np.take_along_axis(x, order, -1), np.take_along_axis(w, order, -1)


def sample_jacobi_batch(rng: RngStream, N: int, beta: float, a: float, b: float, size: int):
    """(points, weights) of ``J(beta, a, b, N) x Dir_N(beta/2)`` measures,
    obtained by folding the symmetric circle ensemble with ``x = (1 + cos)/2``."""
    angles, weights, _ = sample_jtilde_batch(rng, N, beta, a, b, size)
    return fold_batch(angles, weights)


def sample_dirichlet_knob_batch(rng: RngStream, N: int, a: float, size: int):
    """CUE eigenangles carrying ``Dir_N(a)`` weights instead of ``Dir_N(1)``."""
    angles, _, _ = sample_cbe_batch(rng, N, 2.0, size)
    return angles, sample_dirichlet(rng, np.full(N, float(a)), size), None


# single measures ----------------------------------------------------------

def sample_cbe_spectral(rng: RngStream, N: int, beta: float) -> tuple[CircleAtomicMeasure, VerblunskyVector]:
    """One CbetaE spectral measure and the coefficients it was built from."""
    if N < 1 or not beta > 0:
        raise ValueError("need N >= 1 and beta > 0")
    c = cbe_coefficients(rng, N, beta)[0]
    th, w = atoms_from_verblunsky(c)
    return CircleAtomicMeasure(th, w), VerblunskyVector(c[:-1], c[-1])


def sample_sun_spectral(rng: RngStream, N: int) -> CircleAtomicMeasure:
    if N < 1:
        raise ValueError("N must be >= 1")
    th, w = atoms_from_verblunsky(sun_coefficients(rng, N)[0])
    return CircleAtomicMeasure(th, w)


def sample_so2n_spectral(rng: RngStream, N: int) -> CircleAtomicMeasure:
    if N < 1:
        raise ValueError("N must be >= 1")
    th, w = atoms_from_verblunsky(so2n_coefficients(rng, N)[0].astype(complex))
    return CircleAtomicMeasure(th, w)


def sample_jtilde_spectral(rng: RngStream, N: int, beta: float, a: float, b: float) -> CircleAtomicMeasure:
    if N < 1:
        raise ValueError("N must be >= 1")
    th, w = atoms_from_verblunsky(jtilde_coefficients(rng, N, beta, a, b)[0].astype(complex))
    return CircleAtomicMeasure(th, w)


def sample_jacobi_gamma(rng: RngStream, N: int, beta: float, a: float, b: float) -> IntervalAtomicMeasure:
    return project_R(sample_jtilde_spectral(rng, N, beta, a, b))


def sample_uniform_moments(rng: RngStream, space: Literal["circle", "interval"], n: int) -> np.ndarray:
    """A moment vector drawn uniformly from the interior of the moment space.

    circle: ``c_j ~ eta_{n-j}``, mapped to ``t_1..t_n``;
    interval: ``p_j ~ Beta(n-j+1, n-j+1)``, mapped to ``m_1..m_n``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if space == "circle":
        c = np.array([sample_eta(rng, n - j) for j in range(1, n + 1)])
        return verblunsky_to_moments(c)
    if space == "interval":
        p = [sample_beta(rng, n - j + 1, n - j + 1) for j in range(1, n + 1)]
        return canonical_to_moments_real(np.asarray(p, dtype=float))
    raise ValueError("space must be 'circle' or 'interval'")


def bizth_dimension(case: int, N: int) -> tuple[int, float]:
    """(number of free canonical moments, terminal pad) for a bizth case."""
    if case not in (1, 2, 3, 4):
        raise ValueError("case must be 1, 2, 3 or 4")
    if N < (2 if case == 3 else 1):
        raise ValueError("N too small for this case")
    n = 2 * N - 1 if case in (1, 3) else 2 * N
    return n, (0.0 if case in (1, 2) else 1.0)


def sample_bizth(rng: RngStream, case: int, N: int) -> IntervalAtomicMeasure:
    """Principal representation of a uniformly drawn moment vector.

    Cases 1 and 3 use ``n = 2N - 1`` moments, cases 2 and 4 use ``n = 2N``;
    cases 1, 2 take the lower representation and 3, 4 the upper one.
    """
    n, pad = bizth_dimension(case, N)
    p = [float(sample_beta(rng, n - j + 1, n - j + 1)) for j in range(1, n + 1)]
    return gauss_quadrature(p + [pad])


def sample_bizth_batch(rng: RngStream, case: int, N: int, size: int) -> list[IntervalAtomicMeasure]:
    n, pad = bizth_dimension(case, N)
    p = np.column_stack([sample_beta(rng, n - j + 1, n - j + 1, size) for j in range(1, n + 1)])
    return [gauss_quadrature(list(row) + [pad]) for row in p]


def sample_ensemble_batch(rng: RngStream, spec: EnsembleSpec, size: int):
    """(angles or points, weights) for any circle or Jacobi family."""
    f, N = spec.family, spec.N
    if f == "cbe":
        return sample_cbe_batch(rng, N, spec.beta, size)[:2]
    if f == "sun":
        return sample_sun_batch(rng, N, size)[:2]
    if f == "so2n":
        return sample_so2n_batch(rng, N, size)[:2]
    if f == "jtilde":
        return sample_jtilde_batch(rng, N, spec.beta, spec.a, spec.b, size)[:2]
    if f == "jacobi":
        return sample_jacobi_batch(rng, N, spec.beta, spec.a, spec.b, size)
    if f == "dirichlet-knob":
        return sample_dirichlet_knob_batch(rng, N, spec.a, size)[:2]
    raise ValueError(f"family {f!r} has no batched spectral sampler")
