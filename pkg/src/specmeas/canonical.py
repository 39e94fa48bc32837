"""Canonical moments of probability measures on [0, 1].

The canonical moment ``p_i`` is the relative position of ``m_i`` inside the
interval of values compatible with ``m_1 .. m_{i-1}``.  Everything here goes
through the chain sequence ``zeta_1 = p_1``, ``zeta_k = (1 - p_{k-1}) p_k``: the
moments are weighted Dyck-path counts with weight ``zeta_h`` on every up-step
to height h (Stieltjes continued fraction), and the Jacobi matrix of the
measure has diagonal ``zeta_{2k-2} + zeta_{2k-1}`` and squared off-diagonal
``zeta_{2k-1} zeta_{2k}``.

The moment/canonical maps are written with plain Python arithmetic, so they
accept floats as well as :class:`fractions.Fraction` or mpmath numbers.  In
double precision the width of the i-th moment range is at most ``4^(1-i)``,
so recovering canonical moments from float moments loses about ``0.6 i``
digits; use exact or mpmath inputs beyond a dozen moments.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import Degenerate, EigensolverFailure, MomentSpaceViolation
from .measures import IntervalAtomicMeasure, RealCanonicalVector

__all__ = [
    "RecurrenceCoefficients",
    "PrincipalRepSpec",
    "canonical_to_moments_real",
    "moments_to_canonical_real",
    "extreme_moments",
    "chebyshev_lift",
    "recurrence_from_canonical",
    "gauss_quadrature",
    "principal_representation",
    "canonical_moments_of_measure",
    "canonical_moments_of_atoms",
    "support_structure",
]

ENDPOINT_SNAP = 1e-9
FLOAT_TOL = 1e-9
# float moments this close to their range (absolute) are rounding, not violations
MOMENT_SLACK = 1e-13
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class RecurrenceCoefficients:
    """Three-term recurrence data; ``offdiag`` holds the plain (not squared)
    sub-diagonal entries.  When the input determines one more off-diagonal
    than diagonal entries, ``offdiag`` is one longer than ``diag - 1``."""

    diag: np.ndarray
    offdiag: np.ndarray

    def matrix(self) -> np.ndarray:
        n = len(self.diag)
        return np.diag(self.diag) + np.diag(self.offdiag[: n - 1], 1) + np.diag(self.offdiag[: n - 1], -1)


@dataclass(frozen=True)
class PrincipalRepSpec:
    """One of the four principal-representation cases."""

    parity: Literal["odd", "even"]
    side: Literal["lower", "upper"]

    @classmethod
    def for_moments(cls, n: int, side: str) -> "PrincipalRepSpec":
        return cls("odd" if n % 2 else "even", side)

    def structure(self, n: int) -> tuple[bool, bool, int]:
        """(atom at 0, atom at 1, number of interior atoms) for n moments."""
        if self.parity == "odd":
            N = (n + 1) // 2
            return (False, False, N) if self.side == "lower" else (True, True, N - 1)
        N = n // 2
        return (True, False, N) if self.side == "lower" else (False, True, N)


def _values(p) -> list:
    if isinstance(p, RealCanonicalVector):
        return p.values
    return list(np.atleast_1d(np.asarray(p, dtype=object if _is_exact(p) else float)))


def _is_exact(seq) -> bool:
    try:
        return any(not isinstance(v, (float, int, np.floating, np.integer)) for v in seq)
    except TypeError:
        return False


def _zeta(p: Sequence) -> list:
    out = []
    prev_q = None
    for k, pk in enumerate(p):
        out.append(pk if k == 0 else prev_q * pk)
        prev_q = 1 - pk
    return out


def _moments_from_zeta(zeta: Sequence, n: int) -> list:
    """m_1..m_n as weighted Dyck-path sums (needs zeta_1..zeta_n)."""
    if n == 0:
        return []
    zero = zeta[0] * 0
    v = [zero + 1] + [zero] * n
    out = []
    for step in range(1, 2 * n + 1):
        top = min(step, 2 * n - step)
        new = [zero] * (n + 1)
        for h in range(top + 1):
            acc = zero
            if h >= 1:
                acc = acc + v[h - 1] * zeta[h - 1]
            if h < n:
                acc = acc + v[h + 1]
            new[h] = acc
        v = new
        if step % 2 == 0:
            out.append(v[0])
    return out


def canonical_to_moments_real(p) -> np.ndarray:
    """Moments ``m_1 .. m_n`` of any measure with canonical moments ``p``.

    Entries equal to 0 or 1 terminate the measure; later entries are then
    irrelevant.
    """
    vals = _values(p)
    for v in vals:
        if not 0 <= v <= 1:
            raise MomentSpaceViolation(f"canonical moment {v!r} outside [0, 1]")
    if not vals:
        return np.array([], dtype=float)
    return np.array(_moments_from_zeta(_zeta(vals), len(vals)))


def moments_to_canonical_real(m, tol: float | None = None) -> RealCanonicalVector:
    """Canonical moments of a moment vector in ``M_n^[0,1]``.

    The last coordinate may sit on the boundary, in which case it comes back
    as the terminal entry (0 or 1).  `tol` is the slack allowed on each
    ``p_i`` before it is declared outside [0, 1]; it defaults to 0 for exact
    inputs and 1e-9 for floats.  Float moments that miss their range by less
    than 1e-13 in absolute terms are treated as boundary points.
    """
    vals = _values(m)
    exact = _is_exact(vals)
    if tol is None:
        tol = 0 if exact else FLOAT_TOL
    n = len(vals)
    p: list = []
    width = None
    for i in range(1, n + 1):
        mi = vals[i - 1]
        zero = mi * 0
        if width is None:
            width = zero + 1
        low = _moments_from_zeta(_zeta(p + [zero]), i)[-1]
        if width <= 0:
            raise Degenerate(f"moment range collapsed before index {i}")
        pi = (mi - low) / width
        if pi < -tol or pi > 1 + tol:
            excess = (-pi if pi < 0 else pi - 1) * width
            if exact or excess > MOMENT_SLACK:
                raise MomentSpaceViolation(f"canonical moment p_{i} = {pi!r} outside [0, 1]")
        on_edge = pi <= tol or pi >= 1 - tol
        if on_edge:
            pi = zero if pi <= tol else zero + 1
            if i < n:
                raise Degenerate(f"measure is determined by m_1..m_{i}; range collapses at {i + 1}")
        p.append(pi)
        width = width * pi * (1 - pi)
    if p and (p[-1] == 0 or p[-1] == 1):
        return RealCanonicalVector(np.array(p[:-1]) if exact else np.array(p[:-1], float), p[-1])
    return RealCanonicalVector(np.array(p) if exact else np.array(p, float))


def extreme_moments(m) -> tuple:
    """``(m_{j+1}^-, m_{j+1}^+)``: the range of the next moment given ``m``."""
    vals = _values(m)
    if not vals:
        return 0.0, 1.0
    p = moments_to_canonical_real(vals)
    if p.terminal is not None:
        raise MomentSpaceViolation("moment vector is on the boundary of the moment space")
    base = p.values
    zero = base[0] * 0
    lower = canonical_to_moments_real(base + [zero])[-1]
    upper = canonical_to_moments_real(base + [zero + 1])[-1]
    return lower, upper


def _chebyshev_shifted(n: int) -> list[list[int]]:
    """Integer power coefficients of T_k(2x - 1), k = 0..n."""
    rows = [[1], [-1, 2]]
    for k in range(1, n):
        a, b = rows[k], rows[k - 1]
        nxt = [0] * (k + 2)
        for j, coef in enumerate(a):
            nxt[j] -= 2 * coef
            nxt[j + 1] += 4 * coef
        for j, coef in enumerate(b):
            nxt[j] -= coef
        rows.append(nxt)
    return rows[: n + 1]


def chebyshev_lift(gamma_moments) -> np.ndarray:
    """Circle moments ``t_k = int T_k(2x - 1) dgamma`` of the conjugation-symmetric
    lift of a measure on [0, 1] (x = (1 + cos theta) / 2).

    The power-basis coefficients of ``T_k(2x - 1)`` grow like ``4^k``, so a
    float lift loses about ``0.6 k`` digits; pass Fractions for long vectors.
    """
    vals = _values(gamma_moments)
    for k, v in enumerate(vals):
        if not 0 <= v <= 1 or (k and v > vals[k - 1]):
            raise MomentSpaceViolation("moments on [0, 1] lie in [0, 1] and are nonincreasing")
    if not vals:
        return np.array([], dtype=float)
    one = vals[0] * 0 + 1
    full = [one] + vals
    rows = _chebyshev_shifted(len(vals))
    out = [sum((coef * full[j] for j, coef in enumerate(rows[k])), one * 0) for k in range(1, len(vals) + 1)]
    return np.array(out)


def recurrence_from_canonical(p) -> RecurrenceCoefficients:
    """Jacobi-matrix data of a measure from its canonical moments.

    A terminal 0 or 1 truncates the recurrence where the chain sequence
    vanishes, so the matrix is exactly that of the finitely supported measure.
    """
    vals = [float(v) for v in _values(p)]
    if not vals:
        raise ValueError("need at least one canonical moment")
    for v in vals:
        if not 0 <= v <= 1:
            raise MomentSpaceViolation(f"canonical moment {v!r} outside [0, 1]")
    zeta = _zeta(vals)
    if vals[-1] == 1.0:
        zeta.append(0.0)
    z = [0.0] + zeta  # z[k] = zeta_k with zeta_0 = 0
    first_zero = next((k for k in range(1, len(z)) if z[k] == 0.0), None)
    stop = first_zero if first_zero is not None else len(z) - 1
    diag, off = [], []
    k = 1
    while 2 * k - 1 <= stop:
        diag.append(z[2 * k - 2] + z[2 * k - 1])
        if 2 * k <= stop:
            prod = z[2 * k - 1] * z[2 * k]
            if prod == 0.0:
                break
            if prod < 1e-300:
                raise Degenerate("chain-sequence product underflows")
            off.append(np.sqrt(prod))
        k += 1
    return RecurrenceCoefficients(np.array(diag), np.array(off))


def gauss_quadrature(p) -> IntervalAtomicMeasure:
    """Finitely supported measure with terminated canonical moments `p`
    (eigenvalues and squared first eigenvector components of its Jacobi
    matrix).  Atoms within 1e-9 of an endpoint are snapped onto it."""
    vals = _values(p)
    if not vals or not (vals[-1] == 0 or vals[-1] == 1):
        raise ValueError("canonical vector must end with a terminal 0 or 1")
    rec = recurrence_from_canonical(vals)
    n = len(rec.diag)
    d, e = rec.diag, rec.offdiag[: n - 1]
    if n == 1:
        x, v = d.copy(), np.ones((1, 1))
    else:
        x, v = eigh_tridiagonal(d, e)
        resid = rec.matrix() @ v - v * x
        if np.abs(resid).max() > RESIDUAL_TOL:
            raise EigensolverFailure(f"tridiagonal eigen-residual {np.abs(resid).max():.2e}")
    w = v[0] ** 2
    x = np.where(np.abs(x) < ENDPOINT_SNAP, 0.0, x)
    x = np.where(np.abs(x - 1) < ENDPOINT_SNAP, 1.0, x)
    x = np.clip(x, 0.0, 1.0)
    return IntervalAtomicMeasure(x, w / w.sum())


def principal_representation(m, side: Literal["lower", "upper"]) -> IntervalAtomicMeasure:
    """Lower (``side='lower'``) or upper principal representation of an
    interior moment vector: the atomic measure reproducing ``m`` whose next
    moment is minimal, respectively maximal."""
    if side not in ("lower", "upper"):
        raise ValueError("side must be 'lower' or 'upper'")
    p = moments_to_canonical_real(m)
    if p.terminal is not None:
        raise MomentSpaceViolation("moment vector is not interior")
    pad = 0.0 if side == "lower" else 1.0
    return gauss_quadrature([float(v) for v in p.interior] + [pad])


def support_structure(measure: IntervalAtomicMeasure) -> tuple[bool, bool, int]:
    """(atom at 0, atom at 1, number of atoms strictly inside)."""
    x = measure.points
    at0 = bool(np.any(x == 0.0))
    at1 = bool(np.any(x == 1.0))
    return at0, at1, int(np.sum((x > 0) & (x < 1)))


def _lanczos(x, w):
    """Jacobi coefficients (a, b) of sum w_k delta(x_k), full reorthogonalisation."""
    K = len(x)
    q = np.sqrt(w)
    q = q / np.linalg.norm(q)
    Q = [q]
    a, b = [], []
    prev, beta = np.zeros_like(q), 0.0
    for k in range(K):
        v = x * q
        alpha = q @ v
        v = v - alpha * q - beta * prev
        B = np.array(Q).T
        for _ in range(2):
            v = v - B @ (B.T @ v)
        a.append(alpha)
        beta = np.linalg.norm(v)
        if k == K - 1 or beta < 1e-13:
            break
        b.append(beta)
        prev, q = q, v / beta
        Q.append(q)
    return np.array(a), np.array(b)


def canonical_moments_of_measure(measure: IntervalAtomicMeasure, n: int) -> np.ndarray:
    """First `n` canonical moments of an atomic measure, read off its Jacobi
    matrix (Lanczos on the atoms) rather than from moments, which keeps full
    double precision."""
    return canonical_moments_of_atoms(measure.points, measure.weights, n)


def canonical_moments_of_atoms(points, weights, n: int) -> np.ndarray:
    """:func:`canonical_moments_of_measure` on raw arrays (weights summing to 1)."""
    a, b = _lanczos(np.asarray(points, float), np.asarray(weights, float))
    zeta = [a[0]]
    for k in range(1, n):
        j = k + 1  # computing zeta_j
        if j % 2 == 0:
            idx = j // 2 - 1
            if idx >= len(b) or zeta[-1] == 0:
                raise Degenerate(f"measure determines only {k} canonical moments")
            zeta.append(b[idx] ** 2 / zeta[-1])
        else:
            idx = (j - 1) // 2
            if idx >= len(a):
                raise Degenerate(f"measure determines only {k} canonical moments")
            zeta.append(a[idx] - zeta[-1])
    p = [zeta[0]]
    for k in range(1, n):
        q = 1 - p[-1]
        if q == 0:
            raise Degenerate("canonical sequence terminated at 1")
        p.append(zeta[k] / q)
    return np.array(p[:n])
