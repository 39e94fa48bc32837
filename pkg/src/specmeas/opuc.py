"""Orthogonal polynomials on the unit circle.

Polynomials are coefficient arrays, lowest degree first.  The Verblunsky
coefficient of order j is ``c_j = -conj(Phi_j(0))`` and the monic orthogonal
polynomials obey ``Phi_j = z Phi_{j-1} - conj(c_j) Phi*_{j-1}``.  The inner
product is ``<f, g> = int conj(f) g dmu``, so the Toeplitz form is
``<z^a, z^b> = t_{b-a}``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CoefficientOutOfDisk,
    Degenerate,
    MomentSpaceViolation,
    RootFindingFailure,
)
from .measures import UNIMODULAR_TOL, CircleAtomicMeasure, VerblunskyVector

__all__ = [
    "MomentDisk",
    "szego_step",
    "reversed_polynomial",
    "evaluate",
    "moments_to_verblunsky",
    "verblunsky_to_moments",
    "moment_disk",
    "verblunsky_to_measure",
    "measure_to_verblunsky",
    "hessenberg_matrix",
    "atoms_from_verblunsky",
    "verblunsky_from_atoms",
]

DISK_TOL = 1e-12
VIOLATION_TOL = 1e-10
ROOT_MODULUS_TOL = 1e-6
WEIGHT_SUM_TOL = 1e-10
# raw Christoffel sums lose ~eps / min(rho) near unimodular coefficients
RAW_WEIGHT_SUM_TOL = 1e-6


@dataclass(frozen=True)
class MomentDisk:
    """Admissible region ``{center + radius * u : |u| <= 1}`` for the next moment."""

    center: complex
    radius: float

    def relative_position(self, t_next: complex) -> complex:
        return (t_next - self.center) / self.radius


def reversed_polynomial(phi) -> np.ndarray:
    """``Phi*(z) = z^deg conj(Phi(1/conj(z)))``: conjugate and reverse."""
    return np.conj(np.asarray(phi, dtype=complex)[::-1])


def szego_step(phi, c: complex) -> np.ndarray:
    """Return ``z phi - conj(c) phi*``, a monic polynomial one degree higher."""
    phi = np.asarray(phi, dtype=complex)
    if phi.ndim != 1 or phi.size == 0 or phi[-1] != 1:
        raise ValueError("phi must be a monic coefficient array (lowest degree first)")
    if abs(c) > 1 + DISK_TOL:
        raise CoefficientOutOfDisk(f"|c| = {abs(c)!r} exceeds 1")
    out = np.zeros(phi.size + 1, dtype=complex)
    out[1:] = phi
    out[:-1] -= np.conj(c) * reversed_polynomial(phi)
    out[-1] = 1.0
    return out


def evaluate(phi, z):
    """Evaluate a coefficient array (lowest degree first) at `z`."""
    return np.polynomial.polynomial.polyval(z, np.asarray(phi, dtype=complex))


def _as_coefficients(c) -> np.ndarray:
    if isinstance(c, VerblunskyVector):
        return c.coefficients
    return np.atleast_1d(np.asarray(c, dtype=complex))


def _levinson(t):
    """Run the recursion on moments t_1..t_N.

    Returns (coefficients, Phi_N, norm_N, terminal_reached).
    """
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    if t.ndim != 1:
        raise ValueError("moment vector must be one-dimensional")
    if t.size and np.abs(t).max() > 1 + VIOLATION_TOL:
        raise MomentSpaceViolation("moments of a probability measure on T have |t_k| <= 1")
    n = t.size
    tt = np.concatenate([[1.0 + 0j], t])
    phi = np.array([1.0 + 0j])
    norm = 1.0
    coeffs = []
    for j in range(1, n + 1):
        cbar = np.dot(phi, tt[1 : j + 1]) / norm
        c = complex(np.conj(cbar))
        mod = abs(c)
        if mod > 1 + VIOLATION_TOL:
            raise MomentSpaceViolation(f"|c_{j}| = {mod:.3g} > 1: moments outside the moment space")
        if 1 - mod < UNIMODULAR_TOL:
            if j < n:
                raise Degenerate(f"measure has only {j} atoms but {n} moments were given")
            c = c / mod
            coeffs.append(c)
            phi = szego_step(phi, c)
            return np.array(coeffs), phi, 0.0, True
        coeffs.append(c)
        phi = szego_step(phi, c)
        norm *= 1 - mod * mod
    return np.array(coeffs, dtype=complex), phi, norm, False


def moments_to_verblunsky(t) -> VerblunskyVector:
    """Map moments ``(t_1, ..., t_N)`` to Verblunsky coefficients ``(c_1, ..., c_N)``.

    The map is triangular: ``c_k`` only depends on ``t_1 .. t_k``.  A last
    coefficient within 1e-12 of the circle is returned as the terminal entry.

    Raises
    ------
    MomentSpaceViolation
        If some ``|c_j|`` exceeds 1.
    Degenerate
        If a coefficient other than the last one is unimodular.
    """
    coeffs, _, _, terminal = _levinson(t)
    if terminal:
        return VerblunskyVector(coeffs[:-1], coeffs[-1])
    return VerblunskyVector(coeffs)


def verblunsky_to_moments(c) -> np.ndarray:
    """Inverse of :func:`moments_to_verblunsky`."""
    coeffs = _as_coefficients(c)
    if coeffs.size and np.abs(coeffs).max() > 1 + DISK_TOL:
        raise CoefficientOutOfDisk("Verblunsky coefficients must lie in the closed disk")
    tt = [1.0 + 0j]
    phi = np.array([1.0 + 0j])
    norm = 1.0
    for j, cj in enumerate(coeffs, start=1):
        shift = -np.dot(phi[:-1], tt[1:j])
        tt.append(shift + norm * np.conj(cj))
        phi = szego_step(phi, cj)
        norm *= max(1.0 - abs(cj) ** 2, 0.0)
    return np.array(tt[1:], dtype=complex)


def moment_disk(t) -> MomentDisk:
    """Center and radius of the disk of admissible ``t_{N+1}`` given ``t_1..t_N``."""
    coeffs, phi, norm, terminal = _levinson(t)
    if terminal:
        raise MomentSpaceViolation("moment vector lies on the boundary of the moment space")
    tt = np.concatenate([[1.0 + 0j], np.atleast_1d(np.asarray(t, dtype=complex))])
    n = tt.size - 1
    center = -np.dot(phi[:-1], tt[1 : n + 1]) if n else 0j
    return MomentDisk(complex(center), float(norm))


def hessenberg_matrix(c) -> np.ndarray:
    """Unitary Hessenberg (GGT) matrix of multiplication by z in the orthonormal
    basis; `c` has shape (..., K) and its last entry must be unimodular.

    Its eigenvalues are the zeros of ``Phi_K`` and its spectral measure with
    respect to the first basis vector is the measure with coefficients `c`.
    """
    c = np.asarray(c, dtype=complex)
    K = c.shape[-1]
    rho = np.sqrt(np.clip(1.0 - np.abs(c) ** 2, 0.0, None))
    prev = np.concatenate([-np.ones(c.shape[:-1] + (1,), complex), c[..., :-1]], axis=-1)
    G = np.zeros(c.shape[:-1] + (K, K), dtype=complex)
    for col in range(K):
        # tail[k] = prod_{m=k}^{col-1} rho_m
        tail = np.ones(c.shape[:-1] + (col + 1,))
        if col:
            tail[..., :col] = np.cumprod(rho[..., col - 1 :: -1], axis=-1)[..., ::-1]
        G[..., : col + 1, col] = -np.conj(c[..., col : col + 1]) * prev[..., : col + 1] * tail
        if col + 1 < K:
            G[..., col + 1, col] = rho[..., col]
    return G


def atoms_from_verblunsky(c):
    """Atoms and Christoffel weights of the K-atom measure with coefficients `c`.

    `c` has shape (..., K) with a unimodular last entry.  Returns angles and
    weights of shape (..., K), sorted by angle along the last axis.
    """
    c = np.array(c, dtype=complex)
    last = np.abs(c[..., -1])
    if np.any(np.abs(last - 1.0) > 1e-8):
        raise ValueError("the last coefficient must be unimodular")
    c[..., -1] /= last
    K = c.shape[-1]
    z = np.linalg.eigvals(hessenberg_matrix(c))
    dev = np.abs(np.abs(z) - 1.0)
    if dev.size and dev.max() > ROOT_MODULUS_TOL:
        raise RootFindingFailure(f"root off the unit circle by {dev.max():.2e}")
    z = z / np.abs(z)

    phi = np.ones_like(z)
    phis = np.ones_like(z)
    total = np.ones(z.shape)
    for j in range(1, K):
        cj = c[..., j - 1 : j]
        rho = np.sqrt(1.0 - np.abs(cj) ** 2)
        phi, phis = (z * phi - np.conj(cj) * phis) / rho, (phis - cj * z * phi) / rho
        total += np.abs(phi) ** 2
    weights = 1.0 / total
    wsum = weights.sum(axis=-1)
    if np.any(np.abs(wsum - 1.0) > RAW_WEIGHT_SUM_TOL):
        bad = np.abs(wsum - 1.0).max()
        raise RootFindingFailure(f"Christoffel weights sum off by {bad:.2e}")
    weights = weights / wsum[..., None]

    angles = np.angle(z)
    angles = np.where(angles >= np.pi, angles - 2 * np.pi, angles)
    order = np.argsort(angles, axis=-1)
    return np.take_along_axis(angles, order, -1), np.take_along_axis(weights, order, -1)


def verblunsky_to_measure(c) -> CircleAtomicMeasure:
    """Reconstruct the atomic measure whose coefficients terminate at a
    unimodular ``c_K``."""
    if isinstance(c, VerblunskyVector):
        if c.terminal is None:
            raise ValueError("reconstruction needs a terminal (unimodular) coefficient")
    coeffs = _as_coefficients(c)
    angles, weights = atoms_from_verblunsky(coeffs)
    return CircleAtomicMeasure(angles, weights)


def verblunsky_from_atoms(z, w, n: int) -> np.ndarray:
    """First `n` Verblunsky coefficients of ``sum_k w_k delta(z_k)``.

    Runs the recursion directly on the atoms (orthonormal values), which is far
    better conditioned than going through moments.  Arrays may carry leading
    batch axes; ``n`` cannot exceed the number of atoms.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=float)
    if n > z.shape[-1]:
        raise Degenerate(f"{z.shape[-1]} atoms determine only {z.shape[-1]} coefficients")
    phi = np.ones_like(z)
    phis = np.ones_like(z)
    out = np.empty(z.shape[:-1] + (n,), dtype=complex)
    for j in range(n):
        # <1, z Phi> / <1, Phi*>, invariant under rescaling Phi
        cbar = np.sum(w * z * phi, axis=-1) / np.sum(w * phis, axis=-1)
        out[..., j] = np.conj(cbar)
        if j == n - 1:
            break
        rho = np.sqrt(np.clip(1.0 - np.abs(cbar) ** 2, 0.0, None))[..., None]
        if np.any(rho == 0):
            raise Degenerate("measure has fewer atoms than requested coefficients")
        cb = cbar[..., None]
        phi, phis = (z * phi - cb * phis) / rho, (phis - np.conj(cb) * z * phi) / rho
        scale = np.sqrt(np.sum(w * np.abs(phi) ** 2, axis=-1))[..., None]
        phi, phis = phi / scale, phis / scale
    return out


def measure_to_verblunsky(measure: CircleAtomicMeasure, n: int | None = None) -> VerblunskyVector:
    """Verblunsky coefficients of an atomic measure.

    With ``n=None`` all K coefficients are returned, the last as terminal.
    """
    K = len(measure)
    n = K if n is None else n
    coeffs = verblunsky_from_atoms(measure.atoms, measure.weights, n)
    if n < K:
        if coeffs.size and np.abs(coeffs).max() >= 1:
            raise Degenerate("numerically unimodular interior coefficient")
        return VerblunskyVector(coeffs)
    last = coeffs[-1]
    if abs(abs(last) - 1.0) > ROOT_MODULUS_TOL:
        raise Degenerate(f"|c_K| = {abs(last)!r} is not 1 for a {K}-atom measure")
    interior = coeffs[:-1]
    if interior.size and np.abs(interior).max() >= 1:
        raise Degenerate("numerically unimodular interior coefficient")
    return VerblunskyVector(interior, last / abs(last))
