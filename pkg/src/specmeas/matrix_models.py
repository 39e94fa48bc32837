"""Dense Haar matrices and their spectral measures at e_1.

These are the slow, direct constructions used to cross-check the
coefficient samplers.
"""
from __future__ import annotations

import warnings

import numpy as np
from scipy.linalg import schur

from .errors import Degenerate, EigensolverFailure, CyclicityWarning
from .measures import CircleAtomicMeasure, canonical_angle
from .opuc import verblunsky_from_atoms

__all__ = [
    "haar_unitary",
    "haar_special_orthogonal",
    "spectral_measure",
    "dual_compose",
    "dual_matrix",
    "sample_spectral_measure",
    "haar_unitary_coefficients",
]

RESIDUAL_TOL = 1e-8
COLLISION_TOL = 1e-10
CYCLIC_TOL = 1e-12


def haar_unitary(rng: np.random.Generator, N: int) -> np.ndarray:
    """Haar-distributed N x N unitary (QR of a complex Ginibre matrix with the
    phases of diag(R) pushed into Q)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    Z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def haar_special_orthogonal(rng: np.random.Generator, n2: int) -> np.ndarray:
    """Haar-distributed element of SO(n2), n2 even."""
    if n2 < 2 or n2 % 2:
        raise ValueError("n2 must be an even integer >= 2")
    Q, R = np.linalg.qr(rng.standard_normal((n2, n2)))
    Q = Q * np.sign(np.diagonal(R))
    if np.linalg.det(Q) < 0:
        Q[0] = -Q[0]
    return Q


def dual_matrix(n2: int) -> np.ndarray:
    """The block matrix ``J = [[0, -I], [I, 0]]``."""
    n = n2 // 2
    J = np.zeros((n2, n2))
    J[:n, n:] = -np.eye(n)
    J[n:, :n] = np.eye(n)
    return J


def dual_compose(g: np.ndarray) -> np.ndarray:
    """``g^D g`` with ``g^D = J g^T J^T``."""
    g = np.asarray(g)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] % 2:
        raise ValueError("g must be a square matrix of even size")
    J = dual_matrix(g.shape[0])
    return J @ g.T @ J.T @ g


def _merge(angles, weights, tol):
    order = np.argsort(angles)
    a, w = angles[order], weights[order]
    gaps = np.diff(a)
    starts = np.flatnonzero(np.concatenate([[True], gaps > tol]))
    groups = np.split(np.arange(a.size), starts[1:])
    # the cluster may straddle -pi
    if len(groups) > 1 and a[0] + 2 * np.pi - a[-1] <= tol:
        groups[0] = np.concatenate([groups[-1], groups[0]])
        groups.pop()
    out_a, out_w = [], []
    for g in groups:
        z = np.exp(1j * a[g])
        out_w.append(w[g].sum())
        out_a.append(np.angle(z.mean()))
    return np.array(out_a), np.array(out_w)


def spectral_measure(M: np.ndarray, merge_tol: float | None = None) -> CircleAtomicMeasure:
    """Spectral measure of the unitary `M` at the first basis vector.

    Uses the complex Schur form, whose vectors are orthonormal even inside
    degenerate eigenspaces.  With ``merge_tol`` set, eigenvalues closer than
    that (in angle) are merged into one atom carrying the eigenspace weight;
    without it, a collision raises :class:`Degenerate`.
    """
    M = np.asarray(M, dtype=complex)
    T, Z = schur(M, output="complex")
    lam = np.diagonal(T)
    resid = np.abs(M @ Z - Z * lam).max() if M.size else 0.0
    if resid > RESIDUAL_TOL:
        raise EigensolverFailure(f"eigen-residual {resid:.2e}: matrix is not numerically normal")
    angles = canonical_angle(np.angle(lam))
    weights = np.abs(Z[0]) ** 2
    if merge_tol is not None:
        angles, weights = _merge(angles, weights, merge_tol)
    elif angles.size > 1:
        s = np.sort(angles)
        gaps = np.diff(np.concatenate([s, [s[0] + 2 * np.pi]]))
        if gaps.min() <= COLLISION_TOL:
            raise Degenerate("eigenvalue collision; weight attribution is ill-posed")
    if np.any(weights < CYCLIC_TOL):
        warnings.warn("e_1 is not cyclic: some spectral weights vanish", CyclicityWarning, stacklevel=2)
    weights = np.clip(weights, 0.0, None)
    return CircleAtomicMeasure(angles, weights / weights.sum())


def sample_spectral_measure(draw, max_tries: int = 100, merge_tol: float | None = None):
    """Call ``spectral_measure(draw())`` until no collision occurs.

    Returns ``(measure, rejected)`` where ``rejected`` counts discarded draws.
    """
    for rejected in range(max_tries):
        try:
            return spectral_measure(draw(), merge_tol), rejected
        except Degenerate:
            continue
    raise Degenerate(f"{max_tries} consecutive draws had colliding eigenvalues")


def haar_unitary_coefficients(rng: np.random.Generator, N: int, size: int):
    """Spectral data of `size` Haar unitaries: ``(angles, weights, coeffs, rejected)``."""
    angles = np.empty((size, N))
    weights = np.empty((size, N))
    rejected = 0
    for i in range(size):
        mu, r = sample_spectral_measure(lambda: haar_unitary(rng, N))
        rejected += r
        angles[i], weights[i] = mu.angles, mu.weights
    coeffs = verblunsky_from_atoms(np.exp(1j * angles), weights, N)
    return angles, weights, coeffs, rejected
