"""Atomic measures on the unit circle and on [0, 1], and their coefficient vectors.

All containers are frozen dataclasses whose arrays are made read-only, so a
value can be shared between workers without copying.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidMeasure, NotSymmetric

WEIGHT_SUM_TOL = 1e-12
ATOM_TOL = 1e-10
UNIMODULAR_TOL = 1e-12

__all__ = [
    "CircleAtomicMeasure",
    "IntervalAtomicMeasure",
    "VerblunskyVector",
    "RealCanonicalVector",
    "canonical_angle",
    "moments_circle",
    "moments_interval",
    "project_R",
    "is_symmetric",
]


def _frozen(a, dtype=None):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def canonical_angle(theta):
    """Map angles to [-pi, pi)."""
    theta = np.asarray(theta, dtype=float)
    out = np.mod(theta + np.pi, 2 * np.pi) - np.pi
    # mod can return exactly 2*pi - pi = pi for inputs a hair below -pi
    return np.where(out >= np.pi, out - 2 * np.pi, out)


def _circular_gap(a, b):
    d = np.abs(np.mod(a - b + np.pi, 2 * np.pi) - np.pi)
    return d


def _check_weights(weights):
    if weights.ndim != 1:
        raise InvalidMeasure("weights must be one-dimensional")
    if np.any(~np.isfinite(weights)) or np.any(weights < 0):
        raise InvalidMeasure("weights must be finite and nonnegative")
    total = weights.sum()
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise InvalidMeasure(f"weights sum to {total!r}, not 1")


@dataclass(frozen=True)
class CircleAtomicMeasure:
    """``sum_k weights[k] * delta(exp(1j * angles[k]))``, atoms sorted by angle."""

    angles: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        angles = canonical_angle(self.angles)
        weights = np.asarray(self.weights, dtype=float)
        if angles.ndim != 1 or angles.shape != weights.shape:
            raise InvalidMeasure("angles and weights must be 1-d of equal length")
        if angles.size == 0:
            raise InvalidMeasure("a probability measure needs at least one atom")
        _check_weights(weights)
        if angles.size > 1:
            order = np.sort(angles)
            gaps = np.diff(np.concatenate([order, [order[0] + 2 * np.pi]]))
            if gaps.min() <= ATOM_TOL:
                raise InvalidMeasure("atoms must be pairwise distinct")
        # sorted by angle: eigensolver output order is not exchangeable
        order = np.argsort(angles, kind="stable")
        object.__setattr__(self, "angles", _frozen(angles[order]))
        object.__setattr__(self, "weights", _frozen(weights[order]))

    @property
    def atoms(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    def __len__(self):
        return self.angles.size

    def integrate(self, func) -> float:
        """Integrate ``func(angle)`` against the measure."""
        return float(np.dot(self.weights, func(self.angles)))

    def to_dict(self) -> dict:
        return {"angles": self.angles.tolist(), "weights": self.weights.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "CircleAtomicMeasure":
        return cls(np.asarray(d["angles"], float), np.asarray(d["weights"], float))

    @classmethod
    def from_json(cls, s: str) -> "CircleAtomicMeasure":
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True)
class IntervalAtomicMeasure:
    """``sum_k weights[k] * delta(points[k])`` with points in [0, 1]."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if points.ndim != 1 or points.shape != weights.shape:
            raise InvalidMeasure("points and weights must be 1-d of equal length")
        if points.size == 0:
            raise InvalidMeasure("a probability measure needs at least one atom")
        if np.any(points < 0) or np.any(points > 1):
            raise InvalidMeasure("points must lie in [0, 1]")
        _check_weights(weights)
        if points.size > 1 and np.diff(np.sort(points)).min() <= ATOM_TOL:
            raise InvalidMeasure("atoms must be pairwise distinct")
        order = np.argsort(points, kind="stable")
        object.__setattr__(self, "points", _frozen(points[order]))
        object.__setattr__(self, "weights", _frozen(weights[order]))

    def __len__(self):
        return self.points.size

    def integrate(self, func) -> float:
        return float(np.dot(self.weights, func(self.points)))

    def to_dict(self) -> dict:
        return {"points": self.points.tolist(), "weights": self.weights.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "IntervalAtomicMeasure":
        return cls(np.asarray(d["points"], float), np.asarray(d["weights"], float))

    @classmethod
    def from_json(cls, s: str) -> "IntervalAtomicMeasure":
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True)
class VerblunskyVector:
    """Coefficients ``c_1 .. c_{K-1}`` in the open disk, optionally closed by a
    unimodular ``c_K`` (the measure then has exactly K atoms)."""

    interior: np.ndarray
    terminal: Optional[complex] = None

    def __post_init__(self):
        interior = np.atleast_1d(np.asarray(self.interior, dtype=complex))
        if interior.ndim != 1:
            raise InvalidMeasure("interior coefficients must be one-dimensional")
        if interior.size and np.abs(interior).max() >= 1.0:
            raise InvalidMeasure("interior Verblunsky coefficients must lie in the open disk")
        object.__setattr__(self, "interior", _frozen(interior))
        if self.terminal is not None:
            term = complex(self.terminal)
            if abs(abs(term) - 1.0) > UNIMODULAR_TOL:
                raise InvalidMeasure(f"terminal coefficient {term!r} is not unimodular")
            object.__setattr__(self, "terminal", term)

    @property
    def coefficients(self) -> np.ndarray:
        if self.terminal is None:
            return np.array(self.interior)
        return np.append(self.interior, self.terminal)

    def __len__(self):
        return self.interior.size + (self.terminal is not None)


@dataclass(frozen=True)
class RealCanonicalVector:
    """Canonical moments ``p_1 .. p_{n-1}`` in (0, 1) plus an optional terminal
    value in [0, 1].

    Entries may be floats, :class:`fractions.Fraction` or mpmath numbers; the
    array keeps whatever dtype numpy infers (``object`` for exact types).
    """

    interior: np.ndarray
    terminal: Optional[object] = None

    def __post_init__(self):
        interior = np.atleast_1d(np.asarray(self.interior))
        if interior.dtype.kind in "iub":
            interior = interior.astype(float)
        if interior.ndim != 1:
            raise InvalidMeasure("canonical moments must be one-dimensional")
        for p in interior:
            if not 0 < p < 1:
                raise InvalidMeasure(f"interior canonical moment {p!r} not in (0, 1)")
        if self.terminal is not None and not 0 <= self.terminal <= 1:
            raise InvalidMeasure(f"terminal canonical moment {self.terminal!r} not in [0, 1]")
        interior.setflags(write=False)
        object.__setattr__(self, "interior", interior)

    @property
    def values(self) -> list:
        out = list(self.interior)
        if self.terminal is not None:
            out.append(self.terminal)
        return out

    def __len__(self):
        return self.interior.size + (self.terminal is not None)


def moments_circle(measure: CircleAtomicMeasure, K: int) -> np.ndarray:
    """Moments ``t_k = sum_j w_j exp(i k theta_j)`` for k = 1..K."""
    if K < 1:
        raise ValueError("K must be >= 1")
    k = np.arange(1, K + 1)
    return np.exp(1j * np.outer(k, measure.angles)) @ measure.weights


def moments_interval(measure: IntervalAtomicMeasure, K: int) -> np.ndarray:
    """Moments ``m_k = sum_j w_j x_j^k`` for k = 1..K."""
    if K < 1:
        raise ValueError("K must be >= 1")
    k = np.arange(1, K + 1)
    return np.power.outer(measure.points, k).T @ measure.weights


def is_symmetric(measure: CircleAtomicMeasure, tol: float = 1e-9) -> bool:
    """True iff the measure is invariant under complex conjugation, up to `tol`
    in both angle and weight."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    th, w = measure.angles, measure.weights
    gap = _circular_gap(th[:, None], -th[None, :])
    match = (gap <= tol) & (np.abs(w[:, None] - w[None, :]) <= tol)
    return bool(match.any(axis=1).all())


def project_R(measure: CircleAtomicMeasure, tol: float = 1e-9) -> IntervalAtomicMeasure:
    """Push a conjugation-symmetric measure to [0, 1] by ``x = (1 + cos theta) / 2``.

    Each conjugate pair collapses to a single atom carrying the pair's total
    weight; atoms at theta = 0 or pi keep their own weight.
    """
    if not is_symmetric(measure, tol):
        raise NotSymmetric("measure is not invariant under conjugation")
    mag = np.abs(measure.angles)
    order = np.argsort(mag, kind="stable")
    mag, w = mag[order], measure.weights[order]
    # |theta| groups hold one atom (theta in {0, pi}) or one conjugate pair
    starts = np.flatnonzero(np.concatenate([[True], np.diff(mag) > tol]))
    weights = np.add.reduceat(w, starts)
    points = 0.5 * (1.0 + np.cos(mag[starts]))
    points = np.clip(points, 0.0, 1.0)
    weights = weights / weights.sum()
    return IntervalAtomicMeasure(points, weights)
