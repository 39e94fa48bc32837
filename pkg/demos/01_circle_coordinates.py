"""Moments, Verblunsky coefficients and atoms on the unit circle.

A probability measure on the circle with finitely many atoms is pinned down
by its first few trigonometric moments, and equally by its Verblunsky
coefficients: numbers in the open disk followed by one on the circle.  This
script walks both ways and shows where the next moment is allowed to go.
"""
import numpy as np

from specmeas import (
    CircleAtomicMeasure,
    moment_disk,
    moments_circle,
    moments_to_verblunsky,
    verblunsky_to_measure,
    verblunsky_to_moments,
)

mu = CircleAtomicMeasure([-2.4, -0.3, 0.9, 2.2], [0.1, 0.4, 0.3, 0.2])
t = moments_circle(mu, 4)
print("moments t_1..t_4:", np.round(t, 6))

v = moments_to_verblunsky(t)
print("interior coefficients:", np.round(v.interior, 6))
print("terminal coefficient |c_4| =", abs(v.terminal))

back = verblunsky_to_measure(v)
print("recovered angles :", np.round(back.angles, 12))
print("recovered weights:", np.round(back.weights, 12))

# the third moment, given the first two, ranges over a disk; the
# third coefficient is its (conjugated) position in that disk
disk = moment_disk(t[:2])
print(f"t_3 lies in the disk |z - {disk.center:.4f}| <= {disk.radius:.4f}")
print("relative position:", np.round(disk.relative_position(t[2]), 6), "vs conj(c_3):", np.round(np.conj(v.interior[2]), 6))

# any interior vector is admissible: pick one and read off the moments
c = np.array([0.5, -0.2j, 0.1 + 0.3j])
print("moments of an arbitrary interior vector:", np.round(verblunsky_to_moments(c), 6))
