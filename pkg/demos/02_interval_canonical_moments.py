"""Canonical moments of measures on [0, 1].

Each moment m_k of a measure on [0, 1] is confined, given m_1..m_{k-1},
to an interval [m_k^-, m_k^+].  Its canonical moment p_k is the relative
position inside that interval.  Canonical moments turn the awkward moment
space into a cube, and they give the three-term recurrence directly.
"""
from fractions import Fraction

import numpy as np

from specmeas import (
    IntervalAtomicMeasure,
    canonical_moments_of_measure,
    canonical_to_moments_real,
    extreme_moments,
    gauss_quadrature,
    moments_to_canonical_real,
    principal_representation,
    recurrence_from_canonical,
)

# exact arithmetic: the uniform law on [0, 1] has moments 1/(k+1)
m = [Fraction(1, k + 2) for k in range(5)]
p = moments_to_canonical_real(m)
print("canonical moments of the uniform law:", [str(x) for x in p.values])
print("range of m_3 given m_1 = 1/2, m_2 = 3/8:", [str(x) for x in extreme_moments([Fraction(1, 2), Fraction(3, 8)])])

# the arcsine law has every canonical moment equal to 1/2
print("arcsine moments from p = 1/2:", np.round(canonical_to_moments_real([0.5] * 4), 6))

rec = recurrence_from_canonical([0.5] * 4)
print("Jacobi diagonal:", rec.diag, "off-diagonal squared:", np.round(rec.offdiag ** 2, 12))

# a terminal p_6 = 0 closes the chain: three Gauss nodes, here the Chebyshev points
g = gauss_quadrature([0.5] * 5 + [0.0])
cheb = np.sort((1 + np.cos((2 * np.arange(1, 4) - 1) * np.pi / 6)) / 2)
print("Gauss nodes for the arcsine law:", np.round(g.points, 6), "Chebyshev:", np.round(cheb, 6))

# a moment vector on the boundary has a unique representing measure; one in
# the interior has two principal ones, touching 0 or 1 or neither
mu = IntervalAtomicMeasure([0.1, 0.45, 0.8], [0.3, 0.5, 0.2])
pm = canonical_moments_of_measure(mu, 4)
print("canonical moments of a 3-atom measure:", np.round(pm, 6))
m4 = canonical_to_moments_real([0.4, 0.6, 0.3, 0.7])
for side in ("lower", "upper"):
    r = principal_representation(m4, side)
    print(f"{side} principal representation: points {np.round(r.points, 6)} weights {np.round(r.weights, 6)}")
