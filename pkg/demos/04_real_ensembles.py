"""Symmetric measures: SO(2N), Jacobi ensembles and the dual composition.

A measure on the circle that is invariant under conjugation folds to a
measure on [0, 1] via x = (1 + cos theta) / 2, and its real Verblunsky
coefficients become canonical moments p = (1 + c) / 2.  Haar SO(2N) gives
coefficients with symmetric Beta laws; the same recipe with other parameters
gives the Jacobi ensembles.  Finally g^D g for a Haar orthogonal g has doubly
degenerate spectrum and a symmetric spectral measure.
"""
import numpy as np

from specmeas import is_symmetric, project_R
from specmeas.matrix_models import dual_compose, haar_special_orthogonal, spectral_measure
from specmeas.samplers import make_rng, sample_jacobi_gamma, so2n_coefficients
from specmeas.suites import jacobi_suite, so2n_suite

rng = make_rng(7)

c = so2n_coefficients(rng, 3, 5)
print("SO(6) coefficients (last one is always -1):")
print(np.round(c, 4))

for r in so2n_suite(rng, 3, samples=5000):
    print(" ", r.line())

gamma = sample_jacobi_gamma(rng, 4, 2.0, 1.5, 0.8)
print("a Jacobi spectral measure on [0, 1]:", np.round(gamma.points, 4), np.round(gamma.weights, 4))
print("Jacobi beta = 1 suite:", all(r.passed for r in jacobi_suite(rng, 3, 1.0, samples=5000)))

g = haar_special_orthogonal(rng, 8)
mu = spectral_measure(dual_compose(g), merge_tol=1e-6)
print(f"g^D g for g in SO(8): {len(mu)} distinct eigenvalues, symmetric: {is_symmetric(mu, 1e-7)}")
print("folded to [0, 1]:", np.round(project_R(mu, 1e-7).points, 4))
