"""Random spectral measures through their coordinates.

Under the circular beta ensemble the Verblunsky coefficients are independent,
with |c_k|^2 ~ Beta(1, (N-k) beta/2) and uniform phases.  Sampling them costs
O(N) per measure.  Here the coefficient sampler is compared with spectral
measures of Haar unitary matrices, and uniform points of the moment space are
shown to have independent coefficients as well.
"""
import numpy as np
from scipy import stats

from specmeas import moments_to_verblunsky
from specmeas.matrix_models import haar_unitary_coefficients
from specmeas.samplers import cbe_coefficients, make_rng, sample_uniform_moments
from specmeas.suites import eta_cdf

rng = make_rng(2024)
N, size = 5, 4000

c_fast = cbe_coefficients(rng, N, 2.0, size)
_, _, c_mat, rejected = haar_unitary_coefficients(rng, N, size)
print(f"matrix route: {size} draws, {rejected} rejected for near-collisions")
for k in range(N - 1):
    p = stats.ks_2samp(np.abs(c_fast[:, k]), np.abs(c_mat[:, k])).pvalue
    print(f"|c_{k + 1}|: coefficient sampler vs Haar matrices, two-sample KS p = {p:.3f}")

# uniform on the moment space of order n: |c_j|^2 ~ Beta(1, n - j + 1)
n = 4
c = np.array([moments_to_verblunsky(sample_uniform_moments(rng, "circle", n)).coefficients for _ in range(size)])
for j in range(n):
    p = stats.kstest(np.abs(c[:, j]) ** 2, eta_cdf(n - j - 1)).pvalue
    print(f"uniform moments, |c_{j + 1}|^2 law: KS p = {p:.3f}")
print("Spearman between |c_1| and |c_2|:", round(stats.spearmanr(np.abs(c[:, 0]), np.abs(c[:, 1])).statistic, 4))
