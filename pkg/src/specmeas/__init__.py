"""Random spectral measures on the circle and on [0, 1]: Verblunsky
coefficients, canonical moments, ensemble samplers and large deviations."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .measures import (
    CircleAtomicMeasure,
    IntervalAtomicMeasure,
    RealCanonicalVector,
    VerblunskyVector,
    is_symmetric,
    moments_circle,
    moments_interval,
    project_R,
)
from .opuc import (
    moment_disk,
    moments_to_verblunsky,
    measure_to_verblunsky,
    verblunsky_to_measure,
    verblunsky_to_moments,
)
from .canonical import (
    canonical_moments_of_measure,
    canonical_to_moments_real,
    chebyshev_lift,
    extreme_moments,
    gauss_quadrature,
    moments_to_canonical_real,
    principal_representation,
    recurrence_from_canonical,
)
