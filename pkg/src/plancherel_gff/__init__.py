"""Exact and Monte Carlo verification of Poissonized Plancherel asymptotics.

Finite-scale quantities (branching dimensions, measure weights, states on the
enveloping algebra, sampled shapes) are computed exactly or by seeded Monte
Carlo and compared against the correlated Gaussian free field limit predicted
by contour quadrature.
"""

__version__ = "0.1.0"

from .errors import ComputationFailedError, ResourceLimitError
from .gt import (
    EMPTY,
    Signature,
    count_paths,
    enumerate_interlacing,
    is_interlaced,
    sym_dim,
    weyl_dim,
)

__all__ = [
    "ComputationFailedError",
    "ResourceLimitError",
    "EMPTY",
    "Signature",
    "count_paths",
    "enumerate_interlacing",
    "is_interlaced",
    "sym_dim",
    "weyl_dim",
    "__version__",
]
