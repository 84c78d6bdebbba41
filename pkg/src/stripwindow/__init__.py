"""
Bound states of a planar strip whose lower Dirichlet wall carries a
Neumann window ``|x1| < a``.

Eigenvalues, critical widths, threshold resonances and the near-threshold
coefficient are computed by transverse mode matching; an independent
finite-difference solver cross-checks the eigenvalues.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .geometry import ConfigurationError, Parity, SpectralPoint, StripGeometry, normalize
from .spectrum import eigenvalue_n, eigenvalues_in_sector, full_spectrum
from .thresholds import find_threshold, threshold_table

__all__ = [
    "ConfigurationError",
    "Parity",
    "SpectralPoint",
    "StripGeometry",
    "__version__",
    "eigenvalue_n",
    "eigenvalues_in_sector",
    "find_threshold",
    "full_spectrum",
    "normalize",
    "threshold_table",
]
