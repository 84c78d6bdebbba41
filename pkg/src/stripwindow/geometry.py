"""
Strip geometry, parity sectors and unit normalization.

All numerics in this package run on the strip of width ``d = pi``; in
those units the continuum threshold is exactly 1 and the normalized
energy coincides with the eigenvalue.  Physical results follow from the
exact scale covariance of the Laplacian.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class ConfigurationError(ValueError):
    """Raised for geometrically meaningless configurations."""


class Parity(enum.Enum):
    """Symmetry class under the reflection ``x1 -> -x1``."""

    EVEN = "even"
    ODD = "odd"

    def __str__(self) -> str:
        return self.value

    @property
    def sign(self) -> int:
        return 1 if self is Parity.EVEN else -1

    @classmethod
    def parse(cls, value: "Parity | str") -> "Parity":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(f"unknown parity {value!r}") from None


def parity_of_index(n: int) -> Parity:
    """The n-th eigenfunction (counting from 0) has parity ``(-1)**n``."""
    if n < 0:
        raise ConfigurationError("eigenvalue index must be nonnegative")
    return Parity.EVEN if n % 2 == 0 else Parity.ODD


@dataclass(frozen=True)
class StripGeometry:
    """Strip ``0 < x2 < d`` with a Neumann window ``|x1| < a`` on ``x2 = 0``."""

    d: float = math.pi
    a: float = 0.0

    def __post_init__(self):
        if not (self.d > 0 and math.isfinite(self.d)):
            raise ConfigurationError(f"strip width must be positive, got {self.d}")
        if not (self.a >= 0 and math.isfinite(self.a)):
            raise ConfigurationError(f"window half-width must be >= 0, got {self.a}")

    @property
    def scale(self) -> float:
        """Factor ``(pi/d)**2`` converting normalized energies to physical ones."""
        return (math.pi / self.d) ** 2


def normalize(geom: StripGeometry) -> tuple[float, float]:
    """
    Map a physical geometry onto the ``d = pi`` normalization.

    Returns
    -------
    a_norm : float
        Half-width in normalized units, ``a * pi / d``.
    scale : float
        ``(pi/d)**2``; physical eigenvalues are ``scale * lambda_norm``.
    """
    return geom.a * math.pi / geom.d, geom.scale


def denormalize(a_norm: float, d: float) -> StripGeometry:
    """Inverse of :func:`normalize` for a strip of physical width ``d``."""
    if not d > 0:
        raise ConfigurationError(f"strip width must be positive, got {d}")
    return StripGeometry(d=d, a=a_norm * d / math.pi)


@dataclass(frozen=True)
class SpectralPoint:
    """
    One discrete eigenvalue in normalized units (``d = pi``).

    ``eps`` is the normalized energy, ``lam`` the eigenvalue (equal to
    ``eps`` here) and ``m`` the longitudinal decay rate, with
    ``m**2 + lam == 1`` up to rounding.
    """

    a: float
    parity: Parity
    eps: float
    m: float
    n: int | None = None

    @property
    def lam(self) -> float:
        return self.eps

    @property
    def gap(self) -> float:
        return self.m * self.m

    def physical(self, d: float) -> dict:
        """Eigenvalue record rescaled to a strip of width ``d``."""
        scale = (math.pi / d) ** 2
        return {
            "a": self.a * d / math.pi,
            "lambda": self.eps * scale,
            "gap": self.m * self.m * scale,
            "m": self.m * math.pi / d,
        }
