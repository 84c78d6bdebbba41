"""Richardson extrapolation over a halving ladder."""

from __future__ import annotations

from typing import Sequence

from .geometry import ConfigurationError

# Truncation errors of the matching system expand in powers of 1/N, so two
# elimination stages over (N/4, N/2, N) remove the 1/N and 1/N**2 terms.
DEFAULT_ORDERS = (1.0, 2.0)


def richardson(lam_h: float, lam_h2: float, order: float) -> float:
    """Eliminate the ``h**order`` term from values at ``h`` and ``h/2``."""
    if not order > 0:
        raise ConfigurationError("extrapolation order must be positive")
    f = 2.0 ** order
    return (f * lam_h2 - lam_h) / (f - 1.0)


def extrapolate(values: Sequence[float], orders: Sequence[float] = DEFAULT_ORDERS) -> float:
    """
    Repeated Richardson elimination on values ordered coarse to fine.

    ``len(values)`` must be ``len(orders) + 1``; each stage consumes one
    order, the tableau shrinking by one entry per stage.
    """
    if len(values) != len(orders) + 1:
        raise ConfigurationError(f"{len(values)} values cannot absorb {len(orders)} stages")
    row = [float(v) for v in values]
    for p in orders:
        row = [richardson(row[i], row[i + 1], p) for i in range(len(row) - 1)]
    return row[0]


def truncation_ladder(N: int, stages: int = len(DEFAULT_ORDERS)) -> list[int]:
    """Truncation orders ``N / 2**stages, ..., N/2, N`` used for extrapolation."""
    if N % (1 << stages) or (N >> stages) < 4:
        raise ConfigurationError(
            f"N={N} must be a multiple of {1 << stages} with N/{1 << stages} >= 4 for extrapolation"
        )
    return [N >> s for s in range(stages, -1, -1)]
