"""
Critical half-widths at which eigenvalues emerge from the continuum.

At a critical width the threshold energy ``eps = 1`` (``m = 0``) admits a
bounded solution, so ``a_n`` is a zero of ``a -> det C_reg(a, m=0)`` in
the sector of parity ``(-1)**n``.  Each root is searched inside the open
bracket ``(n pi/sqrt 3, (n+1) pi/sqrt 3)``; the tan/cot poles of the k = 1
column sit exactly on the bracket endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .extrapolation import DEFAULT_ORDERS, extrapolate, truncation_ladder
from .geometry import ConfigurationError, Parity, parity_of_index
from .matching import kernel_m, regularized_matrix_m
from .modal import SQRT3

SCAN_POINTS = 400


class BracketAnomalyError(RuntimeError):
    """Zero or several sign changes inside a critical-width bracket."""

    def __init__(self, message, scan=None):
        super().__init__(message)
        self.scan = scan


class ConvergenceError(RuntimeError):
    """Critical width not stable under doubling of the truncation order."""


@dataclass(frozen=True)
class ThresholdRecord:
    """
    One critical half-width in normalized units (``d = pi``).

    ``a_n`` is the extrapolated value; ``a_raw`` is the root of the
    ``N``-mode system at which ``residual`` (relative smallest singular
    value of the matching matrix) was measured.  ``drift`` is the change of
    ``a_n`` under ``N -> 2N`` when that check was run.
    """

    n: int
    parity: Parity
    a_n: float
    residual: float | None
    N_used: int | None
    bracket: tuple[float, float]
    a_raw: float | None = None
    drift: float | None = None

    def physical(self, d: float) -> float:
        return self.a_n * d / math.pi


def bracket(n: int, d: float = math.pi) -> tuple[float, float]:
    """Open interval known to contain ``a_n``."""
    return n * d / SQRT3, (n + 1) * d / SQRT3


def _det_sign(a, parity, N):
    s, l = np.linalg.slogdet(regularized_matrix_m(a, 0.0, parity, N))
    return s, l


def raw_threshold(n: int, N: int) -> float:
    """Critical width of the ``N``-mode truncated system."""
    parity = parity_of_index(n)
    lo, hi = bracket(n)
    grid = np.linspace(lo, hi, SCAN_POINTS + 2)[1:-1]
    block = np.stack([regularized_matrix_m(a, 0.0, parity, N) for a in grid])
    signs, logs = np.linalg.slogdet(block)
    changes = np.flatnonzero(signs[:-1] * signs[1:] < 0)
    if len(changes) != 1:
        raise BracketAnomalyError(
            f"{len(changes)} sign changes for n={n}, N={N} in ({lo:.6f}, {hi:.6f})",
            scan=list(zip(grid.tolist(), signs.tolist())),
        )
    i = changes[0]
    ref = logs[i]

    def f(a):
        s, l = _det_sign(a, parity, N)
        return s * math.exp(min(l - ref, 700.0))

    return brentq(f, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)


def find_threshold(n: int, N: int = 128, tol: float = 1e-6, extrapolate_N: bool = True,
                   check: bool = True) -> ThresholdRecord:
    """
    Locate the critical half-width ``a_n``.

    Parameters
    ----------
    n : int
        Eigenvalue index; ``n = 0`` returns the trivial record ``a_0 = 0``.
    N : int
        Finest truncation order.
    tol : float
        Allowed change of ``a_n`` under ``N -> 2N`` when ``check`` is set.
    extrapolate_N : bool
        Extrapolate over ``N/4, N/2, N``.
    check : bool
        Recompute with ``2N`` and compare.

    Raises
    ------
    BracketAnomalyError
        No unique sign change in the bracket at some truncation.
    ConvergenceError
        Drift under ``N -> 2N`` exceeds ``tol``.
    """
    if n < 0:
        raise ConfigurationError("threshold index must be >= 0")
    parity = parity_of_index(n)
    if n == 0:
        return ThresholdRecord(n=0, parity=parity, a_n=0.0, residual=None, N_used=None,
                               bracket=(0.0, 0.0))
    orders = truncation_ladder(N) if extrapolate_N else [N]
    if check:
        orders = orders + [2 * N]
    raw = {Nl: raw_threshold(n, Nl) for Nl in orders}

    def estimate(top):
        if not extrapolate_N:
            return raw[top]
        return extrapolate([raw[Nl] for Nl in truncation_ladder(top)], DEFAULT_ORDERS)

    a_n = estimate(N)
    drift = None
    if check:
        drift = abs(estimate(2 * N) - a_n)
        if drift > tol:
            raise ConvergenceError(f"a_{n} drifts by {drift:.3e} under N={N}->{2 * N}")
    lo, hi = bracket(n)
    if not lo < a_n < hi:
        raise BracketAnomalyError(f"a_{n}={a_n} left its bracket ({lo}, {hi})")
    residual = kernel_m(raw[N], 0.0, parity, N).residual
    return ThresholdRecord(n=n, parity=parity, a_n=a_n, residual=residual, N_used=N,
                           bracket=(lo, hi), a_raw=raw[N], drift=drift)


def threshold_table(n_max: int, N: int = 128, tol: float = 1e-6, check: bool = True) -> list[ThresholdRecord]:
    """Records for ``n = 0..n_max`` with strictly increasing ``a_n``."""
    if n_max < 0:
        raise ConfigurationError("n_max must be >= 0")
    records = [find_threshold(n, N, tol, check=check) for n in range(n_max + 1)]
    for prev, cur in zip(records, records[1:]):
        if not cur.a_n > prev.a_n:
            raise BracketAnomalyError(f"a_{cur.n} <= a_{prev.n}")
    return records
