"""
Discrete spectrum for a fixed window half-width.

Eigenvalues are zeros of the regularized matching determinant on
``1/4 < eps < 1``.  The search runs in the decay rate ``m = sqrt(1 - eps)``:
sign changes are bracketed on a sample grid (uniform in ``eps`` plus a
geometric cluster toward threshold) and polished with Brent's method.

Truncating the matching system at ``N`` modes shifts every root by an
amount with a regular expansion in ``1/N``; by default roots are computed
on the ladder ``N/4, N/2, N`` and extrapolated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .extrapolation import DEFAULT_ORDERS, extrapolate, truncation_ladder
from .geometry import ConfigurationError, Parity, SpectralPoint, parity_of_index
from .matching import regularized_matrix_m, singular_ratio_m

EPS_FLOOR = 0.25 + 1e-9
M_CEIL = math.sqrt(1.0 - EPS_FLOOR)
SINGULAR_TOL = 1e-7
_BATCH_ELEMENTS = 4_000_000


class ResolutionError(RuntimeError):
    """A bracketed sign change did not polish into a verified root."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class ConsistencyError(RuntimeError):
    """Merged spectrum violates the even/odd alternation."""


class CurveGapError(RuntimeError):
    """An eigenvalue branch is missing at some grid point."""

    def __init__(self, message, a):
        super().__init__(message)
        self.a = a


@dataclass
class SpectrumResult:
    a: float
    points: list[SpectralPoint]
    N_used: int
    tolerances: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.points)


def scan_grid(samples: int = 2000, cluster: int = 200, m_min: float = 1e-7) -> np.ndarray:
    """
    Ascending decay-rate samples for the sign-change scan.

    ``samples - cluster`` points are uniform in ``eps`` on ``(1/4, 0.9)``;
    the remaining ``cluster`` points are geometric in ``m`` on
    ``[m_min, sqrt(0.1)]``, i.e. they split the last decade below threshold.
    """
    eps = np.linspace(EPS_FLOOR, 0.9, samples - cluster, endpoint=False)
    coarse = np.sqrt(1.0 - eps)
    fine = np.geomspace(m_min, math.sqrt(0.1), cluster)
    return np.unique(np.concatenate([coarse, fine]))


def _logdets(a, ms, parity, N):
    """Batched (sign, log|det|) of the regularized matrix on a grid of m."""
    chunk = max(1, _BATCH_ELEMENTS // (N * N))
    signs = np.empty(len(ms))
    logs = np.empty(len(ms))
    for start in range(0, len(ms), chunk):
        block = np.stack([regularized_matrix_m(a, m, parity, N) for m in ms[start:start + chunk]])
        s, l = np.linalg.slogdet(block)
        signs[start:start + chunk] = s
        logs[start:start + chunk] = l
    return signs, logs


def _scaled_det(a, parity, N, ref):
    def f(m):
        s, l = np.linalg.slogdet(regularized_matrix_m(a, m, parity, N))
        return s * math.exp(min(l - ref, 700.0))
    return f


def sector_roots_m(a: float, parity: Parity, N: int, grid: np.ndarray | None = None,
                   xtol: float = 1e-15) -> list[float]:
    """
    Verified decay-rate roots of the N-truncated system, ascending in m.

    Raises
    ------
    ResolutionError
        If a bracketed sign change fails the singular-value check.
    """
    parity = Parity.parse(parity)
    ms = scan_grid() if grid is None else grid
    signs, logs = _logdets(a, ms, parity, N)
    roots = []
    for i in np.flatnonzero(signs[:-1] * signs[1:] < 0):
        lo, hi = ms[i], ms[i + 1]
        m = brentq(_scaled_det(a, parity, N, logs[i]), lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
        ratio = singular_ratio_m(a, m, parity, N)
        if ratio > SINGULAR_TOL:
            # spurious sign flip of the scaled determinant away from a kernel
            if ratio > 1e-3:
                continue
            raise ResolutionError(
                f"sign change in m=({lo:.6g}, {hi:.6g}) polished to ratio {ratio:.2e}", (lo, hi)
            )
        roots.append(m)
    for s in np.flatnonzero(signs == 0):
        roots.append(ms[s])
    return sorted(roots)


def eigenvalues_in_sector(a: float, parity: Parity | str, N: int = 128, tol: float = 1e-15,
                          extrapolate_N: bool = True) -> list[SpectralPoint]:
    """
    Eigenvalues of one parity sector, ascending.

    Parameters
    ----------
    a : float
        Normalized window half-width (``d = pi``).
    parity : Parity or str
    N : int
        Finest truncation order.
    tol : float
        Absolute root tolerance in ``m``; the energy tolerance follows as
        ``2 m tol``.
    extrapolate_N : bool
        Extrapolate over the truncation ladder ``N/4, N/2, N``.  Roots of
        the coarser truncations are matched from the ground state up.
        An extrapolated decay rate that is not positive means the
        eigenvalue is absent in the untruncated problem and it is dropped.
    """
    parity = Parity.parse(parity)
    if not a > 0:
        return []
    if not extrapolate_N:
        ms = sector_roots_m(a, parity, N, xtol=tol)
        return [SpectralPoint(a=a, parity=parity, eps=1.0 - m * m, m=m) for m in reversed(ms)]
    levels = [sector_roots_m(a, parity, Nl, xtol=tol)[::-1] for Nl in truncation_ladder(N)]
    count = len(levels[-1])
    if any(len(lv) < count for lv in levels):
        raise ResolutionError(
            f"coarser truncations lost roots at a={a}: counts {[len(lv) for lv in levels]}"
        )
    points = []
    for i in range(count):
        m = extrapolate([lv[i] for lv in levels], DEFAULT_ORDERS)
        if m <= 0:
            continue
        points.append(SpectralPoint(a=a, parity=parity, eps=1.0 - m * m, m=m))
    return points


def full_spectrum(a: float, N: int = 128, extrapolate_N: bool = True) -> SpectrumResult:
    """
    Merged spectrum of both parity sectors, sorted by eigenvalue.

    Raises
    ------
    ConsistencyError
        If the sorted eigenvalues do not alternate even, odd, even, ...
    """
    if a < 0:
        raise ConfigurationError("window half-width must be >= 0")
    tolerances = {"root_m": 1e-15, "singular_ratio": SINGULAR_TOL}
    if a == 0:
        return SpectrumResult(a=0.0, points=[], N_used=N, tolerances=tolerances)
    pts = []
    for parity in (Parity.EVEN, Parity.ODD):
        pts.extend(eigenvalues_in_sector(a, parity, N, extrapolate_N=extrapolate_N))
    pts.sort(key=lambda p: p.eps)
    out = []
    for n, p in enumerate(pts):
        if p.parity is not parity_of_index(n):
            raise ConsistencyError(
                f"eigenvalue {n} at a={a} has parity {p.parity}; a root was missed, raise N"
            )
        out.append(SpectralPoint(a=p.a, parity=p.parity, eps=p.eps, m=p.m, n=n))
    return SpectrumResult(a=a, points=out, N_used=N, tolerances=tolerances)


def eigenvalue_n(n: int, a: float, N: int = 128, extrapolate_N: bool = True) -> SpectralPoint:
    """The n-th eigenvalue (n = 0 ground state) at half-width ``a``."""
    parity = parity_of_index(n)
    sector = eigenvalues_in_sector(a, parity, N, extrapolate_N=extrapolate_N)
    if len(sector) <= n // 2:
        raise CurveGapError(f"eigenvalue {n} does not exist at a={a}", a)
    p = sector[n // 2]
    return SpectralPoint(a=p.a, parity=p.parity, eps=p.eps, m=p.m, n=n)


def eigenvalue_curve(n: int, a_grid, N: int = 128, extrapolate_N: bool = True) -> list[tuple[float, float]]:
    """Samples ``(a, lambda_n(a))`` along ``a_grid``."""
    return [(float(a), eigenvalue_n(n, a, N, extrapolate_N).lam) for a in a_grid]
