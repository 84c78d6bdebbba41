"""
Near-threshold coefficient ``mu_n`` and the asymptotic-law checks.

``mu_n`` is computed two ways: from the longitudinal Dirichlet energy of the
threshold resonance,

    mu_n = (2 / a_n) * integral over the half-strip of |d psi / d x1|**2,

and from the corner coefficient, ``mu_n = pi alpha_n**2 / 4``.  The
verification fits compare both against eigenvalues computed just above
``a_n``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .extrapolation import DEFAULT_ORDERS, extrapolate, truncation_ladder
from .geometry import ConfigurationError, Parity
from .resonance import (
    FitQualityError,
    ResonanceField,
    _evaluate,
    bound_state_field,
    edge_fit,
    threshold_resonance,
)
from .spectrum import eigenvalue_n
from .thresholds import find_threshold
from .workers import ordered_map

DEFAULT_EPS_GRID = tuple(round(0.02 * i, 2) for i in range(1, 11))
POPOV_GRID = (0.4, 0.3, 0.2)
GAP_RESOLUTION = 1e-10


class FitError(FitQualityError):
    """Least-squares problem is underdetermined or otherwise unusable."""


@dataclass(frozen=True)
class MuReport:
    n: int
    a_n: float
    mu_integral: float
    alpha: float
    mu_alpha: float
    rel_diff: float
    N_used: int
    alpha_stderr: float = 0.0

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "a_n": self.a_n,
            "mu_integral": self.mu_integral,
            "alpha": self.alpha,
            "mu_alpha": self.mu_alpha,
            "rel_diff": self.rel_diff,
            "N": self.N_used,
        }


@dataclass
class FitReport:
    """
    Outcome of one verification fit.

    ``sample`` rows are ``(input, observed, predicted)``; ``checks`` maps a
    criterion label to whether it held, and ``extras`` carries the numbers
    those checks were decided on.
    """

    model: str
    coefficients: list
    residual_norm: float
    sample: list
    checks: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "coefficients": [float(c) for c in self.coefficients],
            "residual_norm": float(self.residual_norm),
            "sample": [[float(v) for v in row] for row in self.sample],
            "checks": {k: bool(v) for k, v in self.checks.items()},
            "extras": self.extras,
            "passed": self.passed,
        }


def _stable_inside_terms(p, a, parity):
    """
    ``p**2 (sinh(2pa)/(4p) -+ a/2) / cosh**2(pa)`` (even) and the ``sinh``
    analogue (odd), written through ``exp(-2pa)`` to avoid overflow.
    """
    e = np.exp(-2.0 * p * a)
    if parity is Parity.EVEN:
        return p * p * ((1 - e) / (1 + e) / (2 * p) - 0.5 * a * 4 * e / (1 + e) ** 2)
    return p * p * ((1 + e) / (1 - e) / (2 * p) + 0.5 * a * 4 * e / (1 - e) ** 2)


def mu_from_integral(field: ResonanceField) -> float:
    """
    ``mu_n`` from the Dirichlet energy of ``d psi / d x1``, summed mode by
    mode through transverse orthonormality.

    Raises
    ------
    ConfigurationError
        If ``field`` is not a threshold resonance.
    """
    if not field.is_threshold:
        raise ConfigurationError("mu integral needs a threshold field (eps = 1)")
    a, b, c, N = field.a_ref, field.b, field.c, field.N
    j = np.arange(2, N + 1, dtype=float)
    q = np.sqrt(j * j - 1.0)
    # the j = 1 outside mode is constant in x1 and contributes nothing
    i_out = float(np.sum(c[1:] ** 2 * q / 2.0))
    beta = math.sqrt(0.75)
    s2 = math.sin(2 * beta * a) / (4 * beta)
    if field.parity is Parity.EVEN:
        i_1 = b[0] ** 2 * beta ** 2 * (a / 2 - s2) / math.cos(beta * a) ** 2
    else:
        i_1 = b[0] ** 2 * beta ** 2 * (a / 2 + s2) / math.sin(beta * a) ** 2
    p = np.sqrt((np.arange(2, N + 1) - 0.5) ** 2 - 1.0)
    i_k = float(np.sum(b[1:] ** 2 * _stable_inside_terms(p, a, field.parity)))
    return 2.0 / a * (i_out + i_1 + i_k)


def _graded_rule(lo, hi, toward_lo, panels, nodes):
    """Gauss-Legendre on panels halving in width toward one endpoint."""
    width = hi - lo
    offsets = np.array([width * 2.0 ** -k for k in range(panels)] + [0.0])
    edges = lo + offsets[::-1] if toward_lo else hi - offsets
    t, w = np.polynomial.legendre.leggauss(nodes)
    xs, ws = [], []
    for l, h in zip(edges[:-1], edges[1:]):
        xs.append((t + 1) / 2 * (h - l) + l)
        ws.append(w * (h - l) / 2)
    return np.concatenate(xs), np.concatenate(ws)


def mu_quadrature(field: ResonanceField, panels: int = 16, nodes: int = 16, tail: float = 12.0) -> float:
    """
    Brute-force ``(2/a) * integral |d psi/d x1|**2`` by tensor Gauss-Legendre.

    Each of the rectangles ``[0, a] x [0, pi]`` and ``[a, a + tail] x [0, pi]``
    gets ``panels * nodes`` points per direction on panels graded toward
    the corner ``(a, 0)``, where the integrand behaves like ``1/r``.
    """
    a = field.a_ref
    y, wy = _graded_rule(0.0, math.pi, True, panels, nodes)
    total = 0.0
    for lo, hi, toward_lo in ((0.0, a, False), (a, a + tail, True)):
        x, wx = _graded_rule(lo, hi, toward_lo, panels, nodes)
        X, Y = np.meshgrid(x, y, indexing="ij")
        d1, _ = _evaluate(field, X, Y, "d1")
        total += float(np.einsum("i,j,ij->", wx, wy, d1 * d1))
    return 2.0 / a * total


def mu_from_alpha(alpha: float) -> float:
    """``pi alpha**2 / 4``."""
    return math.pi * alpha * alpha / 4.0


def _mu_at(n, N):
    return mu_from_integral(threshold_resonance(n, N))


def mu_report(n: int, N: int = 512, extrapolate_N: bool = True) -> MuReport:
    """
    Both estimates of ``mu_n``.

    The integral value is extrapolated over ``N/4, N/2, N`` when
    ``extrapolate_N`` is set; ``alpha`` comes from the ``N``-mode field.
    """
    if n < 1:
        raise ConfigurationError("mu_n is defined for n >= 1")
    finest = threshold_resonance(n, N)
    if extrapolate_N:
        coarse = ordered_map(partial(_mu_at, n), truncation_ladder(N)[:-1])
        mu_int = extrapolate(coarse + [mu_from_integral(finest)], DEFAULT_ORDERS)
        a_n = find_threshold(n, N, check=False).a_n
    else:
        mu_int = mu_from_integral(finest)
        a_n = finest.a_ref
    fit = edge_fit(finest)
    mu_a = mu_from_alpha(fit.alpha)
    return MuReport(n=n, a_n=a_n, mu_integral=mu_int, alpha=fit.alpha, mu_alpha=mu_a,
                    rel_diff=abs(mu_int - mu_a) / mu_int, N_used=N, alpha_stderr=fit.stderr)


def _check_grid(eps_grid):
    grid = [float(e) for e in eps_grid]
    if len(grid) < 2:
        raise FitError(f"fit needs at least two grid points, got {len(grid)}")
    if any(not 0 < e <= 0.25 for e in grid) or sorted(grid) != grid:
        raise ConfigurationError("eps grid must be ascending inside (0, 0.25]")
    return np.array(grid)


def _gap_at(n, N, a):
    return eigenvalue_n(n, a, N)


def near_threshold_points(n: int, eps_grid, N: int = 128, a_n: float | None = None):
    """Eigenvalues ``lambda_n(a_n + eps)`` for every ``eps`` in the grid."""
    a_n = find_threshold(n, N, check=False).a_n if a_n is None else a_n
    return a_n, ordered_map(partial(_gap_at, n, N), [a_n + e for e in eps_grid])


def verify_quadratic_law(n: int, eps_grid=DEFAULT_EPS_GRID, N: int = 128, mu: float | None = None,
                         slope_tol: float = 0.05, mu_tol: float = 0.02) -> FitReport:
    """
    Check ``gap(eps) = mu_n**2 eps**2 + O(eps**3)`` just above ``a_n``.

    Two fits: a log-log line whose slope should be 2, and
    ``gap = mu**2 eps**2 + C eps**3`` whose ``mu`` should match the
    reference ``mu`` (the integral value when not given).
    """
    eps = _check_grid(eps_grid)
    mu_ref = mu_report(n).mu_integral if mu is None else mu
    a_n, points = near_threshold_points(n, eps, N)
    gap = np.array([p.gap for p in points])
    slope, intercept = np.polyfit(np.log(eps), np.log(gap), 1)
    A = np.stack([eps ** 2, eps ** 3], axis=1)
    coef, *_ = np.linalg.lstsq(A, gap, rcond=None)
    if coef[0] <= 0:
        raise FitError(f"quadratic coefficient {coef[0]:.3e} is not positive")
    mu_fit = math.sqrt(coef[0])
    pred = A @ coef
    remainder = np.abs(gap - mu_ref ** 2 * eps ** 2) / eps ** 3
    report = FitReport(
        model="gap = mu^2 eps^2 + C eps^3",
        coefficients=[mu_fit, float(coef[1])],
        residual_norm=float(np.linalg.norm(gap - pred)),
        sample=[(e, g, p) for e, g, p in zip(eps, gap, pred)],
        extras={
            "n": n,
            "a_n": a_n,
            "loglog_slope": float(slope),
            "loglog_intercept": float(intercept),
            "mu_fit": mu_fit,
            "mu_reference": mu_ref,
            "mu_rel_diff": abs(mu_fit - mu_ref) / mu_ref,
            "remainder_C": float(remainder.max()),
        },
    )
    report.checks["slope"] = abs(slope - 2.0) <= slope_tol
    report.checks["mu"] = report.extras["mu_rel_diff"] <= mu_tol
    report.checks["gap_increasing"] = bool(np.all(np.diff(gap) > 0))
    return report


def _ground_gap(N, a):
    return eigenvalue_n(0, a, N).gap


def verify_popov(a_grid=POPOV_GRID, N: int = 128, limit_tol: float = 0.25) -> FitReport:
    """
    Ratio ``r(a) = 4 gap_0(a) / a**4`` along a grid of small half-widths.

    The small-window expansion predicts ``r -> 1`` with ``|r - 1| = O(a)``.
    Checks: ``|r - 1|`` strictly decreasing along the grid as given, and
    ``|r - 1| <= limit_tol`` at the smallest ``a``.  Points whose gap is
    below solver resolution are skipped with a warning.
    """
    grid = [float(a) for a in a_grid]
    if any(not 0 < a <= 0.5 for a in grid):
        raise ConfigurationError("Popov grid must lie in (0, 0.5]")
    gaps = ordered_map(partial(_ground_gap, N), grid)
    kept = []
    for a, g in zip(grid, gaps):
        if g < GAP_RESOLUTION:
            warnings.warn(f"gap {g:.2e} at a={a} below solver resolution; skipped")
            continue
        kept.append((a, g))
    if len(kept) < 2:
        raise FitError("fewer than two resolvable Popov points")
    a = np.array([k[0] for k in kept])
    g = np.array([k[1] for k in kept])
    r = 4 * g / a ** 4
    dev = np.abs(r - 1)
    smallest = int(np.argmin(a))
    report = FitReport(
        model="gap = a^4/4 (ratio r = 4 gap / a^4)",
        coefficients=[float(x) for x in r],
        residual_norm=float(np.linalg.norm(r - 1)),
        sample=[(ai, gi, ai ** 4 / 4) for ai, gi in zip(a, g)],
        extras={"a": a.tolist(), "gap": g.tolist(), "ratio": r.tolist(), "deviation": dev.tolist()},
    )
    report.checks["deviation_decreasing"] = bool(np.all(np.diff(dev) < 0))
    report.checks["limit"] = bool(dev[smallest] <= limit_tol)
    return report


def verify_decay_law(n: int, eps_grid=DEFAULT_EPS_GRID, N: int = 128, mu: float | None = None,
                     mu_tol: float = 0.02, linearity: float = 0.1) -> FitReport:
    """
    Check ``m(eps) = mu_n eps + O(eps**2)`` via the affine fit
    ``m/eps = mu + kappa eps``.

    Passes when the intercept matches the reference ``mu`` within ``mu_tol``
    and every residual is at most ``linearity * |kappa| * eps_max``.

    Raises
    ------
    FitError
        For a grid with fewer than two points.
    """
    eps = _check_grid(eps_grid)
    mu_ref = mu_report(n).mu_integral if mu is None else mu
    a_n, points = near_threshold_points(n, eps, N)
    m = np.array([p.m for p in points])
    y = m / eps
    A = np.stack([np.ones_like(eps), eps], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    resid = np.abs(y - pred)
    bound = linearity * abs(coef[1]) * eps.max()
    report = FitReport(
        model="m/eps = mu + kappa eps",
        coefficients=[float(coef[0]), float(coef[1])],
        residual_norm=float(np.linalg.norm(y - pred)),
        sample=[(e, o, p) for e, o, p in zip(eps, y, pred)],
        extras={
            "n": n,
            "a_n": a_n,
            "mu_reference": mu_ref,
            "mu_rel_diff": abs(coef[0] - mu_ref) / mu_ref,
            "max_residual": float(resid.max()),
            "residual_bound": float(bound),
        },
    )
    report.checks["intercept"] = report.extras["mu_rel_diff"] <= mu_tol
    report.checks["linearity"] = bool(resid.max() <= bound)
    return report


def _coefficient_distance(field0, N, e):
    from .geometry import SpectralPoint

    a = field0.a_ref + e
    guess = SpectralPoint(a=a, parity=field0.parity, eps=1.0, m=0.0, n=field0.n)
    # the emerging eigenvalue has the smallest decay rate of its sector
    f = bound_state_field(a, guess, N, grid=np.geomspace(1e-5, 0.5, 300))
    return float(np.linalg.norm(f.b - field0.b))


def verify_eigenfunction_convergence(n: int, eps_grid=DEFAULT_EPS_GRID, N: int = 256,
                                     growth: float = 2.0) -> FitReport:
    """
    Check ``||b(a_n + eps) - b(a_n)|| <= C eps`` for normalized window
    coefficients of the ``N``-mode system.

    ``eps`` is measured from that system's own critical width.  ``C`` is
    the largest observed ratio; the check asks that the ratio not grow as
    ``eps`` shrinks: ``ratio(eps_min) <= growth * ratio(eps_max)``.
    """
    eps = _check_grid(eps_grid)
    field0 = threshold_resonance(n, N)
    dist = np.array(ordered_map(partial(_coefficient_distance, field0, N), eps))
    ratio = dist / eps
    C = float(ratio.max())
    report = FitReport(
        model="||b(a_n+eps) - b(a_n)|| <= C eps",
        coefficients=[C],
        residual_norm=float(np.linalg.norm(dist - C * eps)),
        sample=[(e, d, C * e) for e, d in zip(eps, dist)],
        extras={"n": n, "a_n_truncated": field0.a_ref, "ratio": ratio.tolist()},
    )
    report.checks["bounded_ratio"] = bool(ratio[0] <= growth * ratio[-1])
    return report
