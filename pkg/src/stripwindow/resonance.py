"""
Threshold resonance and bound-state fields in series form.

A field is stored through its window coefficients ``b`` (interface values
in the ``phi`` basis) and outside coefficients ``c = O b`` (interface
values in the ``chi`` basis).  On the half-strip ``x1 >= 0``

    inside  (x1 <= a):  psi = sum_k b_k f_k(x1) phi_k(x2),  f_k(a) = 1,
    outside (x1 >= a):  psi = sum_j c_j exp(-q_j (x1 - a)) chi_j(x2),

with ``f_1 = cos(beta x1)/cos(beta a)`` (even) or ``sin(beta x1)/sin(beta a)``
(odd) and hyperbolic ``f_k`` for ``k >= 2``.  Fields are normalized so the
far-field amplitude ``c_1`` equals 1, i.e. ``psi ~ sqrt(2/pi) sin(x2)``.

All coordinates are normalized (``d = pi``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import jv

from .geometry import ConfigurationError, Parity, SpectralPoint, parity_of_index
from .matching import kernel_m
from .modal import overlap_table
from .spectrum import sector_roots_m
from .thresholds import raw_threshold

SQRT_2_PI = math.sqrt(2.0 / math.pi)
FIT_QUALITY = 0.05
_CHUNK = 2_000_000


class AccuracyWarning(UserWarning):
    """Evaluation point closer to the corner than the series resolves."""


class FitQualityError(RuntimeError):
    """Corner-coefficient fit is not dominated by its leading term."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class ResonanceField:
    """
    Series representation of a threshold resonance (``eps = 1``) or a bound
    state.  ``alpha`` is left unset until :func:`edge_coefficient` fills it
    through :func:`with_alpha`.
    """

    n: int
    parity: Parity
    a_ref: float
    eps: float
    m: float
    b: np.ndarray
    c: np.ndarray
    c1: float
    N: int
    alpha: float | None = None

    @property
    def is_threshold(self) -> bool:
        return self.m == 0.0


@dataclass(frozen=True)
class EdgeFit:
    """
    Corner coefficient estimate.

    ``values`` holds the per-radius estimates (arc method) or the fitted
    model coefficients (ray method); ``spread`` is the relative scatter of
    the per-radius estimates or the fit residual relative to the leading
    term.
    """

    alpha: float
    stderr: float
    spread: float
    method: str
    radii: tuple
    values: tuple


def corner_accuracy_radius(N: int) -> float:
    """Distance from the corner inside which an ``N``-term series is unreliable."""
    return 0.02 * math.pi * 512.0 / N


def _exponents(N, m):
    eps = 1.0 - m * m
    beta = math.sqrt(eps - 0.25)
    nu = np.arange(2, N + 1) - 0.5
    p = np.sqrt(nu * nu - eps)
    j = np.arange(1, N + 1, dtype=float)
    q = np.sqrt(j * j - 1.0 + m * m)
    q[0] = m
    return beta, p, q


def _build(n, parity, a, m, b, N):
    c = overlap_table(N) @ b
    if c[0] == 0.0:
        raise ConfigurationError("kernel vector has no far-field component")
    b = b / c[0]
    c = c / c[0]
    b.setflags(write=False)
    c.setflags(write=False)
    return ResonanceField(n=n, parity=parity, a_ref=a, eps=1.0 - m * m, m=m, b=b, c=c, c1=1.0, N=N)


def normalize(field: ResonanceField) -> ResonanceField:
    """Rescale so that ``c1 = 1``; the identity on a normalized field."""
    s = field.c[0]
    if s == 1.0:
        return field
    b = field.b / s
    c = field.c / s
    b.setflags(write=False)
    c.setflags(write=False)
    return replace(field, b=b, c=c, c1=1.0, alpha=None)


def threshold_resonance(n: int, N: int = 512, a_n: float | None = None) -> ResonanceField:
    """
    Bounded solution at the continuum threshold for critical width ``a_n``.

    The kernel is taken at the root of the ``N``-mode determinant (not the
    extrapolated width) so that the coefficients solve the truncated
    system they belong to.  Passing ``a_n`` skips the root search.
    """
    if n < 1:
        raise ConfigurationError("threshold resonances exist for n >= 1")
    parity = parity_of_index(n)
    a = raw_threshold(n, N) if a_n is None else float(a_n)
    kv = kernel_m(a, 0.0, parity, N)
    return _build(n, parity, a, 0.0, kv.b.copy(), N)


def bound_state_field(a: float, point: SpectralPoint, N: int = 512, grid=None) -> ResonanceField:
    """
    Eigenfunction at half-width ``a`` for the eigenvalue ``point``.

    The decay rate used is the root of the ``N``-mode system nearest to
    ``point.m``; ``grid`` optionally replaces the default decay-rate scan.
    """
    parity = Parity.parse(point.parity)
    roots = sector_roots_m(a, parity, N, grid=grid)
    if not roots:
        raise ConfigurationError(f"no {parity.value} eigenvalue at a={a} with N={N}")
    m = min(roots, key=lambda r: abs(r - point.m))
    kv = kernel_m(a, m, parity, N)
    n = point.n if point.n is not None else -1
    return _build(n, parity, a, m, kv.b.copy(), N)


def with_alpha(field: ResonanceField, alpha: float) -> ResonanceField:
    return replace(field, alpha=float(alpha))


def _inside_factors(field, X, beta, p, derivative=False):
    """Longitudinal factors ``f_k`` (or ``f_k'``) at points ``X`` (column)."""
    a = field.a_ref
    grow = np.exp(p * (X - a))
    if field.parity is Parity.EVEN:
        c1 = math.cos(beta * a)
        if derivative:
            f1 = -beta * np.sin(beta * X) / c1
            fk = p * grow * (1 - np.exp(-2 * p * X)) / (1 + np.exp(-2 * p * a))
        else:
            f1 = np.cos(beta * X) / c1
            fk = grow * (1 + np.exp(-2 * p * X)) / (1 + np.exp(-2 * p * a))
    else:
        s1 = math.sin(beta * a)
        if derivative:
            f1 = beta * np.cos(beta * X) / s1
            fk = p * grow * (1 + np.exp(-2 * p * X)) / (1 - np.exp(-2 * p * a))
        else:
            f1 = np.sin(beta * X) / s1
            fk = grow * (1 - np.exp(-2 * p * X)) / (1 - np.exp(-2 * p * a))
    return np.concatenate([f1, fk], axis=1)


def _series(field, x1, x2, side, kind):
    """
    One representation on flat arrays ``x1 >= 0``.

    ``kind`` is ``"value"``, ``"d1"`` or ``"d2"``; ``side`` selects the
    inside or outside series regardless of where the point lies.
    """
    N = field.N
    beta, p, q = _exponents(N, field.m)
    out = np.empty(x1.shape)
    step = max(1, _CHUNK // N)
    for s in range(0, len(x1), step):
        X = x1[s:s + step, None]
        Y = x2[s:s + step, None]
        if side == "inside":
            nu = np.arange(1, N + 1) - 0.5
            F = _inside_factors(field, X, beta, p, derivative=(kind == "d1"))
            if kind == "d2":
                T = -nu * np.cos(nu * (math.pi - Y))
            else:
                T = np.sin(nu * (math.pi - Y))
            out[s:s + step] = SQRT_2_PI * np.sum(F * T * field.b, axis=1)
        else:
            j = np.arange(1, N + 1)
            E = np.exp(-q * (X - field.a_ref))
            if kind == "d1":
                E = -q * E
            T = j * np.cos(j * Y) if kind == "d2" else np.sin(j * Y)
            out[s:s + step] = SQRT_2_PI * np.sum(E * T * field.c, axis=1)
    return out


def _evaluate(field, x1, x2, kind):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    x1, x2 = np.broadcast_arrays(x1, x2)
    shape = x1.shape
    x1 = x1.ravel()
    x2 = x2.ravel()
    if np.any(x2 < 0) or np.any(x2 > math.pi):
        raise ConfigurationError("x2 outside [0, pi]")
    sign = 1.0 if field.parity is Parity.EVEN else -1.0
    ax = np.abs(x1)
    out = np.empty(ax.shape)
    ins = ax <= field.a_ref
    for mask, side in ((ins, "inside"), (~ins, "outside")):
        if mask.any():
            out[mask] = _series(field, ax[mask], x2[mask], side, kind)
    # psi(-x1) = sign psi(x1); d/dx1 flips that sign
    flip = sign if kind != "d1" else -sign
    out = np.where(x1 < 0, flip * out, out)
    r = np.hypot(ax - field.a_ref, x2)
    close = r < corner_accuracy_radius(field.N)
    return out.reshape(shape), close.reshape(shape)


def eval_field(field: ResonanceField, x1, x2, with_accuracy: bool = False):
    """
    Field values at ``(x1, x2)``; arrays broadcast.

    Negative ``x1`` uses the parity extension.  Points within
    :func:`corner_accuracy_radius` of a corner raise an
    :class:`AccuracyWarning`; with ``with_accuracy`` the boolean mask of
    such points is returned alongside the values.
    """
    vals, close = _evaluate(field, x1, x2, "value")
    if close.any():
        warnings.warn(
            f"{int(close.sum())} points within r_min={corner_accuracy_radius(field.N):.3g} "
            f"of the corner at N={field.N}",
            AccuracyWarning,
            stacklevel=2,
        )
    if with_accuracy:
        return vals, close
    return vals


def eval_gradient(field: ResonanceField, x1, x2):
    """``(dpsi/dx1, dpsi/dx2)`` at ``(x1, x2)``."""
    d1, _ = _evaluate(field, x1, x2, "d1")
    d2, _ = _evaluate(field, x1, x2, "d2")
    return d1, d2


def eval_side(field: ResonanceField, side: str, x1, x2) -> np.ndarray:
    """Evaluate only the ``"inside"`` or ``"outside"`` series (no parity extension)."""
    if side not in ("inside", "outside"):
        raise ConfigurationError(f"unknown side {side!r}")
    x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
    return _series(field, x1.ravel(), x2.ravel(), side, "value").reshape(x1.shape)


def interface_mismatch(field: ResonanceField, samples: int = 64) -> float:
    """
    Largest gap between the two series on ``x1 = a_ref``, relative to the
    field's sup norm.  Samples avoid the corner's unresolved zone.
    """
    x2 = np.linspace(corner_accuracy_radius(field.N), math.pi, samples)
    x1 = np.full_like(x2, field.a_ref)
    diff = np.abs(eval_side(field, "inside", x1, x2) - eval_side(field, "outside", x1, x2))
    return float(diff.max() / sup_norm(field))


def sup_norm(field: ResonanceField, n1: int = 241, n2: int = 61) -> float:
    """Grid estimate of ``max |psi|`` over ``[0, a_ref + 6] x [0, pi]``."""
    x1 = np.linspace(0.0, field.a_ref + 6.0, n1)
    x2 = np.linspace(0.0, math.pi, n2)
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    vals, _ = _evaluate(field, X1, X2, "value")
    return float(np.abs(vals).max())


def _arc_amplitude(field, R, nodes=64):
    """Leading Fourier-Bessel amplitude of the corner expansion on radius ``R``."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    theta = np.concatenate([(t + 1) * math.pi / 4, (t + 3) * math.pi / 4])
    wt = np.concatenate([w, w]) * math.pi / 4
    x1 = field.a_ref + R * np.cos(theta)
    x2 = R * np.sin(theta)
    vals, _ = _evaluate(field, x1, x2, "value")
    k = math.sqrt(field.eps)
    proj = (2.0 / math.pi) * np.sum(wt * vals * np.sin(theta / 2))
    # J_{1/2}(k r) ~ sqrt(2/pi) (k r)**0.5 at the corner
    return proj / jv(0.5, k * R) * SQRT_2_PI * math.sqrt(k)


def default_radii(N: int, count: int = 8) -> np.ndarray:
    lo = max(0.05 * math.pi, corner_accuracy_radius(N))
    return np.linspace(lo, 0.25 * math.pi, count)


def edge_fit(field: ResonanceField, radii=None, method: str = "arc") -> EdgeFit:
    """
    Coefficient ``alpha`` of ``r**0.5 sin(theta/2)`` at the corner ``(a_ref, 0)``.

    Polar angle ``theta`` is 0 along the Dirichlet wall (``x1 > a_ref``)
    and ``pi`` along the window.

    Parameters
    ----------
    radii : sequence of float, optional
        At least 8 radii, none inside :func:`corner_accuracy_radius`.
    method : {"arc", "ray"}
        ``"arc"`` projects the field on each circle ``r = R`` onto
        ``sin(theta/2)``.  The local solution is an exact series
        ``sum_m A_m J_{m-1/2}(k r) sin((m-1/2) theta)``, so the projection
        isolates ``A_1`` at every radius; the spread across radii measures
        series error.  ``"ray"`` fits ``psi(a_ref, r)`` on the vertical ray
        against ``(sqrt2/2) alpha r**0.5 + c2 r + c3 r**1.5``; that model
        ignores the ``J_{1/2}`` curvature and is kept as a diagnostic.

    Raises
    ------
    FitQualityError
        Spread or residual above 5% of the leading term.
    """
    radii = default_radii(field.N) if radii is None else np.asarray(radii, dtype=float)
    if len(radii) < 8:
        raise ConfigurationError("corner fit needs at least 8 radii")
    r_min = corner_accuracy_radius(field.N)
    if radii.min() < r_min * (1 - 1e-12):
        warnings.warn(f"radius {radii.min():.3g} inside r_min={r_min:.3g} at N={field.N}",
                      AccuracyWarning, stacklevel=2)
    if method == "arc":
        vals = np.array([_arc_amplitude(field, R) for R in radii])
        alpha = float(vals.mean())
        stderr = float(vals.std(ddof=1) / math.sqrt(len(vals)))
        spread = float((vals.max() - vals.min()) / abs(alpha))
        fit = EdgeFit(alpha, stderr, spread, method, tuple(radii.tolist()), tuple(vals.tolist()))
    elif method == "ray":
        x1 = np.full_like(radii, field.a_ref)
        y, _ = _evaluate(field, x1, radii, "value")
        A = np.stack([math.sqrt(0.5) * radii ** 0.5, radii, radii ** 1.5], axis=1)
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        resid = y - A @ coef
        dof = max(1, len(y) - 3)
        cov = np.linalg.inv(A.T @ A) * (resid @ resid) / dof
        lead = np.abs(A[:, 0] * coef[0]).max()
        spread = float(np.abs(resid).max() / lead)
        fit = EdgeFit(float(coef[0]), float(math.sqrt(cov[0, 0])), spread, method,
                      tuple(radii.tolist()), tuple(coef.tolist()))
    else:
        raise ConfigurationError(f"unknown corner-fit method {method!r}")
    if not fit.spread <= FIT_QUALITY:
        raise FitQualityError(f"corner fit spread {fit.spread:.3f} exceeds {FIT_QUALITY}", fit)
    return fit


def edge_coefficient(field: ResonanceField, radii=None, method: str = "arc") -> float:
    """Corner coefficient ``alpha``; see :func:`edge_fit`."""
    return edge_fit(field, radii, method).alpha
