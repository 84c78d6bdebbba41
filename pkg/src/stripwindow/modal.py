"""
Transverse bases and longitudinal exponents.

Outside the window the cross-section carries the Dirichlet-Dirichlet modes

    chi_j(x2) = sqrt(2/d) sin(pi j x2 / d),

inside it the Neumann(x2=0)-Dirichlet(x2=d) modes

    phi_k(x2) = sqrt(2/d) sin(pi (k - 1/2) (d - x2) / d).

Longitudinal dependence is governed by

    q_j = (pi/d) sqrt(j**2 - eps),   p_k = (pi/d) sqrt((k - 1/2)**2 - eps).

For ``1/4 < eps <= 1`` every ``q_j`` is real while ``p_1 = i beta`` with
``beta = sqrt(eps - 1/4)`` is oscillatory; the hyperbolic window factors
of the k = 1 mode are reduced to their trigonometric forms so that every
quantity stays real.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .geometry import ConfigurationError, Parity

SQRT3 = math.sqrt(3.0)
POLE_GUARD = 1e-12


class PoleError(ArithmeticError):
    """The k = 1 window term sits on a pole of tan/cot."""


def _check_index(j):
    if int(j) != j or j < 1:
        raise ConfigurationError(f"mode index must be a positive integer, got {j}")


def _check_x2(x2, d):
    x2 = np.asarray(x2, dtype=float)
    if np.any(x2 < 0) or np.any(x2 > d):
        raise ConfigurationError(f"x2 outside [0, {d}]")
    return x2


def chi(j: int, x2, d: float = math.pi):
    """Dirichlet-Dirichlet transverse mode ``chi_j``."""
    _check_index(j)
    x2 = _check_x2(x2, d)
    return math.sqrt(2.0 / d) * np.sin(math.pi * j * x2 / d)


def phi(k: int, x2, d: float = math.pi):
    """Neumann-Dirichlet transverse mode ``phi_k`` (half-integer frequency)."""
    _check_index(k)
    x2 = _check_x2(x2, d)
    return math.sqrt(2.0 / d) * np.sin(math.pi * (k - 0.5) * (d - x2) / d)


def overlap(j: int, k: int) -> float:
    """
    Inner product ``(chi_j, phi_k)`` over ``(0, d)``.

    The value is independent of ``d``:

        (chi_j, phi_k) = (-1)**(k+1) (2/pi) j / (j**2 - (k - 1/2)**2).
    """
    _check_index(j)
    _check_index(k)
    nu = k - 0.5
    sign = 1.0 if k % 2 == 1 else -1.0
    return sign * (2.0 / math.pi) * j / (j * j - nu * nu)


def overlap_reflected(j: int, k: int) -> float:
    """
    Inner product of ``chi_j(d - x2)`` with ``phi_k``.

    This is the same family with the outside modes measured from the top
    wall, ``((-1)**(j-k)/pi) * 2j / (j**2 - (k-1/2)**2)``; it differs from
    :func:`overlap` by the row sign ``(-1)**(j+1)``.
    """
    _check_index(j)
    _check_index(k)
    sign = 1.0 if (j - k) % 2 == 0 else -1.0
    return sign / math.pi * 2.0 * j / (j * j - (k - 0.5) ** 2)


@lru_cache(maxsize=8)
def _overlap_block(size: int) -> np.ndarray:
    j = np.arange(1, size + 1, dtype=float)[:, None]
    nu = np.arange(1, size + 1, dtype=float)[None, :] - 0.5
    sign = np.where(np.arange(1, size + 1) % 2 == 1, 1.0, -1.0)[None, :]
    table = sign * (2.0 / math.pi) * j / (j * j - nu * nu)
    table.setflags(write=False)
    return table


def overlap_table(N: int) -> np.ndarray:
    """Read-only ``N x N`` table of overlaps, rows ``j``, columns ``k``."""
    if N < 1:
        raise ConfigurationError("truncation order must be >= 1")
    size = 1 << max(6, (N - 1).bit_length())
    return _overlap_block(size)[:N, :N]


def q_exponent(j: int, eps: float, d: float = math.pi) -> float:
    """Outside decay rate ``q_j``; exact zero for ``j = 1`` at ``eps = 1``."""
    _check_index(j)
    if eps > j * j:
        raise ConfigurationError(f"eps={eps} above the j={j} outside threshold")
    if j == 1 and eps == 1.0:
        return 0.0
    return math.pi / d * math.sqrt(j * j - eps)


def q_exponents(N: int, m: float) -> np.ndarray:
    """
    All outside rates for ``j = 1..N`` written through ``m = sqrt(1 - eps)``.

    ``q_1 = m`` and ``q_j = sqrt(j**2 - 1 + m**2)``; parametrizing by ``m``
    keeps near-threshold rates free of cancellation.
    """
    j = np.arange(1, N + 1, dtype=float)
    q = np.sqrt(j * j - 1.0 + m * m)
    q[0] = m
    return q


def window_beta(eps: float) -> float:
    """Oscillation frequency ``beta = sqrt(eps - 1/4)`` of the k = 1 window mode."""
    if eps <= 0.25:
        raise ConfigurationError("the k = 1 window mode is oscillatory only for eps > 1/4")
    return math.sqrt(eps - 0.25)


def p_exponents(N: int, eps: float) -> np.ndarray:
    """Real window rates ``p_k`` for ``k = 2..N`` (empty for ``N = 1``)."""
    nu = np.arange(2, N + 1, dtype=float) - 0.5
    return np.sqrt(nu * nu - eps)


def hyperbolic_terms(p: np.ndarray, a: float, parity: Parity) -> np.ndarray:
    """``p tanh(p a)`` (even) or ``p coth(p a)`` (odd) for real ``p``."""
    if parity is Parity.EVEN:
        return p * np.tanh(p * a)
    return p / np.tanh(p * a)


def p_term(k: int, eps: float, a: float, parity: Parity | str) -> float:
    """
    Window term of the matching matrix for column ``k``.

    Real modes give ``p_k tanh(p_k a)`` (even) or ``p_k coth(p_k a)`` (odd).
    For ``k = 1`` with ``p_1 = i beta`` these reduce to ``-beta tan(beta a)``
    and ``beta cot(beta a)``.

    Raises
    ------
    PoleError
        If ``k = 1`` and ``a`` lies within the guard band of a tan/cot pole.
    """
    _check_index(k)
    parity = Parity.parse(parity)
    if a <= 0:
        raise ConfigurationError("window half-width must be positive")
    if not 0.25 < eps <= 1.0:
        raise ConfigurationError(f"eps={eps} outside (1/4, 1]")
    if k == 1:
        beta = window_beta(eps)
        c, s = math.cos(beta * a), math.sin(beta * a)
        if parity is Parity.EVEN:
            if abs(c) < POLE_GUARD:
                raise PoleError(f"cos(beta a) = {c:.3e}: pole of tan")
            return -beta * s / c
        if abs(s) < POLE_GUARD:
            raise PoleError(f"sin(beta a) = {s:.3e}: pole of cot")
        return beta * c / s
    p = math.sqrt((k - 0.5) ** 2 - eps)
    return float(hyperbolic_terms(np.array([p]), a, parity)[0])
