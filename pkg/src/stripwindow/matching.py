"""
Truncated matching matrix and its pole-free regularization.

Smoothness of the half-strip Ansatz across ``x1 = a`` gives, for the
window coefficients ``b``, the linear system ``C b = 0`` with

    C_jk = (q_j + P_k) (chi_j, phi_k),

where ``P_k = p_k tanh(p_k a)`` (even sector) or ``p_k coth(p_k a)``
(odd sector).  The k = 1 column carries the tan/cot poles of the
oscillatory window mode; the regularized matrix multiplies that column by
``cos(beta a)`` (even) or ``sin(beta a)`` (odd), which leaves its zero set
unchanged and makes the determinant an entire function of ``(a, eps)``.

Internally every routine is parametrized by the decay rate
``m = sqrt(1 - eps)`` so that ``q_1 = m`` is exact near threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ConfigurationError, Parity
from .modal import (
    POLE_GUARD,
    PoleError,
    hyperbolic_terms,
    overlap_table,
    p_exponents,
    q_exponents,
)

KERNEL_TOL = 1e-8


class NotSingularError(ArithmeticError):
    """The matching matrix has no numerical kernel at the requested point."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class MatchingMatrix:
    a: float
    eps: float
    parity: Parity
    N: int
    entries: np.ndarray


@dataclass(frozen=True)
class KernelVector:
    """Unit null vector ``b`` of ``C`` and its relative residual."""

    b: np.ndarray
    residual: float


def decay_rate(eps: float) -> float:
    """``m = sqrt(1 - eps)``, exactly zero at threshold."""
    if eps > 1.0:
        raise ConfigurationError(f"eps={eps} above the continuum threshold")
    return 0.0 if eps == 1.0 else math.sqrt(1.0 - eps)


def _check(a, N):
    if not a > 0:
        raise ConfigurationError(f"window half-width must be positive, got {a}")
    if int(N) != N or N < 1:
        raise ConfigurationError(f"truncation order must be a positive integer, got {N}")


def _check_m(m):
    if not 0.0 <= m < math.sqrt(0.75):
        raise ConfigurationError(f"decay rate m={m} outside [0, sqrt(3)/2)")


def column_one_scale(a: float, eps: float, parity: Parity) -> float:
    """Factor ``cos(beta a)`` or ``sin(beta a)`` applied to column 1."""
    beta = math.sqrt(eps - 0.25)
    return math.cos(beta * a) if parity is Parity.EVEN else math.sin(beta * a)


def regularized_matrix_m(a: float, m: float, parity: Parity, N: int) -> np.ndarray:
    """Regularized ``N x N`` matching matrix at decay rate ``m``."""
    _check(a, N)
    _check_m(m)
    parity = Parity.parse(parity)
    eps = 1.0 - m * m
    O = overlap_table(N)
    q = q_exponents(N, m)
    C = np.empty((N, N))
    if N > 1:
        P = hyperbolic_terms(p_exponents(N, eps), a, parity)
        C[:, 1:] = (q[:, None] + P[None, :]) * O[:, 1:]
    beta = math.sqrt(eps - 0.25)
    c, s = math.cos(beta * a), math.sin(beta * a)
    if parity is Parity.EVEN:
        C[:, 0] = (q * c - beta * s) * O[:, 0]
    else:
        C[:, 0] = (q * s + beta * c) * O[:, 0]
    return C


def regularized_matrix(a: float, eps: float, parity: Parity | str, N: int) -> np.ndarray:
    return regularized_matrix_m(a, decay_rate(eps), Parity.parse(parity), N)


def assemble(a: float, eps: float, parity: Parity | str, N: int) -> MatchingMatrix:
    """
    Raw matching matrix ``C(a, eps)`` for one parity sector.

    Raises
    ------
    PoleError
        When ``a`` is within the guard band of a tan/cot pole of the k = 1
        column; use :func:`regularized_det` there.
    """
    parity = Parity.parse(parity)
    C = regularized_matrix(a, eps, parity, N)
    cs = column_one_scale(a, eps, parity)
    if abs(cs) < POLE_GUARD:
        raise PoleError(f"column-1 scale {cs:.3e} within the pole guard band")
    C[:, 0] /= cs
    return MatchingMatrix(a=a, eps=eps, parity=parity, N=N, entries=C)


def regularized_logdet_m(a: float, m: float, parity: Parity, N: int) -> tuple[float, float]:
    return np.linalg.slogdet(regularized_matrix_m(a, m, parity, N))


def regularized_logdet(a: float, eps: float, parity: Parity | str, N: int) -> tuple[float, float]:
    """Sign and log-magnitude of the regularized determinant."""
    return regularized_logdet_m(a, decay_rate(eps), Parity.parse(parity), N)


def regularized_det(a: float, eps: float, parity: Parity | str, N: int) -> float:
    """
    Determinant of the regularized matching matrix.

    The magnitude grows roughly like ``N!``; beyond ``N ~ 150`` the value
    overflows double precision and :func:`regularized_logdet` should be
    used instead (the root finders do).
    """
    return float(np.linalg.det(regularized_matrix(a, eps, parity, N)))


def smallest_singular(a: float, eps: float, parity: Parity | str, N: int) -> float:
    """Smallest singular value of the regularized matrix."""
    return float(np.linalg.svd(regularized_matrix(a, eps, parity, N), compute_uv=False)[-1])


def singular_ratio_m(a: float, m: float, parity: Parity, N: int) -> float:
    s = np.linalg.svd(regularized_matrix_m(a, m, parity, N), compute_uv=False)
    return float(s[-1] / s[0])


def kernel_m(a: float, m: float, parity: Parity, N: int, tol: float = KERNEL_TOL) -> KernelVector:
    parity = Parity.parse(parity)
    R = regularized_matrix_m(a, m, parity, N)
    _, s, vt = np.linalg.svd(R)
    residual = float(s[-1] / s[0])
    if residual > tol:
        raise NotSingularError(
            f"relative smallest singular value {residual:.3e} exceeds {tol:.1e}", residual
        )
    b = vt[-1].copy()
    # regularized column 1 absorbed the scale; undo it on the coefficient
    b[0] *= column_one_scale(a, 1.0 - m * m, parity)
    b /= np.linalg.norm(b)
    return KernelVector(b=b, residual=residual)


def kernel(a: float, eps: float, parity: Parity | str, N: int, tol: float = KERNEL_TOL) -> KernelVector:
    """
    Unit null vector of ``C(a, eps)`` from the smallest singular direction.

    Raises
    ------
    NotSingularError
        If the relative smallest singular value exceeds ``tol``.
    """
    return kernel_m(a, decay_rate(eps), Parity.parse(parity), N, tol)
