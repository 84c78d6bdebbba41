"""
Structural checks shared by the test suite and ``verify invariants``.

Each check returns a :class:`FitReport` whose ``checks`` decide pass/fail
and whose ``extras`` hold the measured numbers.
"""

from __future__ import annotations

import math

import numpy as np

from .coefficients import FitReport
from .geometry import Parity, parity_of_index
from .matching import regularized_det, regularized_logdet
from .modal import chi, overlap, overlap_table, phi
from .resonance import interface_mismatch, threshold_resonance
from .spectrum import eigenvalue_n


def overlap_completeness(N: int = 2048, indices=(1, 2, 3, 4, 5)) -> FitReport:
    """
    Partial Parseval sums ``sum_j (chi_j, phi_k)**2`` and
    ``sum_k (chi_j, phi_k)**2`` over ``N`` terms; both tend to 1 from below.
    """
    O = overlap_table(N)
    by_k = [float(np.sum(O[:, k - 1] ** 2)) for k in indices]
    by_j = [float(np.sum(O[j - 1, :] ** 2)) for j in indices]
    sums = by_k + by_j
    rep = FitReport(
        model="partial Parseval sums in (0.99, 1]",
        coefficients=sums,
        residual_norm=float(np.linalg.norm(1 - np.array(sums))),
        sample=[(i, s, 1.0) for i, s in zip(list(indices) * 2, sums)],
        extras={"N": N, "over_j": by_k, "over_k": by_j},
    )
    rep.checks["completeness"] = all(0.99 < s <= 1.0 + 1e-14 for s in sums)
    return rep


def overlap_quadrature(jmax: int = 10, kmax: int = 10, nodes: int = 400, tol: float = 1e-10) -> FitReport:
    """Closed-form overlaps against Gauss-Legendre quadrature of ``chi_j phi_k``."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    x = (t + 1) * math.pi / 2
    w = w * math.pi / 2
    worst = 0.0
    rows = []
    for j in range(1, jmax + 1):
        cj = chi(j, x)
        for k in range(1, kmax + 1):
            num = float(np.sum(w * cj * phi(k, x)))
            err = abs(num - overlap(j, k))
            worst = max(worst, err)
            rows.append((j * 1000 + k, num, overlap(j, k)))
    rep = FitReport(model="overlap closed form vs quadrature", coefficients=[worst],
                    residual_norm=worst, sample=rows, extras={"max_error": worst})
    rep.checks["overlap_closed_form"] = worst <= tol
    return rep


def pole_positions(eps: float, parity: Parity, a_max: float) -> list[float]:
    """Half-widths where ``tan`` (even) or ``cot`` (odd) of ``beta a`` blows up."""
    beta = math.sqrt(eps - 0.25)
    offset = 0.5 if parity is Parity.EVEN else 1.0
    out = []
    k = 0
    while (a := (k + offset) * math.pi / beta) <= a_max:
        out.append(a)
        k += 1
    return out


def determinant_across_poles(N: int = 64, eps_values=(1.0, 0.8, 0.6), a_max: float = 12.0,
                             width: float = 0.05, points: int = 41) -> FitReport:
    """
    The regularized determinant stays finite on grids straddling every
    ``tan``/``cot`` pole, each grid hitting the pole exactly.
    """
    bad = 0
    checked = 0
    largest = 0.0
    for eps in eps_values:
        for parity in Parity:
            for pole in pole_positions(eps, parity, a_max):
                grid = np.concatenate([np.linspace(pole - width, pole + width, points), [pole]])
                for a in grid:
                    det = regularized_det(a, eps, parity, N)
                    _, logdet = regularized_logdet(a, eps, parity, N)
                    checked += 1
                    if not (math.isfinite(det) and math.isfinite(logdet)):
                        bad += 1
                    else:
                        largest = max(largest, logdet)
    rep = FitReport(model="regularized determinant finite at poles", coefficients=[bad],
                    residual_norm=float(bad), sample=[(checked, bad, 0.0)],
                    extras={"evaluations": checked, "non_finite": bad, "max_logdet": float(largest)})
    rep.checks["finite_across_poles"] = bad == 0 and checked > 0
    return rep


def interface_continuity(n: int = 1, N: int = 256, tol: float = 1e-3) -> FitReport:
    """Inside and outside series agree on ``x1 = a`` away from the corner."""
    field = threshold_resonance(n, N)
    gap = interface_mismatch(field)
    rep = FitReport(model="interface continuity", coefficients=[gap], residual_norm=gap,
                    sample=[(N, gap, tol)], extras={"n": n, "N": N, "relative_mismatch": gap})
    rep.checks["interface_continuity"] = gap <= tol
    return rep


def monotone_eigenvalues(curves=((0, (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)), (1, (2.4, 2.8, 3.2, 3.6, 4.0))),
                         N: int = 64) -> FitReport:
    """``lambda_n(a)`` strictly decreasing along sampled grids."""
    rows = []
    ok = True
    for n, grid in curves:
        lam = [eigenvalue_n(n, a, N).lam for a in grid]
        ok &= bool(np.all(np.diff(lam) < 0))
        rows.extend((a, l, float(parity_of_index(n).sign)) for a, l in zip(grid, lam))
    rep = FitReport(model="lambda_n(a) strictly decreasing", coefficients=[], residual_norm=0.0,
                    sample=rows, extras={"N": N})
    rep.checks["monotone_decrease"] = ok
    return rep


def invariant_suite() -> dict[str, FitReport]:
    return {
        "overlap_completeness": overlap_completeness(),
        "overlap_quadrature": overlap_quadrature(),
        "interface_continuity": interface_continuity(),
        "determinant_across_poles": determinant_across_poles(),
        "monotone_eigenvalues": monotone_eigenvalues(),
    }
