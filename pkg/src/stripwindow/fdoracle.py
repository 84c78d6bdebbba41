"""
Finite-difference eigenvalues of the half-strip, for cross-checking.

The operator is the 5-point negative Laplacian on ``[0, L] x [0, pi]``:

- Dirichlet at ``x2 = pi``, at ``x1 = L`` and on ``x2 = 0`` for ``x1 >= a``
  (the junction node ``(a, 0)`` included);
- Neumann on the window ``x2 = 0, x1 < a`` by ghost-node reflection;
- Neumann (even) or Dirichlet (odd) at ``x1 = 0``.

Ghost reflection halves the control volume of Neumann boundary nodes.
With those volumes as a diagonal mass ``W`` the stiffness ``A`` is
symmetric, and ``W**-0.5 A W**-0.5`` is the symmetric matrix handed to
the sparse eigensolver.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .extrapolation import extrapolate, richardson
from .geometry import ConfigurationError, Parity

__all__ = [
    "FdConfig",
    "FdIterationError",
    "FdResult",
    "TruncationWarning",
    "assemble_operator",
    "auto_length",
    "discrete_threshold",
    "fd_eigenvalues",
    "fd_gap_extrapolated",
    "richardson",
]

# every eigenvalue lies above the k = 1 window threshold 1/4
DEFAULT_SHIFT = 0.25
FD_ORDERS = (1.0, 2.0)
TAIL_DECAYS = 5.0


class TruncationWarning(UserWarning):
    """Box too short for the eigenfunction's exponential tail."""


class FdIterationError(RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class FdConfig:
    """
    Discretization of the half-strip.

    ``h`` is the nominal spacing; the transverse step is ``pi / round(pi/h)``
    and the longitudinal step ``a / window_cells`` so that ``x1 = a`` is a
    node (``window_cells`` defaults to ``round(a/h)``).  The Dirichlet end
    sits on the first node at or beyond ``L``, see :attr:`L_grid`; without
    a window the step is chosen so that ``L`` itself is a node.
    """

    a: float
    parity: Parity
    L: float
    h: float
    count: int = 1
    shift: float | None = None
    window_cells: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "parity", Parity.parse(self.parity))
        if not self.h > 0:
            raise ConfigurationError("grid spacing must be positive")
        if self.a < 0:
            raise ConfigurationError("window half-width must be >= 0")
        if not self.L > self.a + 2:
            raise ConfigurationError(f"L={self.L} must exceed a + 2 = {self.a + 2}")
        if self.count < 1:
            raise ConfigurationError("count must be >= 1")
        if self.window_cells is not None and self.window_cells < (1 if self.a > 0 else 0):
            raise ConfigurationError("window_cells must cover the window")

    @property
    def transverse_cells(self) -> int:
        return max(2, round(math.pi / self.h))

    @property
    def cells_in_window(self) -> int:
        if self.a == 0:
            return 0
        return self.window_cells if self.window_cells is not None else max(1, round(self.a / self.h))

    @property
    def h1(self) -> float:
        na = self.cells_in_window
        return self.a / na if na else self.L / max(1, round(self.L / self.h))

    @property
    def length_cells(self) -> int:
        return int(math.ceil(self.L / self.h1 - 1e-9))

    @property
    def L_grid(self) -> float:
        return self.length_cells * self.h1

    @property
    def h2(self) -> float:
        return math.pi / self.transverse_cells


@dataclass(frozen=True)
class FdResult:
    """Gaps ``1 - lambda_0`` per refinement level and their extrapolation."""

    a: float
    parity: Parity
    L: float
    levels: tuple
    gaps: tuple
    gap: float
    ratios: tuple


def assemble_operator(cfg: FdConfig) -> sp.csc_matrix:
    """Symmetric scaled operator ``W**-0.5 A W**-0.5``."""
    h1, h2 = cfg.h1, cfg.h2
    J = cfg.transverse_cells
    na = cfg.cells_in_window
    I = cfg.length_cells
    i0 = 0 if cfg.parity is Parity.EVEN else 1
    Ii, Jj = np.meshgrid(np.arange(i0, I), np.arange(J), indexing="ij")
    # x2 = 0 nodes are unknowns only strictly inside the window
    live = ~((Jj == 0) & (Ii >= na))
    num = -np.ones(Ii.shape, dtype=np.int64)
    num[live] = np.arange(live.sum())
    wx = np.where(Ii == 0, 0.5, 1.0)
    wy = np.where(Jj == 0, 0.5, 1.0)
    size = int(live.sum())
    diag = np.zeros(size)
    rows, cols, vals = [], [], []
    for di, dj, hh, wt in ((1, 0, h1, wy), (0, 1, h2, wx)):
        src = num[: num.shape[0] - di, : num.shape[1] - dj]
        dst = num[di:, dj:]
        w = wt[: num.shape[0] - di, : num.shape[1] - dj] / hh ** 2
        both = (src >= 0) & (dst >= 0)
        rows += [src[both], dst[both]]
        cols += [dst[both], src[both]]
        vals += [-w[both], -w[both]]
        ok = src >= 0
        np.add.at(diag, src[ok], w[ok])
        ok = dst >= 0
        np.add.at(diag, dst[ok], w[ok])
    # Dirichlet neighbours beyond the array: x1 = L and x2 = pi
    last = num[-1, :]
    ok = last >= 0
    np.add.at(diag, last[ok], (wy[-1, :] / h1 ** 2)[ok])
    top = num[:, -1]
    ok = top >= 0
    np.add.at(diag, top[ok], (wx[:, -1] / h2 ** 2)[ok])
    if cfg.parity is Parity.ODD:
        first = num[0, :]
        ok = first >= 0
        np.add.at(diag, first[ok], (wy[0, :] / h1 ** 2)[ok])
    rows.append(np.arange(size))
    cols.append(np.arange(size))
    vals.append(diag)
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(size, size))
    scale = sp.diags(1.0 / np.sqrt((wx * wy)[live]))
    S = scale @ A @ scale
    return ((S + S.T) * 0.5).tocsc()


def fd_eigenvalues(cfg: FdConfig, residual_tol: float = 1e-8) -> list[float]:
    """
    Lowest ``cfg.count`` eigenvalues, ascending, by shift-invert Lanczos.

    Raises
    ------
    FdIterationError
        The iteration did not converge or a returned pair fails the
        residual check.

    Warns
    -----
    TruncationWarning
        When ``sqrt(1 - lambda_0) (L - a) < 5``.
    """
    S = assemble_operator(cfg)
    shift = DEFAULT_SHIFT if cfg.shift is None else cfg.shift
    k = min(cfg.count, S.shape[0] - 1)
    try:
        lam, vec = eigsh(S, k=k, sigma=shift, which="LM")
    except ArpackNoConvergence as err:
        raise FdIterationError(f"eigen-iteration did not converge: {err}") from err
    order = np.argsort(lam)
    lam = lam[order]
    vec = vec[:, order]
    res = np.linalg.norm(S @ vec - vec * lam, axis=0) / np.maximum(np.abs(lam), 1.0)
    if res.max() > residual_tol:
        raise FdIterationError(f"eigenpair residual {res.max():.2e}", float(res.max()))
    if lam[0] < 1.0 and math.sqrt(1.0 - lam[0]) * (cfg.L_grid - cfg.a) < TAIL_DECAYS:
        warnings.warn(
            f"sqrt(1-lambda)(L-a) = {math.sqrt(1 - lam[0]) * (cfg.L_grid - cfg.a):.2f} < {TAIL_DECAYS}",
            TruncationWarning,
            stacklevel=2,
        )
    return [float(x) for x in lam]


def discrete_threshold(cells: int) -> float:
    """Bottom of the continuum of the transverse 3-point operator with ``cells`` cells."""
    h = math.pi / cells
    return (2.0 / h * math.sin(h / 2)) ** 2


def auto_length(a: float, parity: Parity | str, decays: float = 6.0, pilot_cells: int = 16,
                max_extra: float = 200.0) -> float:
    """
    Box length ``a + max(decays/m, 4)`` with ``m`` from a coarse pilot solve.

    The pilot's decay rate is measured from the discrete continuum threshold
    of its own transverse grid, which lies below 1 by ``O(h**2)``; box
    modes of a sector without bound states sit above it.

    Raises
    ------
    ConfigurationError
        If the pilot finds no eigenvalue below the discrete continuum.
    """
    h = math.pi / pilot_cells
    cells = max(1, round(a / h)) if a > 0 else None
    cfg = FdConfig(a=a, parity=parity, L=a + 60.0, h=h, window_cells=cells)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        lam = fd_eigenvalues(cfg)[0]
    top = discrete_threshold(pilot_cells)
    if lam >= top:
        raise ConfigurationError(f"no {Parity.parse(parity).value} eigenvalue below the continuum at a={a}")
    m = math.sqrt(top - lam)
    extra = max(decays / m, 4.0)
    if extra > max_extra:
        warnings.warn(f"decay rate {m:.3g} needs L - a = {extra:.1f}; capped at {max_extra}",
                      TruncationWarning, stacklevel=2)
        extra = max_extra
    return a + extra


def fd_gap_extrapolated(a: float, parity: Parity | str, L: float | None = None, cells: int = 32,
                        levels: int = 3, orders=FD_ORDERS) -> FdResult:
    """
    Gap ``1 - lambda_0`` extrapolated over ``levels`` halvings of the grid.

    The window is resolved by ``round(a / (pi/cells))`` cells at the
    coarsest level and every level doubles both cell counts.  The corner
    limits convergence to first order, so the default elimination orders
    are 1 then 2.

    Returns
    -------
    FdResult
        ``ratios`` are successive difference ratios
        ``(g_k - g_{k+1}) / (g_{k+1} - g_{k+2})``, about 2 for first order.
    """
    parity = Parity.parse(parity)
    if len(orders) != levels - 1:
        raise ConfigurationError(f"{levels} levels need {levels - 1} elimination orders")
    L = auto_length(a, parity) if L is None else L
    h0 = math.pi / cells
    na0 = max(1, round(a / h0))
    gaps = []
    grid = []
    for lev in range(levels):
        scale = 2 ** lev
        cfg = FdConfig(a=a, parity=parity, L=L, h=h0 / scale, window_cells=na0 * scale)
        gaps.append(1.0 - fd_eigenvalues(cfg)[0])
        grid.append(cells * scale)
    d = np.diff(gaps)
    ratios = tuple(float(d[i] / d[i + 1]) for i in range(len(d) - 1))
    return FdResult(a=a, parity=parity, L=L, levels=tuple(grid), gaps=tuple(gaps),
                    gap=extrapolate(gaps, orders), ratios=ratios)
