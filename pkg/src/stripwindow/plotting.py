"""
Optional figures written next to the delimited output.

Only the CLI's ``--figure`` flag reaches this module; data files never
depend on it.  The Agg backend is selected so no display is needed.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

FIGSIZE = (6.0, 3.8)


def _finish(fig, ax, path):
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.tight_layout()
    # no timestamp in the metadata keeps figures reproducible
    fig.savefig(path, dpi=150, metadata={"Software": None} if str(path).endswith(".png") else None)
    plt.close(fig)


def plot_thresholds(records, path, d=math.pi):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for r in records:
        lo, hi = (x * d / math.pi for x in r["bracket"])
        if hi > lo:
            ax.plot([lo, hi], [r["n"], r["n"]], color="0.7", lw=4, solid_capstyle="butt")
        ax.plot(r["a_n"] * d / math.pi, r["n"], "ko", ms=4)
    ax.set_xlabel("critical half-width $a_n$")
    ax.set_ylabel("$n$")
    _finish(fig, ax, path)


def plot_spectrum(rows, path, d=math.pi):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    top = (math.pi / d) ** 2
    ax.axhline(top, color="0.5", ls="--", lw=0.8, label="continuum threshold")
    for r in rows:
        style = "-" if r["parity"] == "even" else ":"
        ax.plot([0, 1], [r["lambda"], r["lambda"]], "k" + style, lw=1.2)
        ax.text(1.02, r["lambda"], f"{r['index']} ({r['parity']})", va="center", fontsize=8)
    ax.set_xlim(0, 1.3)
    ax.set_xticks([])
    ax.set_ylabel(r"$\lambda$")
    ax.legend(frameon=False, fontsize=8)
    _finish(fig, ax, path)


def plot_field(x1, x2, psi, path, a=None):
    """Filled contours of a field sampled on a rectangular grid."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    cs = ax.contourf(x1, x2, psi.T, levels=24, cmap="RdBu_r")
    fig.colorbar(cs, ax=ax, label=r"$\psi$")
    if a is not None:
        ax.plot([min(x1[0], 0), a], [x2[0], x2[0]], color="k", lw=3, label="Neumann window")
        ax.legend(frameon=False, fontsize=8, loc="upper right")
    ax.set_xlabel("$x_1$")
    ax.set_ylabel("$x_2$")
    _finish(fig, ax, path)


def plot_fit_reports(reports, path):
    """Observed against predicted for every report carrying a sample."""
    usable = {k: r for k, r in reports.items() if r["sample"]}
    fig, axes = plt.subplots(1, max(1, len(usable)), figsize=(FIGSIZE[0] * max(1, len(usable)) / 1.5, FIGSIZE[1]),
                             squeeze=False)
    for ax, (name, rep) in zip(axes[0], usable.items()):
        s = np.asarray(rep["sample"], dtype=float)
        ax.plot(s[:, 0], s[:, 1], "ko", ms=3, label="observed")
        ax.plot(s[:, 0], s[:, 2], "-", color="C3", lw=1, label="model")
        ax.set_title(f"{name}: {'pass' if rep['passed'] else 'FAIL'}", fontsize=9)
        ax.legend(frameon=False, fontsize=7)
        ax.spines["right"].set_visible(False)
        ax.spines["top"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
