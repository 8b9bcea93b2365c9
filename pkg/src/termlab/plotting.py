"""Figures written next to the text output of the command line."""

from __future__ import annotations

import math
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .interp import Trace
from .ramsey import EdgeColoring
from .tropical import INF, TropicalMatrix


def plot_trace(trace: Trace, names: Sequence[str], path: str, title: str = "") -> None:
    """One line per variable against step number."""
    data = np.array(trace.states)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for k, name in enumerate(names):
        ax.plot(range(len(data)), data[:, k], marker="o", ms=3, label=name)
    ax.set_xlabel("step")
    ax.set_ylabel("value")
    if title:
        ax.set_title(title)
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_coloring(col: EdgeColoring, path: str, labels: Sequence[str] | None = None) -> None:
    """Upper-triangular heat map of edge colors; the diagonal and lower half are blank."""
    grid = np.full((col.n, col.n), np.nan)
    for i, j, q in col.edges():
        grid[i - 1, j - 1] = q
    fig, ax = plt.subplots(figsize=(4 + 0.2 * col.n, 4 + 0.2 * col.n))
    cmap = plt.get_cmap("tab10", max(col.c, 1))
    im = ax.imshow(grid, cmap=cmap, vmin=0.5, vmax=col.c + 0.5)
    ticks = range(col.n)
    names = list(labels) if labels is not None else [str(v) for v in range(1, col.n + 1)]
    ax.set_xticks(ticks, names, rotation=90 if col.n > 12 else 0)
    ax.set_yticks(ticks, names)
    fig.colorbar(im, ax=ax, ticks=range(1, col.c + 1), label="color")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_matrices(mats: Sequence[TropicalMatrix], path: str, titles: Sequence[str] | None = None) -> None:
    """Small multiples of min-plus matrices; infinite entries are left blank."""
    n = len(mats)
    if n == 0:
        raise ValueError("nothing to plot")
    cols = min(n, 6)
    rows = math.ceil(n / cols)
    fig, axes = plt.subplots(rows, cols, figsize=(2.2 * cols, 2.2 * rows), squeeze=False)
    finite = [v for m in mats for r in m.rows for v in r if v != INF]
    vmax = max([abs(v) for v in finite] + [1])
    for k, ax in enumerate(axes.flat):
        if k >= n:
            ax.axis("off")
            continue
        m = mats[k]
        arr = np.array([[np.nan if v == INF else v for v in r] for r in m.rows], dtype=float)
        ax.imshow(arr, cmap="coolwarm", vmin=-vmax, vmax=vmax)
        for (i, j), v in np.ndenumerate(arr):
            ax.text(j, i, "inf" if np.isnan(v) else str(int(v)), ha="center", va="center", fontsize=7)
        ax.set_xticks([])
        ax.set_yticks([])
        if titles is not None:
            ax.set_title(titles[k], fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
