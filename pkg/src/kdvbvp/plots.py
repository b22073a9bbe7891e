"""Figure rendering for the solve/report path.

All figures are written as PNG files next to the delimited output; rendering
is deterministic for a fixed solution (no timestamps, fixed layout).
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .pipeline import SolutionField

_SAVE_OPTS = {"dpi": 110, "metadata": {"Software": "kdvbvp"}}


def render_figures(field: SolutionField, out_dir: str, brackets=None) -> list[str]:
    """Write the standard figure set; returns the created file paths."""
    paths = [
        _plot_potential(field, os.path.join(out_dir, "potential.png")),
        _plot_w(field, os.path.join(out_dir, "w.png"), brackets),
    ]
    if field.measures:
        paths.append(_plot_measure(field, os.path.join(out_dir, "measure.png")))
    return paths


def _plot_potential(field: SolutionField, path: str) -> str:
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    nt = len(field.t_grid)
    shown = sorted({0, nt // 2, nt - 1})
    for it in shown:
        ax.plot(field.x_grid, field.q[it, :, 0], label=f"t = {field.t_grid[it]:.6g}")
    ax.set_xlabel("x")
    ax.set_ylabel("q(x, t)")
    ax.set_title("Reconstructed potential snapshots")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path


def _plot_w(field: SolutionField, path: str, brackets=None) -> str:
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    order = np.argsort(field.t_grid)
    ax.plot(field.t_grid[order], field.w[order], "o-", label="w(t)")
    if brackets is not None:
        brackets = np.asarray(brackets, dtype=float)
        ax.plot(field.t_grid[order], brackets[order, 0], "--", color="gray",
                label="bracket")
        ax.plot(field.t_grid[order], brackets[order, 1], "--", color="gray")
    ax.set_xlabel("t")
    ax.set_ylabel("w")
    ax.set_title("Boundary trace w(t)")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path


def _plot_measure(field: SolutionField, path: str) -> str:
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    order = np.argsort(field.t_grid)
    for it in order:
        mw = field.measures[it]
        t = field.t_grid[it]
        ax.scatter(
            np.full(mw.n, t),
            mw.xi,
            s=8.0 + 60.0 * mw.w / max(float(np.max(mw.w)), 1e-300),
            c="tab:blue",
            alpha=0.7,
        )
    ax.set_xlabel("t")
    ax.set_ylabel("pole location xi")
    ax.set_title("Spectral measure poles (marker size ~ weight)")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path
