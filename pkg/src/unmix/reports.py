"""Figure rendering for the CLI report paths.

Figures are written straight to files (Agg backend, no display) next to
the delimited output they illustrate.
"""
from __future__ import annotations

import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .optimize import SweepResult


def _save_atomic(fig, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    fig.savefig(tmp, dpi=150, format=path.suffix.lstrip(".") or "png")
    os.replace(tmp, path)
    plt.close(fig)


def save_sweep_plot(result: SweepResult, path) -> None:
    """Objective (and multi-information, when present) versus rotation angle."""
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    ax.plot(result.angles_deg, result.objective_bits, color="tab:blue",
            label="marginal entropy sum")
    if result.multi_info_bits is not None:
        ax.plot(result.angles_deg, result.multi_info_bits, color="tab:orange",
                label="multi-information")
    ax.axvline(result.argmin_deg, color="grey", linestyle="--", linewidth=1,
               label=f"argmin {result.argmin_deg:.1f}°")
    ax.set_xlabel("rotation angle (degrees)")
    ax.set_ylabel("bits")
    ax.set_xlim(result.angles_deg[0], 180.0)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    _save_atomic(fig, path)


def save_scatter_plot(observed: np.ndarray, path, mixing: np.ndarray | None = None) -> None:
    """Scatter of the first two observed dimensions, with IC directions if known."""
    x = np.asarray(observed, dtype=float)
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    ax.plot(x[:, 0], x[:, 1], ".", markersize=2, alpha=0.35, color="black")
    if mixing is not None and mixing.shape[0] >= 2:
        span = float(np.abs(x[:, :2]).max())
        for j, color in zip(range(mixing.shape[1]), ("tab:red", "tab:blue", "tab:green")):
            col = mixing[:2, j]
            norm = float(np.hypot(col[0], col[1]))
            if norm == 0.0:
                continue
            tip = col / norm * 0.6 * span
            ax.annotate("", xy=tip, xytext=(0, 0),
                        arrowprops=dict(arrowstyle="->", color=color, linewidth=2))
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_aspect("equal")
    fig.tight_layout()
    _save_atomic(fig, path)
