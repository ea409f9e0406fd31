"""Matplotlib renderings of the standard reports, written next to the CSVs."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402


def render_importance(entries: list, path) -> Path:
    """Horizontal bar chart of gain shares, most important on top."""
    path = Path(path)
    names = [e[0] for e in entries][::-1]
    shares = [e[1] for e in entries][::-1]
    fig, ax = plt.subplots(figsize=(8, 0.5 * max(len(names), 4) + 1))
    ax.barh(names, shares, color="#2b6cb0")
    ax.set_xlabel("gain share")
    ax.set_title(f"Feature importance (top {len(names)})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_monthly(frame: pd.DataFrame, path, band: float = 0.10) -> Path:
    """Monthly actual vs predicted production with a relative-error band."""
    path = Path(path)
    months = frame["month"].astype(str)
    actual = frame["actual"].to_numpy(dtype=float)
    predicted = frame["predicted"].to_numpy(dtype=float)
    x = np.arange(len(months))
    fig, ax = plt.subplots(figsize=(max(8, 0.4 * len(months)), 4.5))
    ax.fill_between(
        x, actual * (1 - band), actual * (1 + band),
        color="#cbd5e0", alpha=0.6, label=f"±{int(band * 100)}% band",
    )
    ax.plot(x, actual, "o-", color="#2d3748", label="actual")
    ax.plot(x, predicted, "s--", color="#c05621", label="predicted")
    out_of_band = ~frame["within_band"].to_numpy(dtype=bool)
    if out_of_band.any():
        ax.plot(x[out_of_band], predicted[out_of_band], "x", color="red", markersize=10)
    ax.set_xticks(x)
    ax.set_xticklabels(months, rotation=45, ha="right")
    ax.set_ylabel("oil production (m³)")
    ax.set_title("Monthly production: actual vs predicted")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_heatmap(grid, path) -> Path:
    """Allocation heatmap over two infill wells, markers on the current and
    optimal cells."""
    path = Path(path)
    frame = grid.to_frame()
    n = round(1.0 / grid.step)
    img = np.full((n + 1, n + 1), np.nan)
    for fi, fj, v in grid.cells:
        img[round(fj * n), round(fi * n)] = v
    fig, ax = plt.subplots(figsize=(7, 6))
    mesh = ax.imshow(
        img, origin="lower", extent=(0, 100, 0, 100), aspect="auto", cmap="viridis"
    )
    fig.colorbar(mesh, ax=ax, label="predicted production (m³)")
    ci, cj = grid.current_cell
    oi, oj = grid.optimal_cell
    ax.plot(ci * 100, cj * 100, "o", mfc="none", mec="white", mew=2, ms=16, label="current")
    ax.plot(oi * 100, oj * 100, "o", mfc="none", mec="red", mew=2, ms=16, label="optimal")
    ax.set_xlabel(f"steam share of {grid.well_i} (%)")
    ax.set_ylabel(f"steam share of {grid.well_j} (%)")
    ax.set_title("Predicted production over the allocation grid")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
