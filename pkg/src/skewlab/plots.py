"""Figure rendering for report grids: heatmaps saved next to the CSV data."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def read_grid_csv(path):
    path = Path(path)
    with path.open() as fh:
        columns = fh.readline().strip().split(",")
    if "classification" in columns:
        raise ValueError(f"{path.name} is a point table, not a plottable grid")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.size == 0:
        data = data.reshape(0, len(columns))
    return columns, data


def render_grid(csv_path, out_path, title=None):
    """Render a grid CSV as an (x, y) heatmap; 3D grids use the first t-slice."""
    columns, data = read_grid_csv(csv_path)
    fig, ax = plt.subplots(figsize=(6, 5))
    if data.shape[0] == 0:
        ax.set_title(title or Path(csv_path).stem)
        ax.text(0.5, 0.5, "empty grid", ha="center", va="center", transform=ax.transAxes)
        fig.savefig(out_path, dpi=150)
        plt.close(fig)
        return Path(out_path)

    if "t" in columns:
        t = data[:, columns.index("t")]
        data = data[t == t.min()]
    x = data[:, columns.index("x")]
    y = data[:, columns.index("y")]
    v = data[:, -1]
    nx, ny = np.unique(x).size, np.unique(y).size
    img = v.reshape(nx, ny)
    mesh = ax.pcolormesh(
        np.unique(x), np.unique(y), img.T, shading="nearest", cmap="RdBu_r"
    )
    fig.colorbar(mesh, ax=ax, label="value")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title or Path(csv_path).stem)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)
