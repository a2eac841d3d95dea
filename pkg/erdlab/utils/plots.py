"""SVG views of the CSV reports. Plots read from arrays already written; they never feed back into CSVs."""

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from loguru import logger  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "erdlab"
SVG_METADATA = {"Date": None}


def save_figure(figure, path: str | Path) -> Path:
    path = Path(path)
    figure.tight_layout()
    figure.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(figure)
    logger.debug(f"Saved plot {path}")
    return path


def line_plot(
    path: str | Path,
    series: Mapping[str, tuple[Sequence[float], Sequence[float]]],
    xlabel: str,
    ylabel: str,
    title: str = "",
    logy: bool = False,
) -> Path:
    figure, axes = plt.subplots(figsize=(6, 4))
    for label, (xs, ys) in series.items():
        axes.plot(xs, ys, label=label, linewidth=1.2)
    if logy:
        axes.set_yscale("log")
    axes.set_xlabel(xlabel)
    axes.set_ylabel(ylabel)
    axes.set_title(title)
    if len(series) > 1:
        axes.legend(fontsize="small")
    return save_figure(figure, path)


def scatter_panels(
    path: str | Path,
    panels: Mapping[str, tuple[np.ndarray, np.ndarray, np.ndarray]],
    xlabel: str,
    ylabel: str,
    diagonal: bool = False,
) -> Path:
    """One panel per key, each (xs, ys, colours)."""
    count = len(panels)
    figure, axes = plt.subplots(1, count, figsize=(3.2 * count, 3.2), squeeze=False)
    for ax, (title, (xs, ys, colours)) in zip(axes[0], panels.items()):
        ax.scatter(xs, ys, c=colours, s=4, cmap="tab10", vmin=0, vmax=9)
        if diagonal:
            limit = float(max(np.max(xs, initial=0.0), np.max(ys, initial=0.0), 1e-9))
            ax.plot([0, limit], [0, limit], color="black", linewidth=0.8)
        ax.set_title(title, fontsize="small")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
    return save_figure(figure, path)


def heatmap(path: str | Path, matrix: np.ndarray, title: str = "") -> Path:
    figure, axes = plt.subplots(figsize=(4.5, 4))
    image = axes.imshow(matrix, vmin=-1.0, vmax=1.0, cmap="RdBu_r", interpolation="nearest")
    figure.colorbar(image, ax=axes)
    axes.set_title(title)
    return save_figure(figure, path)
