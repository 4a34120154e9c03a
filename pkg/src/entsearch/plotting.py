"""Recall-curve figures rendered to files (no interactive backend)."""

from __future__ import annotations

from itertools import cycle
from pathlib import Path
from typing import Sequence

_MARKERS = "os^Dv<>P*"


def plot_recall_curves(
    series: Sequence[tuple[str, Sequence[int], Sequence[float]]],
    out_path: str | Path,
    title: str | None = None,
) -> None:
    """Render one recall curve per (label, cutoffs, means) series.

    The output format follows the file extension (svg, png, pdf).
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not series:
        raise ValueError("nothing to plot")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for (label, cutoffs, means), marker in zip(series, cycle(_MARKERS)):
        ax.plot(cutoffs, means, marker=marker, markersize=4, label=label)
    ax.set_xlabel("cutoff")
    ax.set_ylabel("recall")
    ax.set_ylim(0.0, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right", fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
