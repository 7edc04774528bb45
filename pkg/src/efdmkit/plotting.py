"""Figures written next to the CLI reports.

Figures are built on :class:`matplotlib.figure.Figure` directly, so nothing
touches pyplot's global state and no display is needed.
"""
from __future__ import annotations

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

_METADATA = {"Software": None}


def _save(fig: Figure, path) -> None:
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=100, metadata=_METADATA)


def plot_histograms(channels, path, bins: int = 64) -> None:
    """One histogram panel per ``(label, values)`` pair."""
    channels = list(channels)
    cols = min(3, len(channels))
    rows = -(-len(channels) // cols)
    fig = Figure(figsize=(4 * cols, 3 * rows), tight_layout=True)
    for i, (label, values) in enumerate(channels):
        ax = fig.add_subplot(rows, cols, i + 1)
        ax.hist(np.asarray(values, dtype=np.float64).ravel(), bins=bins, color="0.3")
        ax.set_title(label)
        ax.set_xlabel("value")
        ax.set_ylabel("count")
    _save(fig, path)


def plot_ecdfs(samples, path, title: str = "") -> None:
    """Overlay the eCDF step curves of several named samples."""
    fig = Figure(figsize=(6, 4), tight_layout=True)
    ax = fig.add_subplot(1, 1, 1)
    for label, values in samples:
        s = np.sort(np.asarray(values, dtype=np.float64).ravel())
        ax.step(s, np.arange(1, s.size + 1) / s.size, where="post", label=label)
    ax.set_xlabel("value")
    ax.set_ylabel("eCDF")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    _save(fig, path)


def plot_bench(reports, path) -> None:
    fig = Figure(figsize=(6, 4), tight_layout=True)
    ax = fig.add_subplot(1, 1, 1)
    names = [r.method for r in reports]
    ax.bar(names, [r.seconds * 1e3 for r in reports], color="0.4")
    ax.set_ylabel("median time (ms)")
    if reports:
        ax.set_title(f"n = {reports[0].n}")
    _save(fig, path)
