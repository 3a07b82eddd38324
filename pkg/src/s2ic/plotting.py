"""Figures for models, frames and QE statistics (written to files, never shown)."""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .frames.core import ContactFrame, KripkeModel  # noqa: E402


def _layout(X: ContactFrame) -> dict:
    n = X.size
    if n == 1:
        return {X.points[0]: (0.0, 0.0)}
    return {p: (math.cos(2 * math.pi * i / n), math.sin(2 * math.pi * i / n))
            for i, p in enumerate(X.points)}


def _draw(ax, X: ContactFrame, labels=None, title=None):
    pos = _layout(X)
    for a, b in X.sorted_edges():
        (x1, y1), (x2, y2) = pos[a], pos[b]
        ax.plot([x1, x2], [y1, y2], color="0.5", lw=1.2, zorder=1)
    xs = [pos[p][0] for p in X.points]
    ys = [pos[p][1] for p in X.points]
    ax.scatter(xs, ys, s=260, color="white", edgecolor="black", zorder=2)
    for p in X.points:
        x, y = pos[p]
        ax.annotate(p, (x, y), ha="center", va="center", fontsize=7, zorder=3)
        if labels and labels.get(p):
            ax.annotate(labels[p], (x, y), xytext=(0, -16), textcoords="offset points",
                        ha="center", fontsize=7, color="tab:blue")
    ax.set_aspect("equal")
    ax.margins(0.3)
    ax.axis("off")
    if title:
        ax.set_title(title, fontsize=9)


def model_labels(M: KripkeModel) -> dict:
    return {p: ",".join(v for v in sorted(M.valuation) if p in M.valuation[v])
            for p in M.frame.points}


def plot_model(M: KripkeModel, path, title=None):
    fig, ax = plt.subplots(figsize=(4, 4))
    _draw(ax, M.frame, model_labels(M), title)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def plot_frames(frames, path, titles=None):
    """Draw several frames side by side."""
    frames = list(frames)
    fig, axes = plt.subplots(1, len(frames), figsize=(3.2 * len(frames), 3.4), squeeze=False)
    for i, (ax, X) in enumerate(zip(axes[0], frames)):
        _draw(ax, X, None, (titles or [X.name for X in frames])[i])
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def plot_qe_stats(records, path, title="QE classes"):
    """Bar chart of pair types and choice families per class."""
    records = [r for r in records if "families" in r and "class" in r]
    fig, ax = plt.subplots(figsize=(max(4, 0.4 * len(records) + 2), 3))
    idx = list(range(len(records)))
    ax.bar([i - 0.2 for i in idx], [r["pair_types"] for r in records], width=0.4,
           label="pair types")
    ax.bar([i + 0.2 for i in idx], [r["families"] for r in records], width=0.4,
           label="families")
    ax.set_xlabel("class")
    ax.set_title(title, fontsize=9)
    ax.legend(fontsize=7)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
