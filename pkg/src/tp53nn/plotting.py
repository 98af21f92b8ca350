"""Training and evaluation figures, written straight to image files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# keeps PNG output byte-stable between runs
_METADATA = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_METADATA)
    plt.close(fig)


def plot_performance(history, path, goal=None, title="Training performance"):
    """Per-epoch MSE on a log scale, with the goal as a dashed line."""
    fig, ax = plt.subplots(figsize=(6, 4))
    epochs = np.arange(1, len(history) + 1)
    ax.semilogy(epochs, np.maximum(history, np.finfo(float).tiny), lw=1.2, label="train")
    if goal:
        ax.axhline(goal, color="k", ls="--", lw=0.8, label="goal")
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean squared error")
    ax.set_title(title)
    ax.legend(frameon=False)
    _save(fig, path)


def plot_regression(targets, outputs, path, title="Network output vs target"):
    targets = np.asarray(targets, dtype=float)
    outputs = np.asarray(outputs, dtype=float)
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.plot([0, 1], [0, 1], color="0.6", lw=0.8)
    ax.scatter(targets, outputs, s=18)
    if len(targets) > 1 and np.ptp(targets) > 0 and np.ptp(outputs) > 0:
        r = np.corrcoef(targets, outputs)[0, 1]
        ax.set_title(f"{title}\nR = {r:.5f}")
    else:
        ax.set_title(title)
    ax.set_xlim(-0.05, 1.05)
    ax.set_ylim(-0.05, 1.05)
    ax.set_xlabel("target")
    ax.set_ylabel("output")
    _save(fig, path)
