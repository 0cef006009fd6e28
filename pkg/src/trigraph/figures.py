"""Matplotlib renderings written next to the delimited report files."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .embed import EpochStats

_FIG_SIZE = (6.0, 3.7)
_DPI = 150


def _finish(fig, path: Path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_trace(trace: Sequence[EpochStats], path: Path) -> None:
    """Loss and AUC against epoch, side by side."""
    epochs = [row.epoch for row in trace]
    fig, (ax_loss, ax_auc) = plt.subplots(1, 2, figsize=_FIG_SIZE)
    ax_loss.plot(epochs, [row.loss for row in trace], color="tab:blue")
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("loss")
    ax_loss.grid(alpha=0.3)
    ax_auc.plot(epochs, [row.auc for row in trace], color="tab:orange")
    ax_auc.set_xlabel("epoch")
    ax_auc.set_ylabel("AUC")
    ax_auc.set_ylim(0.0, 1.05)
    ax_auc.grid(alpha=0.3)
    _finish(fig, path)


def plot_sweep(
    xs: Sequence[float], means: Sequence[float], stds: Sequence[float], xlabel: str, path: Path
) -> None:
    """Mean Macro-F1 with error bars over a swept parameter."""
    fig, ax = plt.subplots(figsize=_FIG_SIZE)
    ax.errorbar(xs, means, yerr=stds, marker="o", capsize=3, color="tab:blue")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("macro F1")
    ax.grid(alpha=0.3)
    _finish(fig, path)


def plot_ablation(labels: Sequence[str], means: Sequence[float], stds: Sequence[float], path: Path) -> None:
    """Macro-F1 as network components are added cumulatively."""
    fig, ax = plt.subplots(figsize=_FIG_SIZE)
    positions = range(len(labels))
    ax.bar(positions, means, yerr=stds, capsize=3, color="tab:blue", alpha=0.85)
    ax.set_xticks(list(positions))
    ax.set_xticklabels(labels)
    ax.set_xlabel("active networks")
    ax.set_ylabel("macro F1")
    ax.grid(axis="y", alpha=0.3)
    _finish(fig, path)


def plot_class_sizes(sizes: Sequence[int], path: Path) -> None:
    """Documents per entity, largest first; log scale shows the heavy tail."""
    fig, ax = plt.subplots(figsize=_FIG_SIZE)
    ax.bar(range(len(sizes)), sizes, color="tab:blue", width=0.9)
    ax.set_xlabel("entity rank")
    ax.set_ylabel("documents")
    if max(sizes) >= 10 * min(sizes):
        ax.set_yscale("log")
    ax.grid(axis="y", alpha=0.3)
    _finish(fig, path)
