"""Render emitted report tables as PNG figures.

Kept separate from the scoring code: everything here consumes the already
serialized report payloads, so any figure can be regenerated from the
files alone.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

BEHAVIOR_COLORS = {"A": "#2a9d8f", "B": "#e76f51", "C": "#e9c46a", "D": "#8d99ae"}


def render_pattern_accuracy(report: Mapping, path: str | Path) -> Path:
    """Grouped bars: semantic accuracy on pattern-containing vs other datapoints."""
    slices = report["pattern_slices"]
    patterns = sorted(slices)
    contains = [slices[p]["contains"]["semantic_acc"] for p in patterns]
    other = [slices[p]["not_contains"]["semantic_acc"] for p in patterns]
    x = np.arange(len(patterns))
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.bar(x - 0.2, contains, width=0.4, label="contains pattern", color="#264653")
    ax.bar(x + 0.2, other, width=0.4, label="without pattern", color="#2a9d8f")
    ax.set_xticks(x, patterns)
    ax.set_ylim(0, 1.0)
    ax.set_ylabel("semantic accuracy")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_behavior(behavior: Mapping, path: str | Path) -> Path:
    """Single stacked bar of the four behavior-class fractions."""
    fractions = behavior["fractions"]
    fig, ax = plt.subplots(figsize=(4, 2.6))
    left = 0.0
    for cls in ("A", "B", "C", "D"):
        frac = fractions.get(cls, 0.0)
        ax.barh([0], [frac], left=left, color=BEHAVIOR_COLORS[cls], label=cls)
        if frac > 0.04:
            ax.text(left + frac / 2, 0, f"{cls} {frac:.0%}", ha="center", va="center", fontsize=8)
        left += frac
    ax.set_xlim(0, 1)
    ax.set_yticks([])
    ax.set_xlabel("fraction of pairs")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_aggregate(rows: Sequence[Mapping], path: str | Path) -> Path:
    """Per-pattern bars, one group per label, with across-seed error bars.

    Expects the rows produced by aggregate_pattern_accuracies, and plots
    the pattern-containing slice.
    """
    rows = [r for r in rows if r["slice"] == "contains"]
    labels = sorted({r["label"] for r in rows})
    patterns = sorted({r["pattern"] for r in rows})
    by_key = {(r["label"], r["pattern"]): r for r in rows}
    x = np.arange(len(patterns))
    width = 0.8 / max(len(labels), 1)
    fig, ax = plt.subplots(figsize=(7, 3.2))
    for i, label in enumerate(labels):
        means = [by_key.get((label, p), {}).get("mean_semantic_acc", 0.0) for p in patterns]
        errs = [by_key.get((label, p), {}).get("stderr", 0.0) for p in patterns]
        ax.bar(x + (i - (len(labels) - 1) / 2) * width, means, width=width, yerr=errs, capsize=2, label=label)
    ax.set_xticks(x, patterns)
    ax.set_ylim(0, 1.0)
    ax.set_ylabel("semantic accuracy (pattern slice)")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_difficulty(stats: Mapping, path: str | Path) -> Path:
    """World-ratio distribution plus its mean conditioned on formula length."""
    difficulty = stats["difficulty"]
    fig, (left, right) = plt.subplots(1, 2, figsize=(8, 2.8))
    bins = np.arange(10) / 10
    left.bar(bins + 0.05, difficulty["world_ratio_histogram"], width=0.1, color="#264653")
    left.set_xlabel("satisfying-world fraction")
    left.set_ylabel("formulas")
    by_length = {int(k): v for k, v in difficulty["world_ratio_by_length"].items()}
    lengths = sorted(by_length)
    right.plot(lengths, [by_length[l] for l in lengths], marker="o", ms=3, color="#2a9d8f")
    right.set_xlabel("formula length (tokens)")
    right.set_ylabel("mean world fraction")
    right.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_length_histogram(stats: Mapping, path: str | Path) -> Path:
    hist = {int(k): v for k, v in stats["length_histogram"].items()}
    lengths = sorted(hist)
    fig, ax = plt.subplots(figsize=(6, 2.8))
    ax.bar(lengths, [hist[l] for l in lengths], color="#264653")
    ax.set_xlabel("formula length (tokens)")
    ax.set_ylabel("count")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
