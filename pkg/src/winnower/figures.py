"""Matplotlib renderings of the report families, written next to the
tab-separated files. The TSV output stays canonical; these are for eyeballing."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .report import Histogram, YearSeries
from .topics import TopicSummary


def save_histogram_figure(hists: Sequence[Histogram], path: str | Path) -> Path:
    """Overlayed histograms, one per seed_ref."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for h in hists:
        centers = [(h.bin_edges[i] + h.bin_edges[i + 1]) / 2 for i in range(len(h.counts))]
        width = h.bin_edges[1] - h.bin_edges[0] if len(h.bin_edges) > 1 else 1.0
        ax.bar(centers, h.counts, width=width, alpha=0.55, label=h.seed_ref)
    ax.set_xlabel(f"divergence ({hists[0].metric}, nats)")
    ax.set_ylabel("documents")
    ax.set_title("Divergence from seed")
    if len(hists) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_year_series_figure(ys: YearSeries, path: str | Path) -> Path:
    path = Path(path)
    years = sorted(ys.per_year)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.bar(years, [ys.per_year[y] for y in years], width=0.8)
    ax.set_xlabel("year")
    ax.set_ylabel("documents")
    ax.set_title(f"Most similar documents over time ({ys.metric}, top {ys.percentile}%)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_ngrams_figure(ranked: Sequence[tuple[str, int]], path: str | Path) -> Path:
    path = Path(path)
    surfaces = [s for s, _ in ranked][::-1]
    counts = [c for _, c in ranked][::-1]
    fig, ax = plt.subplots(figsize=(7, max(3.0, 0.3 * len(ranked))))
    ax.barh(range(len(surfaces)), counts)
    ax.set_yticks(range(len(surfaces)), surfaces)
    ax.set_xlabel("occurrences")
    ax.set_title("Top words")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_topics_figure(summaries: Sequence[TopicSummary], path: str | Path) -> Path:
    path = Path(path)
    ordered = sorted(summaries, key=lambda s: -s.prevalence)
    names = [s.name for s in ordered][::-1]
    prevalences = [s.prevalence for s in ordered][::-1]
    fig, ax = plt.subplots(figsize=(7, max(3.0, 0.3 * len(ordered))))
    ax.barh(range(len(names)), prevalences)
    ax.set_yticks(range(len(names)), names)
    ax.set_xlabel("prevalence")
    ax.set_title("Topic prevalence")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
