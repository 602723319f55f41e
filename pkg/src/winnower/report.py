"""Report emitters: divergence histograms, survivors-over-time series, and
ranked unigram tables, all as tab-separated text.

Emitters are pure functions of persisted round data, so re-running a report
never changes round state.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import Document
from .divergence import DivergenceScore
from .winnow import cut

DEFAULT_BINS = 50
DEFAULT_NGRAMS = 20


@dataclass
class Histogram:
    metric: str
    seed_ref: str
    bin_edges: list[float]  # length B+1, strictly increasing
    counts: list[int]  # length B


@dataclass
class YearSeries:
    metric: str
    percentile: str
    per_year: dict[int, int]  # years with zero survivors omitted


def histogram(scores: Sequence[DivergenceScore], bins: int = DEFAULT_BINS) -> Histogram:
    """Equal-width bins spanning [min, max]; the max value lands in the last
    bin; counts conserve N. A degenerate span is widened by machine epsilon."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if not scores:
        raise ValueError("no scores to bin")
    values = [s.value for s in scores]
    lo = min(values)
    hi = max(values)
    if hi == lo:
        # widen a degenerate span by one machine epsilon per bin so the edges
        # stay strictly increasing
        hi = lo + max(abs(lo), 1.0) * sys.float_info.epsilon * bins
    width = (hi - lo) / bins
    edges = [lo + i * width for i in range(bins)] + [hi]
    counts = [0] * bins
    for v in values:
        idx = int((v - lo) / width)
        if idx >= bins:
            idx = bins - 1
        counts[idx] += 1
    return Histogram(
        metric=scores[0].metric.value,
        seed_ref=scores[0].seed_ref,
        bin_edges=edges,
        counts=counts,
    )


def per_seed_histograms(scores: Sequence[DivergenceScore], bins: int = DEFAULT_BINS) -> list[Histogram]:
    """One histogram per seed_ref present in the score table."""
    by_ref: dict[str, list[DivergenceScore]] = {}
    for s in scores:
        by_ref.setdefault(s.seed_ref, []).append(s)
    return [histogram(group, bins) for _, group in sorted(by_ref.items())]


def year_series(
    scores: Sequence[DivergenceScore],
    docs_by_id: Mapping[str, Document],
    percentile: float | str,
) -> YearSeries:
    """Counts per year of the cut(percentile) survivors."""
    missing = sorted(doc_id for doc_id in {s.doc_id for s in scores} if doc_id not in docs_by_id)
    if missing:
        raise ValueError(f"scored documents without year metadata: {', '.join(missing)}")
    survivors = cut(scores, percentile)
    per_year: dict[int, int] = {}
    for doc_id in survivors:
        year = docs_by_id[doc_id].year
        per_year[year] = per_year.get(year, 0) + 1
    return YearSeries(metric=scores[0].metric.value, percentile=str(percentile), per_year=per_year)


def top_ngrams(docs: Iterable[Document], surfaces: Sequence[str], n: int = DEFAULT_NGRAMS) -> list[tuple[str, int]]:
    """Unigram counts over the token streams: descending count, ties by
    ascending surface, capped at min(n, vocabulary size)."""
    counts: dict[int, int] = {}
    for doc in docs:
        for w in doc.tokens:
            counts[w] = counts.get(w, 0) + 1
    ranked = sorted(
        ((surfaces[w], c) for w, c in counts.items()),
        key=lambda sc: (-sc[1], sc[0]),
    )
    return ranked[: min(n, len(ranked))]


# ---------------------------------------------------------------------------
# Tab-separated renderings (the canonical report bytes the CLI writes and the
# review API serves).
# ---------------------------------------------------------------------------


def render_histogram(h: Histogram) -> str:
    lines = [f"# {h.metric} {h.seed_ref}\n"]
    for i, count in enumerate(h.counts):
        lines.append(f"{h.bin_edges[i]!r}\t{h.bin_edges[i + 1]!r}\t{count}\n")
    return "".join(lines)


def render_year_series(ys: YearSeries) -> str:
    lines = [f"# {ys.metric} percentile={ys.percentile}\n"]
    for year in sorted(ys.per_year):
        lines.append(f"{year}\t{ys.per_year[year]}\n")
    return "".join(lines)


def render_ngrams(ranked: Sequence[tuple[str, int]]) -> str:
    return "".join(f"{i + 1}\t{surface}\t{count}\n" for i, (surface, count) in enumerate(ranked))
