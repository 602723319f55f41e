"""Word probability distributions and the additive smoothing that keeps
asymmetric divergence finite.

The seed side stays un-smoothed (its zeros contribute nothing to KLD); only a
document that lacks mass on seed-supported words needs smoothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

SUM_TOLERANCE = 1e-9

VOCABULARY_MODES = ("union_of_pair", "corpus_wide")


@dataclass(frozen=True)
class SmoothingConfig:
    epsilon: float = 0.5
    vocabulary_mode: str = "union_of_pair"

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.vocabulary_mode not in VOCABULARY_MODES:
            raise ValueError(
                f"unknown vocabulary_mode {self.vocabulary_mode!r}; expected one of {VOCABULARY_MODES}"
            )


@dataclass(frozen=True)
class WordDistribution:
    """Sparse word-id -> probability map; strictly positive entries only."""

    entries: dict[int, float]
    source: str  # "pooled" | "seed:<id>" | "doc:<id>"

    @property
    def support_size(self) -> int:
        return len(self.entries)

    @property
    def support(self) -> set[int]:
        return set(self.entries)

    def prob(self, word_id: int) -> float:
        return self.entries.get(word_id, 0.0)


def _checked(entries: dict[int, float], source: str) -> WordDistribution:
    total = 0.0
    for wid, p in entries.items():
        if p <= 0.0:
            raise ValueError(f"non-positive probability {p} for word id {wid}")
        total += p
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise ValueError(f"probabilities sum to {total!r}, not 1")
    return WordDistribution(entries=entries, source=source)


def build_distribution(counts: Mapping[int, int | float], source: str = "doc:?") -> WordDistribution:
    """Normalize a sparse count map into a probability distribution."""
    total = float(sum(counts.values()))
    if total <= 0:
        raise ValueError("empty document: no counts to normalize")
    entries = {wid: c / total for wid, c in counts.items() if c > 0}
    return _checked(entries, source)


def pool_seeds(seed_counts: Iterable[Mapping[int, int | float]]) -> WordDistribution:
    """Sum count maps across seeds and normalize; longer seeds weigh more."""
    pooled: dict[int, float] = {}
    n = 0
    for counts in seed_counts:
        n += 1
        if not counts or sum(counts.values()) <= 0:
            raise ValueError("empty seed in pool")
        for wid, c in counts.items():
            pooled[wid] = pooled.get(wid, 0.0) + c
    if n == 0:
        raise ValueError("no seeds to pool")
    return build_distribution(pooled, source="pooled")


def smooth(
    q: WordDistribution,
    reference_support: Iterable[int],
    cfg: SmoothingConfig,
) -> WordDistribution:
    """Additive smoothing of ``q`` over V = q.support ∪ reference_support:

        q'(w) = (q(w) + eps) / (1 + eps * |V|)

    Every word in V ends up with strictly positive mass. For corpus-wide
    smoothing, pass the full vocabulary as ``reference_support``.
    """
    ref = set(reference_support)
    if not ref:
        raise ValueError("reference_support must be non-empty")
    vocab = ref | q.support
    eps = cfg.epsilon
    denom = 1.0 + eps * len(vocab)
    entries = {wid: (q.entries.get(wid, 0.0) + eps) / denom for wid in vocab}
    return _checked(entries, q.source)


def dominates(q: WordDistribution, support: Iterable[int]) -> bool:
    """True when q carries positive mass on every word in ``support``."""
    return all(w in q.entries for w in support)


def export_tsv(dist: WordDistribution, surfaces: list[str]) -> str:
    """`surface<TAB>probability` lines, descending probability, ties by surface."""
    rows = sorted(dist.entries.items(), key=lambda kv: (-kv[1], surfaces[kv[0]]))
    return "".join(f"{surfaces[wid]}\t{p!r}\n" for wid, p in rows)
