"""Divergence measures between word distributions.

Three measures: asymmetric Kullback-Leibler (seed as the true distribution,
document as noise), its symmetrized sum, and Jensen-Shannon. Values are in
nats. Smoothing is applied to a side only when it lacks mass on the other
side's support; identical inputs therefore score exactly 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Corpus, Document
from .distributions import SmoothingConfig, WordDistribution, build_distribution, dominates, smooth

LN2 = math.log(2.0)


class Metric(str, enum.Enum):
    KLD = "kld"
    SYMMETRIC_KLD = "symmetric-kld"
    JSD = "jsd"

    @classmethod
    def from_string(cls, s: str) -> "Metric":
        key = s.strip().lower().replace("_", "-")
        for m in cls:
            if m.value == key:
                return m
        raise ValueError(f"unknown metric {s!r}; expected one of {[m.value for m in cls]}")


@dataclass(frozen=True)
class DivergenceScore:
    doc_id: str
    metric: Metric
    seed_ref: str  # "pooled" or "seed:<id>"
    value: float


class UnsmoothedInputError(ValueError):
    """q lacks mass on a p-supported word; the caller must smooth first."""


def kld(p: WordDistribution, q: WordDistribution) -> float:
    """D(p ‖ q) = Σ p(w)·ln(p(w)/q(w)); terms with p(w)=0 contribute 0."""
    total = 0.0
    q_entries = q.entries
    for wid, pw in p.entries.items():
        qw = q_entries.get(wid, 0.0)
        if qw <= 0.0:
            raise UnsmoothedInputError(
                f"unsmoothed input: q has zero mass on word id {wid} in p's support"
            )
        total += pw * math.log(pw / qw)
    return total


def symmetric_kld(p: WordDistribution, q: WordDistribution, cfg: SmoothingConfig) -> float:
    """kld(p, q) + kld(q, p), each side smoothed only if its support falls short."""
    q_eff = q if dominates(q, p.entries) else smooth(q, p.support, cfg)
    p_eff = p if dominates(p, q.entries) else smooth(p, q.support, cfg)
    return kld(p, q_eff) + kld(q, p_eff)


def jsd(p: WordDistribution, q: WordDistribution) -> float:
    """½·D(p ‖ m) + ½·D(q ‖ m) with m = ½(p+q); bounded by ln 2, no smoothing."""
    p_entries = p.entries
    q_entries = q.entries
    total = 0.0
    for wid in p_entries.keys() | q_entries.keys():
        pw = p_entries.get(wid, 0.0)
        qw = q_entries.get(wid, 0.0)
        m = 0.5 * (pw + qw)
        if pw > 0.0:
            total += 0.5 * pw * math.log(pw / m)
        if qw > 0.0:
            total += 0.5 * qw * math.log(qw / m)
    return total


def _score_one(
    seed: WordDistribution,
    doc_dist: WordDistribution,
    metric: Metric,
    cfg: SmoothingConfig,
    corpus_support: set[int] | None,
) -> float:
    if metric is Metric.KLD:
        if dominates(doc_dist, seed.entries):
            return kld(seed, doc_dist)
        reference = seed.support if cfg.vocabulary_mode == "union_of_pair" else corpus_support
        return kld(seed, smooth(doc_dist, reference, cfg))
    if metric is Metric.SYMMETRIC_KLD:
        return symmetric_kld(seed, doc_dist, cfg)
    if metric is Metric.JSD:
        return jsd(seed, doc_dist)
    raise ValueError(f"unknown metric: {metric}")


def score_corpus(
    seed: WordDistribution | Sequence[WordDistribution],
    corpus: Corpus | Iterable[Document],
    metric: Metric,
    cfg: SmoothingConfig | None = None,
) -> tuple[list[DivergenceScore], list[tuple[str, str]]]:
    """Score every document against the seed(s).

    ``seed`` may be one distribution (seed_ref taken from its source tag) or a
    list of per-seed distributions. Returns scores sorted by
    (seed_ref, doc_id) plus a list of (doc_id, message) for documents that
    could not be scored; one bad document never aborts the batch.
    """
    cfg = cfg or SmoothingConfig()
    seeds = [seed] if isinstance(seed, WordDistribution) else list(seed)
    if not seeds:
        raise ValueError("at least one seed distribution required")
    docs = corpus.documents if isinstance(corpus, Corpus) else list(corpus)
    if not docs:
        raise ValueError("no documents to score")

    corpus_support: set[int] | None = None
    if cfg.vocabulary_mode == "corpus_wide":
        corpus_support = set()
        for d in docs:
            corpus_support.update(d.tokens)
        for s in seeds:
            corpus_support.update(s.entries)

    scores: list[DivergenceScore] = []
    errors: list[tuple[str, str]] = []
    for doc in sorted(docs, key=lambda d: d.doc_id):
        try:
            doc_dist = build_distribution(doc.counts(), source=f"doc:{doc.doc_id}")
        except ValueError as exc:
            errors.append((doc.doc_id, str(exc)))
            continue
        for s in seeds:
            seed_ref = s.source if s.source.startswith("seed:") else "pooled"
            try:
                value = _score_one(s, doc_dist, metric, cfg, corpus_support)
            except ValueError as exc:
                errors.append((doc.doc_id, f"{seed_ref}: {exc}"))
                continue
            scores.append(DivergenceScore(doc_id=doc.doc_id, metric=metric, seed_ref=seed_ref, value=value))
    scores.sort(key=lambda s: (s.seed_ref, s.doc_id))
    return scores, errors


def render_score_table(scores: Iterable[DivergenceScore]) -> str:
    """`doc_id<TAB>metric<TAB>seed_ref<TAB>value` lines."""
    return "".join(
        f"{s.doc_id}\t{s.metric.value}\t{s.seed_ref}\t{s.value!r}\n" for s in scores
    )


def parse_score_table(text: str) -> list[DivergenceScore]:
    scores = []
    for line in text.splitlines():
        if not line.strip():
            continue
        doc_id, metric, seed_ref, value = line.split("\t")
        scores.append(
            DivergenceScore(doc_id=doc_id, metric=Metric.from_string(metric), seed_ref=seed_ref, value=float(value))
        )
    return scores
