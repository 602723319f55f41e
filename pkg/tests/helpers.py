"""Shared fixture builders: in-memory corpora, manifests on disk, and the
planted synthetic corpora the process-replication tests run on."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from winnower.corpus import Corpus, Document, Vocabulary
from winnower.distributions import build_distribution

PROPERTY_WORDS = [
    "rent", "land", "tenant", "tenants", "landlord", "lease", "eviction",
    "farm", "estate", "acre", "tithe", "crofter", "holding", "arrears", "valuation",
]
PROCEDURAL_WORDS = [
    "house", "member", "motion", "bill", "committee", "order", "question",
    "report", "speech", "session", "friend", "honourable", "majesty", "clerk", "amendment",
]
NOISE_THEMES = {
    "navy": ["ship", "fleet", "admiral", "harbour", "sailor", "gunboat", "dock",
             "frigate", "mutiny", "flogging", "voyage", "anchor", "crew", "mast", "cannon"],
    "railways": ["railway", "locomotive", "carriage", "station", "track", "signal",
                 "junction", "steam", "freight", "timetable", "porter", "tunnel", "bridge",
                 "gauge", "platform"],
    "schools": ["school", "teacher", "pupil", "grammar", "inspector", "lesson",
                "slate", "master", "scholar", "classroom", "education", "examination",
                "truancy", "curriculum", "headmaster"],
    "church": ["church", "parish", "vicar", "tithes", "chapel", "clergy", "sermon",
               "diocese", "bishop", "congregation", "curate", "pew", "altar", "vestry",
               "benefice"],
}


def corpus_from_token_lists(docs: list[tuple[str, str, int, list[str]]]) -> Corpus:
    """Build an in-memory Corpus from (doc_id, title, year, surface tokens)."""
    vocab = Vocabulary()
    documents = [
        Document(
            doc_id=doc_id,
            title=title,
            year=year,
            text_ref=f"inline:{doc_id}",
            tokens=[vocab.add(t) for t in tokens],
        )
        for doc_id, title, year, tokens in docs
    ]
    return Corpus(documents=documents, vocabulary=vocab)


def distribution_from_surfaces(counts: dict[str, int], vocab: Vocabulary, source: str):
    return build_distribution({vocab.add(s): c for s, c in counts.items()}, source)


def write_manifest(path: Path, records: list[dict]) -> Path:
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return path


def doc_record(doc_id: str, text: str, title: str | None = None, year: int = 1881) -> dict:
    return {"doc_id": doc_id, "title": title or doc_id, "year": year, "text": text}


# ---------------------------------------------------------------------------
# Metric-disagreement fixture: 200 docs where KLD and JSD rank the top
# differently. "Coverer" docs carry the seed's words diluted with chaff (KLD
# likes them); "skewed" docs carry only the seed's words with inverted
# proportions (JSD likes them); the rest is disjoint noise.
# ---------------------------------------------------------------------------


def metric_disagreement_corpus() -> tuple[Corpus, dict[str, int]]:
    """Returns the corpus and the {surface: count} seed the docs are scored
    against. Diluted docs live in the 1850s, skewed docs in the 1900s."""
    rng = np.random.default_rng(20)
    docs = []
    for i in range(5):
        tokens = ["alpha"] * 8 + ["beta"] * 2 + [f"chaff{j}" for j in range(10)]
        docs.append((f"dilute-{i:03d}", f"diluted {i}", 1850 + i, tokens))
    for i in range(5):
        tokens = ["alpha"] * 2 + ["beta"] * 8
        docs.append((f"skewed-{i:03d}", f"skewed {i}", 1900 + i, tokens))
    themes = list(NOISE_THEMES.values())
    for i in range(190):
        theme = themes[i % len(themes)]
        tokens = [theme[int(j)] for j in rng.integers(0, len(theme), size=30)]
        docs.append((f"noise-{i:03d}", f"noise {i}", 1830 + (i % 70), tokens))
    return corpus_from_token_lists(docs), {"alpha": 8, "beta": 2}


# ---------------------------------------------------------------------------
# Full-loop fixture: 500 docs, 100 of them planted "property" documents. The
# initial seed mixes procedural and property language, so the first ranking
# surfaces committee chatter alongside genuine property debates (low hit
# rate); reseeding from expert-confirmed documents concentrates round 2.
# ---------------------------------------------------------------------------

N_LOOP_DOCS = 500
N_LOOP_RELEVANT = 100


def _mix_tokens(rng, length: int, parts: list[tuple[list[str], float]]) -> list[str]:
    vocabs = []
    weights = []
    for words, frac in parts:
        vocabs.append(words)
        weights.append(frac)
    weights = np.array(weights) / sum(weights)
    out = []
    for _ in range(length):
        side = int(rng.choice(len(vocabs), p=weights))
        words = vocabs[side]
        out.append(words[int(rng.integers(0, len(words)))])
    return out


def full_loop_corpus(rng_seed: int = 12345) -> tuple[Corpus, set[str], dict[str, int]]:
    """Returns (corpus, planted-relevant doc_ids, seed surface counts)."""
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    themes = list(NOISE_THEMES.values())
    docs = []
    relevant: set[str] = set()
    for i in range(N_LOOP_DOCS):
        doc_id = f"doc-{i:04d}"
        year = 1830 + int(rng.integers(0, 80))
        length = 120 + int(rng.integers(0, 80))
        if i < N_LOOP_RELEVANT:
            relevant.add(doc_id)
            prop = 0.45 + 0.25 * float(rng.random())  # property-dominant
            tokens = _mix_tokens(
                rng, length,
                [(PROPERTY_WORDS, prop), (PROCEDURAL_WORDS, 1.0 - prop)],
            )
            title = f"Land and tenancy debate {i}"
        else:
            # committee chatter with property mentioned in passing; the light-
            # noise end of this family mimics the seed's profile closely
            prop = 0.15 + 0.30 * float(rng.random())
            noise = 0.25 * float(rng.random())
            theme = themes[i % len(themes)]
            tokens = _mix_tokens(
                rng, length,
                [(PROPERTY_WORDS, prop), (PROCEDURAL_WORDS, 1.0 - prop - noise), (theme, noise)],
            )
            title = f"Committee business {i}"
        docs.append((doc_id, title, year, tokens))
    corpus = corpus_from_token_lists(docs)
    # Seed: committee reports about property -- procedural idiom dominates.
    seed_counts = {w: 9 for w in PROCEDURAL_WORDS}
    seed_counts.update({w: 3 for w in PROPERTY_WORDS})
    return corpus, relevant, seed_counts


def corpus_to_manifest(corpus: Corpus, path: Path) -> Path:
    """Materialize an in-memory corpus as an inline-text manifest file."""
    records = []
    for doc in corpus.documents:
        text = " ".join(corpus.vocabulary.surface(w) for w in doc.tokens)
        records.append({"doc_id": doc.doc_id, "title": doc.title, "year": doc.year, "text": text})
    return write_manifest(path, records)


def counts_to_seed_manifest(counts: dict[str, int], path: Path, doc_id: str = "seed-report") -> Path:
    text = " ".join(w for w, c in counts.items() for _ in range(c))
    return write_manifest(
        path, [{"doc_id": doc_id, "title": f"{doc_id} title", "year": 1881, "text": text}]
    )


def full_loop_manifests(tmp_path: Path, rng_seed: int = 12345) -> tuple[Path, Path, set[str]]:
    """The same planted corpus, materialized as manifest files for CLI runs."""
    corpus, relevant, seed_counts = full_loop_corpus(rng_seed)
    manifest = corpus_to_manifest(corpus, tmp_path / "corpus.jsonl")
    seed_manifest = counts_to_seed_manifest(seed_counts, tmp_path / "seed.jsonl", "seed-report")
    return manifest, seed_manifest, relevant


# ---------------------------------------------------------------------------
# Planted two-topic corpus for LDA recovery.
# ---------------------------------------------------------------------------

PLANTED_A = ["rent", "land", "tenant", "landlord", "lease", "eviction", "farm",
             "estate", "acre", "arrears"]
PLANTED_B = ["ship", "fleet", "admiral", "harbour", "sailor", "gunboat", "dock",
             "frigate", "voyage", "anchor"]


def planted_two_topic_corpus(
    n_docs: int = 200, share_a: float = 0.5, rng_seed: int = 7
) -> tuple[Corpus, dict[str, int]]:
    """Docs drawn purely from one of two disjoint 10-word vocabularies.
    Returns (corpus, {doc_id: planted side 0 or 1})."""
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    n_a = round(n_docs * share_a)
    docs = []
    sides: dict[str, int] = {}
    for i in range(n_docs):
        side = 0 if i < n_a else 1
        words = PLANTED_A if side == 0 else PLANTED_B
        length = 30 + int(rng.integers(0, 20))
        tokens = [words[int(j)] for j in rng.integers(0, len(words), size=length)]
        doc_id = f"pd-{i:04d}"
        sides[doc_id] = side
        docs.append((doc_id, f"planted {i}", 1860, tokens))
    return corpus_from_token_lists(docs), sides
