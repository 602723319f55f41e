"""LDA topic modeling by collapsed Gibbs sampling, used to audit what kinds
of documents a winnowing stage produced.

One chain is strictly sequential; determinism comes from a fixed PCG64 stream
per rng_seed, so the same inputs reproduce bit-identical reports anywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Document

DEFAULT_K = 100
DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 1000
TOP_WORDS_PER_TOPIC = 20


@dataclass
class TopicModel:
    K: int
    alpha: float
    beta: float
    doc_ids: list[str]
    surfaces: list[str]
    topic_word_counts: np.ndarray  # (K, V) int64
    doc_topic_counts: np.ndarray  # (N, K) int64
    topic_totals: np.ndarray  # (K,) int64
    doc_lengths: np.ndarray  # (N,) int64
    iterations_run: int
    rng_seed: int

    @property
    def total_tokens(self) -> int:
        return int(self.doc_lengths.sum())


@dataclass
class TopicSummary:
    topic_id: int
    name: str
    prevalence: float
    top_words: list[tuple[str, float]]


def _check_counts(model_state: tuple, doc_lengths: np.ndarray) -> None:
    n_kw, n_dk, n_k = model_state
    if not np.array_equal(n_dk.sum(axis=1), doc_lengths):
        raise AssertionError("doc-topic counts no longer sum to document lengths")
    if not np.array_equal(n_kw.sum(axis=1), n_k):
        raise AssertionError("topic-word counts no longer sum to topic totals")
    if int(n_k.sum()) != int(doc_lengths.sum()):
        raise AssertionError("topic totals no longer sum to the corpus token count")


def train_lda(
    docs: Sequence[Document],
    vocab_surfaces: Sequence[str],
    K: int,
    alpha: float | None = None,
    beta: float = DEFAULT_BETA,
    iterations: int = DEFAULT_ITERATIONS,
    rng_seed: int = 0,
    check_every_sweep: bool = True,
) -> TopicModel:
    """Collapsed Gibbs sampling: each token's topic is resampled per sweep with
    probability proportional to (n_dk + alpha)(n_kw + beta)/(n_k + V*beta),
    counts excluding the token itself. The final sweep's hard assignments
    define the reported counts.
    """
    if not docs:
        raise ValueError("empty corpus")
    if K < 2:
        raise ValueError("K must be >= 2")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if alpha is None:
        alpha = 50.0 / K
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be > 0")

    tokens = [list(d.tokens) for d in docs]
    doc_lengths = np.array([len(t) for t in tokens], dtype=np.int64)
    total_tokens = int(doc_lengths.sum())
    if K > total_tokens:
        raise ValueError(f"K={K} exceeds the {total_tokens} tokens available")
    V = len(vocab_surfaces)

    rng = np.random.Generator(np.random.PCG64(rng_seed))

    # Count bookkeeping in plain Python lists: the per-token inner loop
    # dominates, and small-K list arithmetic beats numpy call overhead here.
    n_dk = [[0] * K for _ in docs]
    n_kw = [[0] * V for _ in range(K)]
    n_k = [0] * K
    z: list[list[int]] = []
    for d, toks in enumerate(tokens):
        zs = []
        row = n_dk[d]
        for w in toks:
            k = int(rng.integers(K))
            zs.append(k)
            row[k] += 1
            n_kw[k][w] += 1
            n_k[k] += 1
        z.append(zs)

    v_beta = V * beta
    for _sweep in range(iterations):
        for d, toks in enumerate(tokens):
            row = n_dk[d]
            zs = z[d]
            for i, w in enumerate(toks):
                k_old = zs[i]
                row[k_old] -= 1
                n_kw[k_old][w] -= 1
                n_k[k_old] -= 1

                total = 0.0
                cum = [0.0] * K
                for k in range(K):
                    total += (row[k] + alpha) * (n_kw[k][w] + beta) / (n_k[k] + v_beta)
                    cum[k] = total
                u = rng.random() * total
                k_new = 0
                while cum[k_new] < u and k_new < K - 1:
                    k_new += 1

                zs[i] = k_new
                row[k_new] += 1
                n_kw[k_new][w] += 1
                n_k[k_new] += 1
        if check_every_sweep:
            _check_counts(
                (np.array(n_kw, dtype=np.int64), np.array(n_dk, dtype=np.int64), np.array(n_k, dtype=np.int64)),
                doc_lengths,
            )

    return TopicModel(
        K=K,
        alpha=alpha,
        beta=beta,
        doc_ids=[d.doc_id for d in docs],
        surfaces=list(vocab_surfaces),
        topic_word_counts=np.array(n_kw, dtype=np.int64),
        doc_topic_counts=np.array(n_dk, dtype=np.int64),
        topic_totals=np.array(n_k, dtype=np.int64),
        doc_lengths=doc_lengths,
        iterations_run=iterations,
        rng_seed=rng_seed,
    )


def topic_prevalence(model: TopicModel) -> list[float]:
    """Fraction of corpus tokens assigned to each topic; sums to 1."""
    total = model.total_tokens
    return [int(c) / total for c in model.topic_totals]


def top_words(model: TopicModel, topic_id: int, n: int = TOP_WORDS_PER_TOPIC) -> list[tuple[str, float]]:
    """Words ranked by (n_kw + beta)/(n_k + V*beta) descending, ties by surface."""
    if not (0 <= topic_id < model.K):
        raise ValueError(f"topic id {topic_id} out of range 0..{model.K - 1}")
    V = len(model.surfaces)
    denom = int(model.topic_totals[topic_id]) + V * model.beta
    counts = model.topic_word_counts[topic_id]
    scored = [
        (model.surfaces[w], (int(counts[w]) + model.beta) / denom) for w in range(V)
    ]
    scored.sort(key=lambda sp: (-sp[1], sp[0]))
    return scored[: min(n, V)]


def assign_names(model: TopicModel, names: dict[int, str] | None = None, n_words: int = TOP_WORDS_PER_TOPIC) -> list[TopicSummary]:
    """Summaries for every topic; unnamed topics render as ``topic-<id>``.

    Names never affect counts or ranking.
    """
    names = names or {}
    unknown = sorted(k for k in names if not (0 <= k < model.K))
    if unknown:
        raise ValueError(f"unknown topic ids in name map: {unknown}")
    prevalence = topic_prevalence(model)
    return [
        TopicSummary(
            topic_id=k,
            name=names.get(k, f"topic-{k}"),
            prevalence=prevalence[k],
            top_words=top_words(model, k, n_words),
        )
        for k in range(model.K)
    ]


def render_topic_report(summaries: Sequence[TopicSummary]) -> str:
    """One block per topic: `topic_id<TAB>name<TAB>prevalence`, then one
    `surface<TAB>probability` line per top word."""
    out = []
    for s in summaries:
        out.append(f"{s.topic_id}\t{s.name}\t{s.prevalence!r}\n")
        for surface, prob in s.top_words:
            out.append(f"{surface}\t{prob!r}\n")
    return "".join(out)


def read_name_map(path: str | Path) -> dict[int, str]:
    names: dict[int, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        tid, _, name = line.partition("\t")
        names[int(tid)] = name
    return names


def write_name_map(path: str | Path, names: dict[int, str]) -> None:
    Path(path).write_text(
        "".join(f"{tid}\t{name}\n" for tid, name in sorted(names.items())),
        encoding="utf-8",
    )


def save_model(model: TopicModel, path: str | Path) -> None:
    payload = {
        "K": model.K,
        "alpha": model.alpha,
        "beta": model.beta,
        "doc_ids": model.doc_ids,
        "surfaces": model.surfaces,
        "topic_word_counts": [
            {str(w): int(c) for w, c in enumerate(row) if c} for row in model.topic_word_counts.tolist()
        ],
        "doc_topic_counts": model.doc_topic_counts.tolist(),
        "iterations_run": model.iterations_run,
        "rng_seed": model.rng_seed,
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> TopicModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    K = payload["K"]
    V = len(payload["surfaces"])
    n_kw = np.zeros((K, V), dtype=np.int64)
    for k, row in enumerate(payload["topic_word_counts"]):
        for w, c in row.items():
            n_kw[k, int(w)] = c
    n_dk = np.array(payload["doc_topic_counts"], dtype=np.int64)
    return TopicModel(
        K=K,
        alpha=payload["alpha"],
        beta=payload["beta"],
        doc_ids=payload["doc_ids"],
        surfaces=payload["surfaces"],
        topic_word_counts=n_kw,
        doc_topic_counts=n_dk,
        topic_totals=n_kw.sum(axis=1),
        doc_lengths=n_dk.sum(axis=1),
        iterations_run=payload["iterations_run"],
        rng_seed=payload["rng_seed"],
    )
