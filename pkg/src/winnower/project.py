"""Project state on disk and the operations the CLI and review API share.

Layout under the project root:

    project.json            normalization / smoothing / LDA defaults
    corpus/                 tokenized corpus cache
    seeds/<digest>/         tokenized external seed corpora
    rounds/round_NNNN/      append-only round state (winnow.RoundStore)
    reports/round_NNNN/     derived report artifacts (TSV + figures + topic model)
    .lock                   single-writer guard
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .corpus import (
    Corpus,
    Document,
    NormalizationConfig,
    ingest_corpus,
    load_corpus,
    read_document_text,
    save_corpus,
)
from .distributions import SmoothingConfig, WordDistribution, build_distribution, pool_seeds
from .divergence import Metric, score_corpus
from .report import (
    DEFAULT_BINS,
    DEFAULT_NGRAMS,
    Histogram,
    YearSeries,
    histogram,
    per_seed_histograms,
    render_histogram,
    render_ngrams,
    render_year_series,
    top_ngrams,
    year_series,
)
from .topics import (
    DEFAULT_BETA,
    DEFAULT_ITERATIONS,
    DEFAULT_K,
    TopicModel,
    assign_names,
    load_model,
    read_name_map,
    render_topic_report,
    save_model,
    train_lda,
    write_name_map,
)
from .winnow import RoundStore, cut, sample_tranches

PROJECT_FILE = "project.json"


class ProjectError(RuntimeError):
    pass


class LockHeldError(ProjectError):
    pass


@dataclass
class LdaDefaults:
    k: int = DEFAULT_K
    alpha: float | None = None  # None -> 50/K
    beta: float = DEFAULT_BETA
    iterations: int = DEFAULT_ITERATIONS


@dataclass
class ProjectConfig:
    normalization: NormalizationConfig = field(default_factory=NormalizationConfig)
    smoothing: SmoothingConfig = field(default_factory=SmoothingConfig)
    lda: LdaDefaults = field(default_factory=LdaDefaults)

    def to_json(self) -> dict:
        n = self.normalization
        return {
            "version": __version__,
            "normalization": {
                "lowercase": n.lowercase,
                "strip_punctuation": n.strip_punctuation,
                "stopwords": sorted(n.stopwords),
                "reducer": n.reducer,
                "min_token_length": n.min_token_length,
                "lemma_table": sorted(n.lemma_table.items()),
            },
            "smoothing": {
                "epsilon": self.smoothing.epsilon,
                "vocabulary_mode": self.smoothing.vocabulary_mode,
            },
            "lda": {
                "k": self.lda.k,
                "alpha": self.lda.alpha,
                "beta": self.lda.beta,
                "iterations": self.lda.iterations,
            },
        }

    @classmethod
    def from_json(cls, payload: dict) -> "ProjectConfig":
        n = payload["normalization"]
        return cls(
            normalization=NormalizationConfig(
                lowercase=n["lowercase"],
                strip_punctuation=n["strip_punctuation"],
                stopwords=frozenset(n["stopwords"]),
                reducer=n["reducer"],
                min_token_length=n["min_token_length"],
                lemma_table=dict(tuple(pair) for pair in n["lemma_table"]),
            ),
            smoothing=SmoothingConfig(**payload["smoothing"]),
            lda=LdaDefaults(**payload["lda"]),
        )


class ProjectLock:
    """One mutating process per project, via an exclusive lock file."""

    def __init__(self, root: Path):
        self.path = root / ".lock"
        self._fd: int | None = None

    def __enter__(self) -> "ProjectLock":
        try:
            self._fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise LockHeldError(
                f"project lock {self.path} is held; is another winnower process running?"
            ) from None
        os.write(self._fd, str(os.getpid()).encode("ascii"))
        return self

    def __exit__(self, *exc) -> None:
        if self._fd is not None:
            os.close(self._fd)
            self._fd = None
        try:
            self.path.unlink()
        except FileNotFoundError:
            pass


class Project:
    def __init__(self, root: str | Path, config: ProjectConfig):
        self.root = Path(root)
        self.config = config
        self.rounds = RoundStore(self.root / "rounds")
        self._corpus: Corpus | None = None
        self._seed_corpora: dict[str, Corpus] = {}

    # --- lifecycle ----------------------------------------------------------

    @classmethod
    def init(cls, root: str | Path, config: ProjectConfig | None = None) -> "Project":
        root = Path(root)
        if (root / PROJECT_FILE).exists():
            raise ProjectError(f"project already initialized at {root}")
        root.mkdir(parents=True, exist_ok=True)
        config = config or ProjectConfig()
        (root / PROJECT_FILE).write_text(
            json.dumps(config.to_json(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        for sub in ("corpus", "seeds", "rounds", "reports"):
            (root / sub).mkdir(exist_ok=True)
        return cls(root, config)

    @classmethod
    def load(cls, root: str | Path) -> "Project":
        root = Path(root)
        path = root / PROJECT_FILE
        if not path.exists():
            raise ProjectError(f"no project at {root} (missing {PROJECT_FILE}); run init first")
        payload = json.loads(path.read_text(encoding="utf-8"))
        return cls(root, ProjectConfig.from_json(payload))

    def lock(self) -> ProjectLock:
        return ProjectLock(self.root)

    # --- corpus -------------------------------------------------------------

    @property
    def corpus_dir(self) -> Path:
        return self.root / "corpus"

    def ingest(self, manifest: str | Path) -> Corpus:
        corpus = ingest_corpus(manifest, self.config.normalization)
        save_corpus(corpus, self.corpus_dir)
        self._corpus = load_corpus(self.corpus_dir, self.config.normalization)
        return self._corpus

    def corpus(self) -> Corpus:
        if self._corpus is None:
            self._corpus = load_corpus(self.corpus_dir, self.config.normalization)
        return self._corpus

    def document_text(self, doc_id: str) -> str:
        return read_document_text(self.corpus().document(doc_id))

    # --- seeds ---------------------------------------------------------------

    def ingest_seed(self, manifest: str | Path) -> str:
        """Tokenize a seed manifest under the project config; returns the seed
        cache name (content-addressed so identical manifests share a cache)."""
        manifest = Path(manifest)
        digest = hashlib.sha256(
            manifest.read_bytes() + self.config.normalization.config_hash().encode("ascii")
        ).hexdigest()[:16]
        cache_dir = self.root / "seeds" / digest
        if not (cache_dir / "meta.json").exists():
            seed_corpus = ingest_corpus(manifest, self.config.normalization)
            if not seed_corpus.documents:
                raise ProjectError("seed manifest produced no usable documents")
            save_corpus(seed_corpus, cache_dir)
        return digest

    def seed_corpus(self, cache_name: str) -> Corpus:
        if cache_name not in self._seed_corpora:
            self._seed_corpora[cache_name] = load_corpus(self.root / "seeds" / cache_name)
        return self._seed_corpora[cache_name]

    # --- seed / parent resolution --------------------------------------------

    def resolve_seed(self, seed_spec: dict) -> tuple[WordDistribution, list[WordDistribution]]:
        """Returns (pooled distribution, per-seed distributions) in the corpus
        vocabulary id space (extended with seed-only words for external seeds)."""
        corpus = self.corpus()
        if seed_spec["type"] == "external":
            seed_corpus = self.seed_corpus(seed_spec["cache"])
            extension: dict[str, int] = {}

            def map_id(surface: str) -> int:
                wid = corpus.vocabulary.index.get(surface)
                if wid is not None:
                    return wid
                if surface not in extension:
                    extension[surface] = len(corpus.vocabulary) + len(extension)
                return extension[surface]

            per_seed = []
            pooled_counts: list[dict[int, int]] = []
            for doc in seed_corpus.documents:
                counts: dict[int, int] = {}
                for sid in doc.tokens:
                    wid = map_id(seed_corpus.vocabulary.surface(sid))
                    counts[wid] = counts.get(wid, 0) + 1
                pooled_counts.append(counts)
                per_seed.append(build_distribution(counts, source=f"seed:{doc.doc_id}"))
            return pool_seeds(pooled_counts), per_seed
        if seed_spec["type"] == "labels":
            doc_ids = seed_spec["doc_ids"]
            counts_list = [corpus.document(d).counts() for d in doc_ids]
            return pool_seeds(counts_list), []
        raise ProjectError(f"unknown seed_spec type: {seed_spec.get('type')!r}")

    def parent_documents(self, parent: dict) -> list[Document]:
        corpus = self.corpus()
        if parent["type"] == "corpus":
            return corpus.documents
        if parent["type"] == "round":
            survivors = self.rounds.read_survivors(parent["round_id"])
            return [corpus.document(d) for d in survivors]
        raise ProjectError(f"unknown parent type: {parent.get('type')!r}")

    # --- round operations -----------------------------------------------------

    def create_ranked_round(
        self,
        metric: Metric,
        seed_manifest: str | Path | None = None,
        parent_round: int | None = None,
        rng_seed: int = 0,
        per_seed: bool | None = None,
    ) -> int:
        """Create (or complete) a round and score it. Resolution order:

        1. a pending reseeded round (created, unscored) gets scored;
        2. an explicit --seed-manifest starts a fresh round;
        3. otherwise the latest round's seed and parent are reused, which is
           how two metrics get compared on identical inputs.
        """
        store = self.rounds
        latest = store.latest_round_id()

        if seed_manifest is None and latest is not None and store.status(latest) == "created":
            meta = store.round_meta(latest)
            recorded = meta.get("metric")
            if recorded and metric.value != recorded:
                raise ProjectError(
                    f"round {latest} was reseeded for metric {recorded}; "
                    f"pass --metric {recorded} or reseed again"
                )
            rid = latest
        elif seed_manifest is not None:
            cache = self.ingest_seed(seed_manifest)
            # basename only: the cache digest pins the content, and round bytes
            # must not depend on where the manifest happened to live
            seed_spec = {"type": "external", "manifest": Path(seed_manifest).name, "cache": cache}
            parent = (
                {"type": "round", "round_id": parent_round}
                if parent_round is not None
                else {"type": "corpus"}
            )
            rid = store.create_round(seed_spec, parent, metric.value, rng_seed)
        elif latest is not None:
            meta = store.round_meta(latest)
            rid = store.create_round(meta["seed_spec"], meta["parent"], metric.value, rng_seed)
        else:
            raise ProjectError("no seed available: pass --seed-manifest or reseed a labeled round")

        self.score_round(rid, metric, per_seed=per_seed)
        return rid

    def score_round(self, round_id: int, metric: Metric, per_seed: bool | None = None) -> None:
        meta = self.rounds.round_meta(round_id)
        pooled, per_seed_dists = self.resolve_seed(meta["seed_spec"])
        docs = self.parent_documents(meta["parent"])
        if per_seed is None:
            per_seed = len(per_seed_dists) >= 2
        seeds: list[WordDistribution] = [pooled]
        if per_seed and per_seed_dists:
            seeds.extend(per_seed_dists)
        scores, errors = score_corpus(seeds, docs, metric, self.config.smoothing)
        if errors:
            names = ", ".join(f"{d}: {m}" for d, m in errors[:5])
            raise ProjectError(f"{len(errors)} documents failed to score ({names} ...)")
        self.rounds.write_scores(round_id, scores)

    def winnow_round(self, round_id: int, percentile: float | str) -> list[str]:
        scores = self.rounds.read_scores(round_id, seed_ref="pooled")
        survivors = cut(scores, percentile)
        self.rounds.write_cut(round_id, percentile, survivors)
        return survivors

    def sample_round(
        self,
        round_id: int,
        bands: list[tuple[float, float]] | None = None,
        k_per_band: int | None = None,
        rng_seed: int | None = None,
    ):
        from .winnow import DEFAULT_TRANCHE_BANDS, DEFAULT_TRANCHE_K

        meta = self.rounds.round_meta(round_id)
        scores = self.rounds.read_scores(round_id, seed_ref="pooled")
        tranches = sample_tranches(
            scores,
            bands if bands is not None else list(DEFAULT_TRANCHE_BANDS),
            k_per_band if k_per_band is not None else DEFAULT_TRANCHE_K,
            rng_seed if rng_seed is not None else meta["rng_seed"],
        )
        self.rounds.write_tranches(round_id, tranches)
        return tranches

    def reseed(self, source_round: int, metric: Metric | None = None, rng_seed: int = 0) -> int:
        """Assemble the next seed from a labeled round and open the next round."""
        doc_ids = self.rounds.assemble_next_seed(source_round)
        source_meta = self.rounds.round_meta(source_round)
        seed_spec = {"type": "labels", "source_round": source_round, "doc_ids": doc_ids}
        parent = {"type": "round", "round_id": source_round}
        metric_value = metric.value if metric is not None else source_meta.get("metric")
        return self.rounds.create_round(seed_spec, parent, metric_value, rng_seed)

    def run_round(
        self,
        metric: Metric,
        percentile: float | str,
        seed_manifest: str | Path | None = None,
        parent_round: int | None = None,
        rng_seed: int = 0,
    ) -> int:
        """Score and cut in one step; the API's one-action winnow."""
        rid = self.create_ranked_round(
            metric, seed_manifest=seed_manifest, parent_round=parent_round, rng_seed=rng_seed
        )
        self.winnow_round(rid, percentile)
        return rid

    def advance_round(self, source_round: int, metric: Metric, percentile: float | str, rng_seed: int = 0) -> int:
        """Next-round composite used by POST /rounds/{id}/winnow: reseed from
        the source round's relevant labels when it has any, else re-run its
        own seed (metric comparison); then score and cut."""
        store = self.rounds
        eff = store.effective_labels(source_round)
        if any(lab.relevant for lab in eff.values()):
            rid = self.reseed(source_round, metric=metric, rng_seed=rng_seed)
        else:
            meta = store.round_meta(source_round)
            parent = (
                {"type": "round", "round_id": source_round}
                if (store._dir(source_round) / "survivors.txt").exists()
                else meta["parent"]
            )
            rid = store.create_round(meta["seed_spec"], parent, metric.value, rng_seed)
        self.score_round(rid, metric)
        self.winnow_round(rid, percentile)
        return rid

    # --- reports ---------------------------------------------------------------

    def reports_dir(self, round_id: int) -> Path:
        d = self.root / "reports" / f"round_{round_id:04d}"
        d.mkdir(parents=True, exist_ok=True)
        return d

    def report_histograms(self, round_id: int, bins: int = DEFAULT_BINS, per_seed: bool = False) -> list[Histogram]:
        if per_seed:
            scores = self.rounds.read_scores(round_id, seed_ref=None)
            return per_seed_histograms(scores, bins)
        return [histogram(self.rounds.read_scores(round_id, seed_ref="pooled"), bins)]

    def report_year_series(self, round_id: int, percentile: float | str = 1) -> YearSeries:
        scores = self.rounds.read_scores(round_id, seed_ref="pooled")
        return year_series(scores, self.corpus().by_id, percentile)

    def report_ngrams(self, round_id: int, n: int = DEFAULT_NGRAMS, scope: str = "seed") -> list[tuple[str, int]]:
        docs, surfaces = self._scoped_docs(round_id, scope)
        return top_ngrams(docs, surfaces, n)

    def export_seed_distribution(self, round_id: int) -> str:
        """The round's pooled seed distribution as `surface<TAB>probability`,
        descending."""
        from .distributions import export_tsv

        meta = self.rounds.round_meta(round_id)
        pooled, _ = self.resolve_seed(meta["seed_spec"])
        corpus = self.corpus()
        surfaces = list(corpus.vocabulary.words)
        # external seeds may extend the vocabulary past the corpus
        max_id = max(pooled.entries)
        if max_id >= len(surfaces):
            if meta["seed_spec"]["type"] != "external":
                raise ProjectError("seed distribution references unknown word ids")
            seed_corpus = self.seed_corpus(meta["seed_spec"]["cache"])
            known = set(surfaces)
            surfaces.extend(w for w in seed_corpus.vocabulary.words if w not in known)
        return export_tsv(pooled, surfaces)

    def _scoped_docs(self, round_id: int, scope: str) -> tuple[list[Document], list[str]]:
        meta = self.rounds.round_meta(round_id)
        corpus = self.corpus()
        if scope == "survivors":
            docs = [corpus.document(d) for d in self.rounds.read_survivors(round_id)]
            return docs, corpus.vocabulary.words
        if scope == "seed":
            spec = meta["seed_spec"]
            if spec["type"] == "external":
                seed_corpus = self.seed_corpus(spec["cache"])
                return seed_corpus.documents, seed_corpus.vocabulary.words
            docs = [corpus.document(d) for d in spec["doc_ids"]]
            return docs, corpus.vocabulary.words
        if scope == "corpus":
            return corpus.documents, corpus.vocabulary.words
        raise ProjectError(f"unknown scope {scope!r}; expected survivors, seed, or corpus")

    # --- topics -----------------------------------------------------------------

    def train_topics(
        self,
        round_id: int,
        scope: str = "survivors",
        k: int | None = None,
        alpha: float | None = None,
        beta: float | None = None,
        iterations: int | None = None,
        rng_seed: int = 0,
    ) -> TopicModel:
        docs, surfaces = self._scoped_docs(round_id, scope)
        lda = self.config.lda
        model = train_lda(
            docs,
            surfaces,
            K=k if k is not None else lda.k,
            alpha=alpha if alpha is not None else lda.alpha,
            beta=beta if beta is not None else lda.beta,
            iterations=iterations if iterations is not None else lda.iterations,
            rng_seed=rng_seed,
        )
        save_model(model, self.reports_dir(round_id) / "topic_model.json")
        return model

    def topic_model(self, round_id: int) -> TopicModel:
        path = self.reports_dir(round_id) / "topic_model.json"
        if not path.exists():
            raise ProjectError(f"round {round_id} has no trained topic model; run topics first")
        return load_model(path)

    def topic_names(self, round_id: int) -> dict[int, str]:
        path = self.reports_dir(round_id) / "topic_names.tsv"
        return read_name_map(path) if path.exists() else {}

    def set_topic_names(self, round_id: int, names: dict[int, str]) -> dict[int, str]:
        model = self.topic_model(round_id)
        merged = self.topic_names(round_id)
        unknown = sorted(k for k in names if not (0 <= k < model.K))
        if unknown:
            raise ProjectError(f"unknown topic ids: {unknown}")
        merged.update(names)
        write_name_map(self.reports_dir(round_id) / "topic_names.tsv", merged)
        return merged

    def render_topic_report(self, round_id: int) -> str:
        model = self.topic_model(round_id)
        summaries = assign_names(model, self.topic_names(round_id))
        return render_topic_report(summaries)

    def render_report(self, round_id: int, kind: str, **kwargs) -> str:
        """The canonical TSV bytes for a report kind; the CLI writes these to
        files and the review API serves them verbatim."""
        if kind == "histogram":
            hists = self.report_histograms(
                round_id, bins=kwargs.get("bins", DEFAULT_BINS), per_seed=kwargs.get("per_seed", False)
            )
            return "".join(render_histogram(h) for h in hists)
        if kind == "year-series":
            return render_year_series(self.report_year_series(round_id, kwargs.get("percentile", 1)))
        if kind == "ngrams":
            return render_ngrams(
                self.report_ngrams(round_id, n=kwargs.get("n", DEFAULT_NGRAMS), scope=kwargs.get("scope", "seed"))
            )
        if kind == "topics":
            return self.render_topic_report(round_id)
        raise ProjectError(f"unknown report kind {kind!r}")

    # --- summaries for CLI/API ----------------------------------------------------

    def round_summary(self, round_id: int) -> dict:
        store = self.rounds
        meta = store.round_meta(round_id)
        status = store.status(round_id)
        cut_info = store.read_cut_info(round_id)
        n_scored = None
        if (store._dir(round_id) / "scores.tsv").exists():
            n_scored = len(store.read_scores(round_id, seed_ref="pooled"))
        eff = store.effective_labels(round_id)
        summary = {
            "round_id": round_id,
            "status": status,
            "metric": meta.get("metric"),
            "seed_spec": meta["seed_spec"],
            "parent": meta["parent"],
            "rng_seed": meta["rng_seed"],
            "documents_scored": n_scored,
            "percentile": cut_info["percentile"] if cut_info else None,
            "survivors": cut_info["count"] if cut_info else None,
            "sampled": sum(t.sample_size for t in store.read_tranches(round_id)),
            "labels": len(eff),
            "relevant": sum(1 for lab in eff.values() if lab.relevant),
            "hit_rate": (sum(1 for lab in eff.values() if lab.relevant) / len(eff)) if eff else None,
        }
        return summary
