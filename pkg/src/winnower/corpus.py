"""Document ingest, text normalization, and vocabulary bookkeeping.

A corpus is loaded from a newline-delimited manifest (one JSON record per
line: doc_id, title, year, and exactly one of ``text`` or ``path``), tokenized
under a NormalizationConfig, and kept immutable afterwards. Documents left
with zero tokens are recorded as skipped, never silently dropped.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .stemmer import porter_stem

CACHE_FORMAT_VERSION = 1

REDUCERS = ("none", "stemmer", "lemmatizer")

# Word = letters/digits, internal apostrophes kept ("o'connor"), underscores out.
_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*")


class IngestError(ValueError):
    """Manifest-level problem that aborts the whole ingest."""


class CacheInvalidError(RuntimeError):
    """Corpus cache missing, version-mismatched, or built under another config."""


@dataclass
class NormalizationConfig:
    """Tokenization settings. Order of application is fixed:
    lowercase -> strip punctuation -> length filter -> stopwords -> reducer.
    """

    lowercase: bool = True
    strip_punctuation: bool = True
    stopwords: frozenset[str] = frozenset()
    reducer: str | None = None  # None = lemmatizer if a lemma table is given, else none
    min_token_length: int = 2
    lemma_table: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.stopwords = frozenset(self.stopwords)
        if self.reducer is None:
            self.reducer = "lemmatizer" if self.lemma_table else "none"
        if self.reducer not in REDUCERS:
            raise ValueError(f"unknown reducer {self.reducer!r}; expected one of {REDUCERS}")
        if self.min_token_length < 0:
            raise ValueError("min_token_length must be >= 0")

    def config_hash(self) -> str:
        payload = json.dumps(
            {
                "lowercase": self.lowercase,
                "strip_punctuation": self.strip_punctuation,
                "stopwords": sorted(self.stopwords),
                "reducer": self.reducer,
                "min_token_length": self.min_token_length,
                "lemma_table": sorted(self.lemma_table.items()),
            },
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def normalize(text: str, config: NormalizationConfig) -> list[str]:
    """Turn raw text into surface-form tokens under ``config``.

    Deterministic for a fixed config; an empty result is valid.
    """
    if config.lowercase:
        text = text.lower()
    if config.strip_punctuation:
        tokens = _TOKEN_RE.findall(text)
    else:
        tokens = text.split()
    if config.min_token_length > 1:
        tokens = [t for t in tokens if len(t) >= config.min_token_length]
    if config.stopwords:
        tokens = [t for t in tokens if t not in config.stopwords]
    if config.reducer == "stemmer":
        tokens = [porter_stem(t) for t in tokens]
    elif config.reducer == "lemmatizer":
        table = config.lemma_table
        tokens = [table.get(t, t) for t in tokens]
    return tokens


class Vocabulary:
    """Dense word-id <-> surface-form bijection; ids are 0..size-1."""

    def __init__(self, words: list[str] | None = None):
        self.words: list[str] = list(words) if words else []
        self.index: dict[str, int] = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ValueError("vocabulary surfaces must be unique")

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, surface: str) -> bool:
        return surface in self.index

    def add(self, surface: str) -> int:
        wid = self.index.get(surface)
        if wid is None:
            wid = len(self.words)
            self.words.append(surface)
            self.index[surface] = wid
        return wid

    def id_for(self, surface: str) -> int:
        return self.index[surface]

    def surface(self, word_id: int) -> str:
        return self.words[word_id]


@dataclass
class Document:
    doc_id: str
    title: str
    year: int
    text_ref: str
    tokens: list[int]

    @property
    def token_count(self) -> int:
        return len(self.tokens)

    def counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for w in self.tokens:
            out[w] = out.get(w, 0) + 1
        return out


@dataclass
class Corpus:
    documents: list[Document]
    vocabulary: Vocabulary
    skipped: list[tuple[str, str]] = field(default_factory=list)  # (doc_id, reason)
    errors: list[tuple[str, str]] = field(default_factory=list)  # (doc_id, message)
    config_hash: str = ""
    inline_texts: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.by_id = {d.doc_id: d for d in self.documents}

    def __len__(self) -> int:
        return len(self.documents)

    def document(self, doc_id: str) -> Document:
        return self.by_id[doc_id]


def _parse_manifest_record(line: str, lineno: int) -> dict:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise IngestError(f"manifest line {lineno}: not valid JSON ({exc})") from exc
    if not isinstance(rec, dict):
        raise IngestError(f"manifest line {lineno}: record must be an object")
    return rec


def ingest_corpus(
    manifest: str | Path,
    config: NormalizationConfig,
    base_dir: str | Path | None = None,
) -> Corpus:
    """Load and tokenize every manifest record into a Corpus.

    Duplicate doc_ids and an empty manifest abort the ingest; unreadable or
    malformed per-document records are collected into ``corpus.errors`` and
    ingest continues. Documents with zero retained tokens land in
    ``corpus.skipped``.
    """
    manifest = Path(manifest)
    base = Path(base_dir) if base_dir is not None else manifest.parent
    try:
        raw = manifest.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"manifest unreadable: {exc}") from exc

    vocab = Vocabulary()
    documents: list[Document] = []
    skipped: list[tuple[str, str]] = []
    errors: list[tuple[str, str]] = []
    inline_texts: dict[str, str] = {}
    seen_ids: set[str] = set()

    records = [(i + 1, line) for i, line in enumerate(raw.splitlines()) if line.strip()]
    if not records:
        raise IngestError("empty manifest")

    for lineno, line in records:
        rec = _parse_manifest_record(line, lineno)
        doc_id = rec.get("doc_id")
        if not isinstance(doc_id, str) or not doc_id:
            errors.append((f"line-{lineno}", "missing or invalid doc_id"))
            continue
        if doc_id in seen_ids:
            raise IngestError(f"duplicate doc_id: {doc_id}")
        seen_ids.add(doc_id)

        title = rec.get("title")
        year = rec.get("year")
        if not isinstance(title, str):
            errors.append((doc_id, "missing or invalid title"))
            continue
        if not isinstance(year, int) or isinstance(year, bool):
            errors.append((doc_id, "missing or invalid year"))
            continue

        has_text = "text" in rec
        has_path = "path" in rec
        if has_text == has_path:
            errors.append((doc_id, "record must carry exactly one of 'text' or 'path'"))
            continue

        if has_text:
            text = rec["text"]
            if not isinstance(text, str):
                errors.append((doc_id, "'text' must be a string"))
                continue
            text_ref = f"inline:{doc_id}"
            inline_texts[doc_id] = text
        else:
            path = base / rec["path"]
            try:
                text = path.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                errors.append((doc_id, f"unreadable text: {exc}"))
                continue
            text_ref = str(path.resolve())

        surface_tokens = normalize(text, config)
        if not surface_tokens:
            skipped.append((doc_id, "no tokens after normalization"))
            continue
        token_ids = [vocab.add(t) for t in surface_tokens]
        documents.append(Document(doc_id=doc_id, title=title, year=year, text_ref=text_ref, tokens=token_ids))

    return Corpus(
        documents=documents,
        vocabulary=vocab,
        skipped=skipped,
        errors=errors,
        config_hash=config.config_hash(),
        inline_texts=inline_texts,
    )


# ---------------------------------------------------------------------------
# Cache: a corpus persists as a directory so later commands skip re-tokenizing.
# ---------------------------------------------------------------------------


def save_corpus(corpus: Corpus, cache_dir: str | Path) -> None:
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)

    texts_dir = cache_dir / "texts"
    if corpus.inline_texts:
        texts_dir.mkdir(exist_ok=True)
        for doc_id, text in corpus.inline_texts.items():
            (texts_dir / f"{doc_id}.txt").write_text(text, encoding="utf-8")

    (cache_dir / "vocabulary.txt").write_text(
        "".join(w + "\n" for w in corpus.vocabulary.words), encoding="utf-8"
    )
    with open(cache_dir / "documents.jsonl", "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            text_ref = doc.text_ref
            if text_ref.startswith("inline:"):
                text_ref = str((texts_dir / f"{doc.doc_id}.txt").resolve())
            fh.write(
                json.dumps(
                    {
                        "doc_id": doc.doc_id,
                        "title": doc.title,
                        "year": doc.year,
                        "text_ref": text_ref,
                        "tokens": doc.tokens,
                    },
                    sort_keys=True,
                    separators=(",", ":"),
                )
                + "\n"
            )
    _write_tsv(cache_dir / "skipped.tsv", corpus.skipped)
    _write_tsv(cache_dir / "errors.tsv", corpus.errors)
    meta = {
        "format_version": CACHE_FORMAT_VERSION,
        "config_hash": corpus.config_hash,
        "n_documents": len(corpus.documents),
        "n_skipped": len(corpus.skipped),
        "n_errors": len(corpus.errors),
        "vocabulary_size": len(corpus.vocabulary),
    }
    (cache_dir / "meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_corpus(cache_dir: str | Path, config: NormalizationConfig | None = None) -> Corpus:
    """Load a cached corpus; raises CacheInvalidError on version or config mismatch."""
    cache_dir = Path(cache_dir)
    meta_path = cache_dir / "meta.json"
    if not meta_path.exists():
        raise CacheInvalidError(f"no corpus cache at {cache_dir}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    if meta.get("format_version") != CACHE_FORMAT_VERSION:
        raise CacheInvalidError(
            f"cache format {meta.get('format_version')} != {CACHE_FORMAT_VERSION}"
        )
    if config is not None and meta.get("config_hash") != config.config_hash():
        raise CacheInvalidError("normalization config changed; re-run ingest")

    words = (cache_dir / "vocabulary.txt").read_text(encoding="utf-8").splitlines()
    vocab = Vocabulary(words)
    documents = []
    with open(cache_dir / "documents.jsonl", encoding="utf-8") as fh:
        for line in fh:
            rec = json.loads(line)
            documents.append(
                Document(
                    doc_id=rec["doc_id"],
                    title=rec["title"],
                    year=rec["year"],
                    text_ref=rec["text_ref"],
                    tokens=rec["tokens"],
                )
            )
    skipped = _read_tsv(cache_dir / "skipped.tsv")
    errors = _read_tsv(cache_dir / "errors.tsv")
    return Corpus(
        documents=documents,
        vocabulary=vocab,
        skipped=skipped,
        errors=errors,
        config_hash=meta.get("config_hash", ""),
    )


def read_document_text(doc: Document) -> str:
    if doc.text_ref.startswith("inline:"):
        raise ValueError(
            f"document {doc.doc_id} has an unsaved inline text; persist the corpus first"
        )
    return Path(doc.text_ref).read_text(encoding="utf-8")


def load_stopwords(path: str | Path) -> frozenset[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(w.strip() for w in lines if w.strip())


def load_lemma_table(path: str | Path) -> dict[str, str]:
    table: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"lemma table line {lineno}: expected 'surface<TAB>lemma'")
        table[parts[0]] = parts[1]
    return table


def _write_tsv(path: Path, rows: list[tuple[str, str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in rows:
            fh.write(f"{a}\t{b}\n")


def _read_tsv(path: Path) -> list[tuple[str, str]]:
    if not path.exists():
        return []
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line:
            a, _, b = line.partition("\t")
            out.append((a, b))
    return out
