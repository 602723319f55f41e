"""Round orchestration: percentile cuts, tranche sampling for expert review,
label ingestion with last-write-wins conflict resolution, hit rates, and
next-round seed assembly.

Rounds are append-only. A round directory only ever gains files
(round.json -> scores.tsv -> cut.json + survivors.txt -> tranches.tsv ->
labels.tsv); nothing is rewritten, and re-running a stage means creating a
new round. A round counts as closed once a later round was seeded from it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .divergence import DivergenceScore, parse_score_table, render_score_table

DEFAULT_TRANCHE_BANDS: tuple[tuple[float, float], ...] = ((0.0, 1.0), (1.0, 5.0), (5.0, 25.0))
DEFAULT_TRANCHE_K = 20


@dataclass(frozen=True)
class Label:
    doc_id: str
    relevant: bool
    annotator: str
    timestamp: str  # ISO-8601
    round_id: int = 0


@dataclass(frozen=True)
class Tranche:
    tranche_id: int
    low: float
    high: float
    sampled_doc_ids: tuple[str, ...]
    rng_seed: int

    @property
    def sample_size(self) -> int:
        return len(self.sampled_doc_ids)


class RoundClosedError(RuntimeError):
    pass


class RoundStateError(RuntimeError):
    """A stage was requested out of order or would overwrite an existing one."""


def _cut_size(percentile: float | str, n: int) -> int:
    """ceil(percentile/100 * n) in exact arithmetic (no float-boundary drift)."""
    frac = Fraction(str(percentile))
    if not (0 < frac <= 100):
        raise ValueError(f"percentile must be in (0, 100], got {percentile}")
    num = frac.numerator * n
    den = frac.denominator * 100
    return -(-num // den)


def rank_order(scores: Sequence[DivergenceScore]) -> list[DivergenceScore]:
    """Total order: ascending value, ties by ascending doc_id."""
    return sorted(scores, key=lambda s: (s.value, s.doc_id))


def cut(scores: Sequence[DivergenceScore], percentile: float | str) -> list[str]:
    """The ceil(percentile/100 * N) doc_ids with the smallest divergence,
    ordered by (value, doc_id)."""
    if not scores:
        raise ValueError("no scores to cut")
    k = _cut_size(percentile, len(scores))
    return [s.doc_id for s in rank_order(scores)[:k]]


def sample_tranches(
    scores: Sequence[DivergenceScore],
    bands: Sequence[tuple[float, float]] = DEFAULT_TRANCHE_BANDS,
    k_per_band: int = DEFAULT_TRANCHE_K,
    rng_seed: int = 0,
) -> list[Tranche]:
    """Uniform sampling without replacement inside each percentile band's rank
    range; a band holding fewer than k documents is returned whole.
    Deterministic for a fixed rng_seed (PCG64)."""
    if not scores:
        raise ValueError("no scores to sample")
    if k_per_band < 1:
        raise ValueError("k_per_band must be >= 1")
    for low, high in bands:
        if not (0 <= low < high <= 100):
            raise ValueError(f"bad band ({low}, {high}]: need 0 <= low < high <= 100")
    ordered = sorted(bands, key=lambda b: b[0])
    for (l1, h1), (l2, h2) in zip(ordered, ordered[1:]):
        if h1 > l2:
            raise ValueError(f"overlapping bands ({l1}, {h1}] and ({l2}, {h2}]")

    ranking = rank_order(scores)
    n = len(ranking)
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    tranches: list[Tranche] = []
    for i, (low, high) in enumerate(bands):
        start = _cut_size(low, n) if low > 0 else 0
        end = _cut_size(high, n)
        pool = ranking[start:end]
        if len(pool) <= k_per_band:
            picked = list(range(len(pool)))
        else:
            picked = sorted(rng.choice(len(pool), size=k_per_band, replace=False).tolist())
        tranches.append(
            Tranche(
                tranche_id=i + 1,
                low=low,
                high=high,
                sampled_doc_ids=tuple(pool[j].doc_id for j in picked),
                rng_seed=rng_seed,
            )
        )
    return tranches


# ---------------------------------------------------------------------------
# Labels
# ---------------------------------------------------------------------------


def effective_labels(labels: Iterable[Label]) -> tuple[dict[str, Label], list[Label]]:
    """Resolve a label log to one effective label per doc_id.

    Later timestamp wins; on an exact timestamp tie, later log position wins.
    Returns (effective, overwritten) where ``overwritten`` lists every label
    that lost to another one.
    """
    effective: dict[str, Label] = {}
    overwritten: list[Label] = []
    for lab in labels:
        prev = effective.get(lab.doc_id)
        if prev is None:
            effective[lab.doc_id] = lab
        elif lab.timestamp >= prev.timestamp:
            overwritten.append(prev)
            effective[lab.doc_id] = lab
        else:
            overwritten.append(lab)
    return effective, overwritten


def hit_rate_of(effective: dict[str, Label]) -> float:
    if not effective:
        raise ValueError("nothing labeled")
    relevant = sum(1 for lab in effective.values() if lab.relevant)
    return relevant / len(effective)


def parse_label_line(line: str, round_id: int = 0) -> Label:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 4:
        raise ValueError(f"bad label line (want doc_id<TAB>relevant<TAB>annotator<TAB>timestamp): {line!r}")
    doc_id, rel, annotator, timestamp = parts
    if rel not in ("0", "1"):
        raise ValueError(f"relevant flag must be 0 or 1, got {rel!r}")
    return Label(doc_id=doc_id, relevant=rel == "1", annotator=annotator, timestamp=timestamp, round_id=round_id)


def format_label_line(label: Label) -> str:
    return f"{label.doc_id}\t{1 if label.relevant else 0}\t{label.annotator}\t{label.timestamp}\n"


@dataclass
class LabelIngestReport:
    accepted: list[Label] = field(default_factory=list)
    rejected: list[tuple[Label, str]] = field(default_factory=list)
    conflicts: list[Label] = field(default_factory=list)  # labels overwritten by later ones


# ---------------------------------------------------------------------------
# Persistent round store
# ---------------------------------------------------------------------------

ROUND_STATUSES = ("created", "scored", "winnowed", "sampled", "labeled", "closed")


@dataclass
class Round:
    round_id: int
    seed_spec: dict
    parent: dict  # {"type": "corpus"} or {"type": "round", "round_id": n}
    metric: str | None
    rng_seed: int
    percentile: str | None = None
    derived_doc_ids: list[str] = field(default_factory=list)
    status: str = "created"


class RoundStore:
    """Filesystem-backed, append-only store of rounds under <root>/rounds."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _dir(self, round_id: int) -> Path:
        return self.root / f"round_{round_id:04d}"

    def round_ids(self) -> list[int]:
        if not self.root.exists():
            return []
        ids = []
        for p in self.root.iterdir():
            if p.is_dir() and p.name.startswith("round_"):
                ids.append(int(p.name.split("_", 1)[1]))
        return sorted(ids)

    def latest_round_id(self) -> int | None:
        ids = self.round_ids()
        return ids[-1] if ids else None

    def exists(self, round_id: int) -> bool:
        return (self._dir(round_id) / "round.json").exists()

    def create_round(
        self,
        seed_spec: dict,
        parent: dict,
        metric: str | None,
        rng_seed: int = 0,
    ) -> int:
        round_id = (self.latest_round_id() or 0) + 1
        d = self._dir(round_id)
        d.mkdir(parents=True)
        payload = {
            "round_id": round_id,
            "seed_spec": seed_spec,
            "parent": parent,
            "metric": metric,
            "rng_seed": rng_seed,
        }
        (d / "round.json").write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        return round_id

    def round_meta(self, round_id: int) -> dict:
        path = self._dir(round_id) / "round.json"
        if not path.exists():
            raise KeyError(f"no round {round_id}")
        return json.loads(path.read_text(encoding="utf-8"))

    # --- stage files -------------------------------------------------------

    def write_scores(self, round_id: int, scores: Sequence[DivergenceScore]) -> None:
        path = self._dir(round_id) / "scores.tsv"
        if path.exists():
            raise RoundStateError(f"round {round_id} already scored; create a new round")
        path.write_text(render_score_table(scores), encoding="utf-8")

    def read_scores(self, round_id: int, seed_ref: str | None = "pooled") -> list[DivergenceScore]:
        path = self._dir(round_id) / "scores.tsv"
        if not path.exists():
            raise RoundStateError(f"round {round_id} has no scores yet")
        scores = parse_score_table(path.read_text(encoding="utf-8"))
        if seed_ref is not None:
            scores = [s for s in scores if s.seed_ref == seed_ref]
        return scores

    def write_cut(self, round_id: int, percentile: float | str, survivors: Sequence[str]) -> None:
        d = self._dir(round_id)
        if (d / "survivors.txt").exists():
            raise RoundStateError(f"round {round_id} already winnowed; create a new round")
        (d / "cut.json").write_text(
            json.dumps({"percentile": str(percentile), "count": len(survivors)}, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        (d / "survivors.txt").write_text("".join(s + "\n" for s in survivors), encoding="utf-8")

    def read_survivors(self, round_id: int) -> list[str]:
        path = self._dir(round_id) / "survivors.txt"
        if not path.exists():
            raise RoundStateError(f"round {round_id} has no survivors yet")
        return [line for line in path.read_text(encoding="utf-8").splitlines() if line]

    def read_cut_info(self, round_id: int) -> dict | None:
        path = self._dir(round_id) / "cut.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def write_tranches(self, round_id: int, tranches: Sequence[Tranche]) -> None:
        path = self._dir(round_id) / "tranches.tsv"
        if path.exists():
            raise RoundStateError(f"round {round_id} already sampled; create a new round")
        lines = []
        for t in tranches:
            for doc_id in t.sampled_doc_ids:
                lines.append(f"{t.tranche_id}\t{t.low!r}\t{t.high!r}\t{t.rng_seed}\t{doc_id}\n")
        path.write_text("".join(lines), encoding="utf-8")

    def read_tranches(self, round_id: int) -> list[Tranche]:
        path = self._dir(round_id) / "tranches.tsv"
        if not path.exists():
            return []
        grouped: dict[int, dict] = {}
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line:
                continue
            tid, low, high, seed, doc_id = line.split("\t")
            g = grouped.setdefault(int(tid), {"low": float(low), "high": float(high), "seed": int(seed), "docs": []})
            g["docs"].append(doc_id)
        return [
            Tranche(tranche_id=tid, low=g["low"], high=g["high"], sampled_doc_ids=tuple(g["docs"]), rng_seed=g["seed"])
            for tid, g in sorted(grouped.items())
        ]

    def append_labels(self, round_id: int, labels: Sequence[Label]) -> None:
        path = self._dir(round_id) / "labels.tsv"
        with open(path, "a", encoding="utf-8") as fh:
            for lab in labels:
                fh.write(format_label_line(lab))

    def read_label_log(self, round_id: int) -> list[Label]:
        path = self._dir(round_id) / "labels.tsv"
        if not path.exists():
            return []
        return [
            parse_label_line(line, round_id)
            for line in path.read_text(encoding="utf-8").splitlines()
            if line
        ]

    # --- derived state -----------------------------------------------------

    def is_closed(self, round_id: int) -> bool:
        """Closed once a later round was seeded from this one's labels."""
        for other in self.round_ids():
            if other <= round_id:
                continue
            meta = self.round_meta(other)
            if meta["seed_spec"].get("source_round") == round_id:
                return True
        return False

    def status(self, round_id: int) -> str:
        if self.is_closed(round_id):
            return "closed"
        d = self._dir(round_id)
        if (d / "labels.tsv").exists() and (d / "labels.tsv").stat().st_size > 0:
            return "labeled"
        if (d / "tranches.tsv").exists():
            return "sampled"
        if (d / "survivors.txt").exists():
            return "winnowed"
        if (d / "scores.tsv").exists():
            return "scored"
        return "created"

    def load_round(self, round_id: int) -> Round:
        meta = self.round_meta(round_id)
        cut_info = self.read_cut_info(round_id)
        survivors: list[str] = []
        if (self._dir(round_id) / "survivors.txt").exists():
            survivors = self.read_survivors(round_id)
        return Round(
            round_id=round_id,
            seed_spec=meta["seed_spec"],
            parent=meta["parent"],
            metric=meta["metric"],
            rng_seed=meta["rng_seed"],
            percentile=cut_info["percentile"] if cut_info else None,
            derived_doc_ids=survivors,
            status=self.status(round_id),
        )

    # --- label-facing operations -------------------------------------------

    def labelable_doc_ids(self, round_id: int) -> set[str]:
        """Docs an expert may label: the sampled tranches plus the derived set."""
        ids: set[str] = set()
        for t in self.read_tranches(round_id):
            ids.update(t.sampled_doc_ids)
        d = self._dir(round_id)
        if (d / "survivors.txt").exists():
            ids.update(self.read_survivors(round_id))
        return ids

    def ingest_labels(self, round_id: int, labels: Sequence[Label]) -> LabelIngestReport:
        """Append labels to the round's log. Unknown doc_ids are rejected (the
        round is otherwise unchanged by them); the conflict report lists labels
        overwritten under last-write-wins."""
        if not self.exists(round_id):
            raise KeyError(f"no round {round_id}")
        if self.is_closed(round_id):
            raise RoundClosedError(f"round {round_id} is closed")
        allowed = self.labelable_doc_ids(round_id)
        report = LabelIngestReport()
        for lab in labels:
            if lab.doc_id not in allowed:
                report.rejected.append((lab, "doc_id not in this round's sampled or derived set"))
            else:
                report.accepted.append(lab)
        if report.accepted:
            self.append_labels(round_id, report.accepted)
        _, overwritten = effective_labels(self.read_label_log(round_id))
        report.conflicts = overwritten
        return report

    def effective_labels(self, round_id: int) -> dict[str, Label]:
        eff, _ = effective_labels(self.read_label_log(round_id))
        return eff

    def hit_rate(self, round_id: int) -> float:
        return hit_rate_of(self.effective_labels(round_id))

    def assemble_next_seed(self, round_id: int) -> list[str]:
        """The relevant-labeled doc_ids, which become the next round's pooled seed."""
        eff = self.effective_labels(round_id)
        seed = sorted(doc_id for doc_id, lab in eff.items() if lab.relevant)
        if not seed:
            raise ValueError(f"round {round_id} has no relevant labels to reseed from")
        return seed
