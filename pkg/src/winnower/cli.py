"""Command-line surface for the winnowing workflow.

Subcommands follow the round lifecycle: init, ingest, rank, winnow, sample,
label, hit-rate, reseed, topics, report, serve. Every run that draws random
numbers prints the seed it used; identical project state, arguments, and
seeds reproduce identical bytes on disk.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import IngestError, load_lemma_table, load_stopwords, NormalizationConfig
from .distributions import SmoothingConfig
from .divergence import Metric
from .project import LdaDefaults, LockHeldError, Project, ProjectConfig, ProjectError
from .topics import assign_names
from .winnow import (
    DEFAULT_TRANCHE_K,
    RoundClosedError,
    RoundStateError,
    parse_label_line,
)

PROJECT_ENV = "WINNOWER_PROJECT"


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _fail(code: str, message: str) -> "CliError":
    return CliError(code, message)


def _project_root(args) -> Path:
    if args.project:
        return Path(args.project)
    env = os.environ.get(PROJECT_ENV)
    return Path(env) if env else Path.cwd()


def _load_project(args) -> Project:
    try:
        return Project.load(_project_root(args))
    except ProjectError as exc:
        raise _fail("no-project", str(exc)) from exc


def _resolve_round(project: Project, round_arg: int | None) -> int:
    if round_arg is not None:
        if not project.rounds.exists(round_arg):
            raise _fail("no-round", f"round {round_arg} does not exist")
        return round_arg
    latest = project.rounds.latest_round_id()
    if latest is None:
        raise _fail("no-round", "no rounds yet; run rank first")
    return latest


def _parse_bands(spec: str) -> list[tuple[float, float]]:
    bands = []
    for part in spec.split(","):
        low, _, high = part.strip().partition("-")
        try:
            bands.append((float(low), float(high)))
        except ValueError:
            raise _fail("bad-bands", f"cannot parse band {part!r}; expected LOW-HIGH") from None
    return bands


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------


def cmd_init(args) -> int:
    root = _project_root(args)
    stopwords = load_stopwords(args.stopwords) if args.stopwords else frozenset()
    lemma_table = load_lemma_table(args.lemma_table) if args.lemma_table else {}
    reducer = None if args.reducer == "auto" else args.reducer
    config = ProjectConfig(
        normalization=NormalizationConfig(
            lowercase=not args.keep_case,
            strip_punctuation=not args.keep_punctuation,
            stopwords=stopwords,
            reducer=reducer,
            min_token_length=args.min_token_length,
            lemma_table=lemma_table,
        ),
        smoothing=SmoothingConfig(epsilon=args.epsilon, vocabulary_mode=args.smoothing_mode),
        lda=LdaDefaults(k=args.lda_k, alpha=args.lda_alpha, beta=args.lda_beta, iterations=args.lda_iterations),
    )
    try:
        Project.init(root, config)
    except ProjectError as exc:
        raise _fail("already-initialized", str(exc)) from exc
    print(f"initialized project at {root}")
    return 0


def cmd_ingest(args) -> int:
    project = _load_project(args)
    with project.lock():
        try:
            corpus = project.ingest(args.manifest)
        except IngestError as exc:
            raise _fail("ingest", str(exc)) from exc
    print(
        f"ingested {len(corpus.documents)} documents "
        f"({len(corpus.skipped)} skipped, {len(corpus.errors)} errors, "
        f"vocabulary {len(corpus.vocabulary)})"
    )
    for doc_id, reason in corpus.skipped:
        print(f"skipped\t{doc_id}\t{reason}")
    for doc_id, message in corpus.errors:
        print(f"error\t{doc_id}\t{message}")
    return 0


def _parse_metric(value: str) -> Metric:
    try:
        return Metric.from_string(value)
    except ValueError as exc:
        raise _fail("bad-metric", str(exc)) from exc


def cmd_rank(args) -> int:
    project = _load_project(args)
    metric = _parse_metric(args.metric)
    with project.lock():
        try:
            rid = project.create_ranked_round(
                metric,
                seed_manifest=args.seed_manifest,
                parent_round=args.parent_round,
                rng_seed=args.rng_seed,
                per_seed=None if args.per_seed == "auto" else args.per_seed == "yes",
            )
        except (ProjectError, RoundStateError, ValueError) as exc:
            raise _fail("rank", str(exc)) from exc
    n = len(project.rounds.read_scores(rid, seed_ref="pooled"))
    print(f"round {rid}: scored {n} documents with {metric.value} (rng_seed={args.rng_seed})")
    return 0


def cmd_winnow(args) -> int:
    project = _load_project(args)
    with project.lock():
        rid = _resolve_round(project, args.round)
        try:
            survivors = project.winnow_round(rid, args.percentile)
        except (ProjectError, RoundStateError, ValueError) as exc:
            raise _fail("winnow", str(exc)) from exc
    print(f"round {rid}: cut at {args.percentile}% keeps {len(survivors)} documents")
    return 0


def cmd_sample(args) -> int:
    project = _load_project(args)
    with project.lock():
        rid = _resolve_round(project, args.round)
        bands = _parse_bands(args.bands) if args.bands else None
        try:
            tranches = project.sample_round(rid, bands=bands, k_per_band=args.k, rng_seed=args.rng_seed)
        except (ProjectError, RoundStateError, ValueError) as exc:
            raise _fail("sample", str(exc)) from exc
    seed_used = args.rng_seed if args.rng_seed is not None else project.rounds.round_meta(rid)["rng_seed"]
    print(f"round {rid}: sampled {sum(t.sample_size for t in tranches)} documents (rng_seed={seed_used})")
    for t in tranches:
        print(f"tranche {t.tranche_id} ({t.low}, {t.high}]: {t.sample_size} documents")
    return 0


def cmd_label(args) -> int:
    project = _load_project(args)
    with project.lock():
        rid = _resolve_round(project, args.round)
        try:
            lines = Path(args.file).read_text(encoding="utf-8").splitlines()
            labels = [parse_label_line(line, rid) for line in lines if line.strip()]
        except (OSError, ValueError) as exc:
            raise _fail("labels", str(exc)) from exc
        try:
            report = project.rounds.ingest_labels(rid, labels)
        except RoundClosedError as exc:
            raise _fail("round-closed", str(exc)) from exc
    print(
        f"round {rid}: {len(report.accepted)} labels accepted, "
        f"{len(report.rejected)} rejected, {len(report.conflicts)} overwritten"
    )
    for lab, reason in report.rejected:
        print(f"rejected\t{lab.doc_id}\t{reason}")
    for lab in report.conflicts:
        print(f"overwritten\t{lab.doc_id}\t{1 if lab.relevant else 0}\t{lab.annotator}\t{lab.timestamp}")
    return 0


def cmd_hit_rate(args) -> int:
    project = _load_project(args)
    rid = _resolve_round(project, args.round)
    try:
        rate = project.rounds.hit_rate(rid)
    except ValueError as exc:
        raise _fail("no-labels", str(exc)) from exc
    print(f"{rate!r}")
    return 0


def cmd_reseed(args) -> int:
    project = _load_project(args)
    with project.lock():
        rid = _resolve_round(project, args.round)
        metric = _parse_metric(args.metric) if args.metric else None
        try:
            new_rid = project.reseed(rid, metric=metric, rng_seed=args.rng_seed)
        except (ValueError, ProjectError) as exc:
            raise _fail("reseed", str(exc)) from exc
    meta = project.rounds.round_meta(new_rid)
    print(
        f"round {new_rid}: seeded from {len(meta['seed_spec']['doc_ids'])} relevant documents "
        f"of round {rid} (rng_seed={args.rng_seed})"
    )
    return 0


def cmd_topics(args) -> int:
    project = _load_project(args)
    with project.lock():
        rid = _resolve_round(project, args.round)
        try:
            model = project.train_topics(
                rid,
                scope=args.scope,
                k=args.k,
                alpha=args.alpha,
                beta=args.beta,
                iterations=args.iterations,
                rng_seed=args.rng_seed,
            )
            if args.names:
                from .topics import read_name_map

                project.set_topic_names(rid, read_name_map(args.names))
        except (ProjectError, RoundStateError, ValueError) as exc:
            raise _fail("topics", str(exc)) from exc
        out = project.reports_dir(rid) / "topics.tsv"
        out.write_text(project.render_topic_report(rid), encoding="utf-8")
        paths = [out]
        if not args.no_figure:
            from .figures import save_topics_figure

            paths.append(
                save_topics_figure(
                    assign_names(model, project.topic_names(rid)),
                    project.reports_dir(rid) / "topics.png",
                )
            )
    print(f"round {rid}: trained K={model.K} topics over {model.total_tokens} tokens (rng_seed={args.rng_seed})")
    for p in paths:
        print(p)
    return 0


def cmd_report(args) -> int:
    project = _load_project(args)
    rid = _resolve_round(project, args.round)
    out_dir = Path(args.output) if args.output else project.reports_dir(rid)
    out_dir.mkdir(parents=True, exist_ok=True)
    kind = args.kind
    try:
        if kind == "histogram":
            text = project.render_report(rid, "histogram", bins=args.bins, per_seed=args.per_seed)
            stem = "histogram_per_seed" if args.per_seed else "histogram"
        elif kind == "year-series":
            text = project.render_report(rid, "year-series", percentile=args.percentile)
            stem = f"year_series_p{args.percentile}"
        elif kind == "ngrams":
            text = project.render_report(rid, "ngrams", n=args.top, scope=args.scope)
            stem = "ngrams"
        elif kind == "topics":
            text = project.render_report(rid, "topics")
            stem = "topics"
        elif kind == "seed-distribution":
            text = project.export_seed_distribution(rid)
            stem = "seed_distribution"
        else:
            raise _fail("bad-report", f"unknown report kind {kind!r}")
    except (ProjectError, RoundStateError, ValueError) as exc:
        raise _fail("report", str(exc)) from exc

    tsv_path = out_dir / f"{stem}.tsv"
    tsv_path.write_text(text, encoding="utf-8")
    paths = [tsv_path]

    if not args.no_figure:
        from . import figures

        png = out_dir / f"{stem}.png"
        if kind == "histogram":
            paths.append(figures.save_histogram_figure(project.report_histograms(rid, args.bins, args.per_seed), png))
        elif kind == "year-series":
            paths.append(figures.save_year_series_figure(project.report_year_series(rid, args.percentile), png))
        elif kind == "ngrams":
            paths.append(figures.save_ngrams_figure(project.report_ngrams(rid, args.top, args.scope), png))
        elif kind == "topics":
            paths.append(
                figures.save_topics_figure(
                    assign_names(project.topic_model(rid), project.topic_names(rid)), png
                )
            )
    for p in paths:
        print(p)
    return 0


def cmd_serve(args) -> int:
    project = _load_project(args)
    from .api import serve

    host, _, port = args.bind.rpartition(":")
    try:
        serve(project, host or "127.0.0.1", int(port), static_dir=args.static)
    except KeyboardInterrupt:
        pass
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="winnower",
        description="Winnow a document corpus toward a seed corpus by divergence, "
        "with expert relevance labeling and LDA verification.",
    )
    parser.add_argument("--project", "-C", help=f"project root (default: ${PROJECT_ENV} or cwd)")
    parser.add_argument("--version", action="version", version=f"winnower {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a project")
    p.add_argument("--stopwords", help="stopword file, one surface form per line")
    p.add_argument("--lemma-table", help="lemma table file, surface<TAB>lemma per line")
    p.add_argument("--reducer", choices=["auto", "none", "stemmer", "lemmatizer"], default="auto")
    p.add_argument("--min-token-length", type=int, default=2)
    p.add_argument("--keep-case", action="store_true", help="skip lowercasing")
    p.add_argument("--keep-punctuation", action="store_true", help="skip punctuation stripping")
    p.add_argument("--epsilon", type=float, default=0.5, help="smoothing pseudo-count")
    p.add_argument("--smoothing-mode", choices=["union_of_pair", "corpus_wide"], default="union_of_pair")
    p.add_argument("--lda-k", type=int, default=100)
    p.add_argument("--lda-alpha", type=float, default=None, help="doc-topic prior (default 50/K)")
    p.add_argument("--lda-beta", type=float, default=0.01)
    p.add_argument("--lda-iterations", type=int, default=1000)
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("ingest", help="tokenize a manifest into the corpus cache")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("rank", help="score documents against the seed")
    p.add_argument("--metric", required=True, help="kld | symmetric-kld | jsd")
    p.add_argument("--seed-manifest", help="manifest of external seed documents")
    p.add_argument("--parent-round", type=int, help="score only this round's survivors")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--per-seed", choices=["auto", "yes", "no"], default="auto",
                   help="also score against each seed document separately")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("winnow", help="cut the ranked round at a percentile")
    p.add_argument("--percentile", required=True)
    p.add_argument("--round", type=int)
    p.set_defaults(func=cmd_winnow)

    p = sub.add_parser("sample", help="draw review tranches from percentile bands")
    p.add_argument("--bands", help="comma-separated LOW-HIGH percentile bands (default 0-1,1-5,5-25)")
    p.add_argument("--k", type=int, default=DEFAULT_TRANCHE_K, help="sample size per band")
    p.add_argument("--rng-seed", type=int, default=None, help="default: the round's rng seed")
    p.add_argument("--round", type=int)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("label", help="ingest an expert label file")
    p.add_argument("--file", required=True, help="doc_id<TAB>relevant(0|1)<TAB>annotator<TAB>timestamp")
    p.add_argument("--round", type=int)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("hit-rate", help="fraction of labeled documents judged relevant")
    p.add_argument("--round", type=int)
    p.set_defaults(func=cmd_hit_rate)

    p = sub.add_parser("reseed", help="open the next round from the relevant labels")
    p.add_argument("--round", type=int, help="labeled source round (default: latest)")
    p.add_argument("--metric", help="metric for the next round (default: inherit)")
    p.add_argument("--rng-seed", type=int, default=0)
    p.set_defaults(func=cmd_reseed)

    p = sub.add_parser("topics", help="train an LDA topic model over a round")
    p.add_argument("--round", type=int)
    p.add_argument("--scope", choices=["survivors", "seed", "corpus"], default="survivors")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--names", help="name map file, topic_id<TAB>name per line")
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=cmd_topics)

    p = sub.add_parser("report", help="emit a report as TSV plus a figure")
    p.add_argument("kind", choices=["histogram", "year-series", "ngrams", "topics", "seed-distribution"])
    p.add_argument("--round", type=int)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--per-seed", action="store_true", help="one histogram per seed document")
    p.add_argument("--percentile", default="1", help="year-series cut (default 1)")
    p.add_argument("--top", type=int, default=20, help="rows in the n-gram table")
    p.add_argument("--scope", choices=["seed", "survivors", "corpus"], default="seed")
    p.add_argument("--output", "-o", help="output directory (default reports/round_NNNN)")
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the expert review API (and UI, if built)")
    p.add_argument("--bind", default="127.0.0.1:8787")
    p.add_argument("--static", help="directory of built UI assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except LockHeldError as exc:
        print(f"error[locked]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
