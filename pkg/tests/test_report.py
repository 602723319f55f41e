"""Histogram, year-series, and n-gram reports plus their TSV renderings."""

import numpy as np
import pytest

from winnower.divergence import DivergenceScore, Metric
from winnower.report import (
    histogram,
    per_seed_histograms,
    render_histogram,
    render_ngrams,
    render_year_series,
    top_ngrams,
    year_series,
)

from helpers import corpus_from_token_lists, metric_disagreement_corpus, distribution_from_surfaces


def scores_of(values, metric=Metric.KLD, seed_ref="pooled", prefix="d"):
    return [
        DivergenceScore(f"{prefix}{i:04d}", metric, seed_ref, float(v))
        for i, v in enumerate(values)
    ]


class TestHistogram:
    def test_two_bins_split_at_midpoint(self):
        h = histogram(scores_of([0, 1, 2, 3]), bins=2)
        assert h.bin_edges == [0.0, 1.5, 3.0]
        assert h.counts == [2, 2]

    def test_all_equal_values_occupy_one_bin(self):
        h = histogram(scores_of([0.7] * 9), bins=4)
        assert sum(h.counts) == 9
        assert sorted(h.counts)[-1] == 9
        assert all(b > a for a, b in zip(h.bin_edges, h.bin_edges[1:]))

    def test_count_conservation_random(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            n = int(rng.integers(1, 500))
            bins = int(rng.integers(1, 80))
            h = histogram(scores_of(rng.random(n)), bins=bins)
            assert sum(h.counts) == n
            assert len(h.counts) == bins
            assert len(h.bin_edges) == bins + 1

    def test_max_value_lands_in_last_bin(self):
        h = histogram(scores_of([0.0, 1.0]), bins=10)
        assert h.counts[-1] == 1

    def test_per_seed_histograms_one_per_ref(self):
        scores = []
        for seed in ("seed:devon", "seed:bessborough", "seed:napier", "seed:richmond"):
            scores.extend(scores_of(np.linspace(0, 1, 30), seed_ref=seed, prefix=seed[5:8]))
        hists = per_seed_histograms(scores, bins=10)
        assert len(hists) == 4
        assert {h.seed_ref for h in hists} == {s.seed_ref for s in scores}
        assert all(sum(h.counts) == 30 for h in hists)

    def test_bins_must_be_positive(self):
        with pytest.raises(ValueError):
            histogram(scores_of([1.0]), bins=0)

    def test_rendering(self):
        h = histogram(scores_of([0, 1, 2, 3]), bins=2)
        text = render_histogram(h)
        assert text.splitlines()[0] == "# kld pooled"
        assert text.splitlines()[1] == "0.0\t1.5\t2"
        assert text.splitlines()[2] == "1.5\t3.0\t2"


def year_corpus():
    return corpus_from_token_lists(
        [
            ("a", "a", 1881, ["rent"]),
            ("b", "b", 1881, ["rent"]),
            ("c", "c", 1845, ["rent"]),
            ("d", "d", 1902, ["rent"]),
        ]
    )


class TestYearSeries:
    def test_top_percentile_single_year(self):
        corpus = year_corpus()
        scores = [
            DivergenceScore("a", Metric.KLD, "pooled", 0.1),
            DivergenceScore("b", Metric.KLD, "pooled", 0.2),
            DivergenceScore("c", Metric.KLD, "pooled", 0.9),
            DivergenceScore("d", Metric.KLD, "pooled", 0.8),
        ]
        ys = year_series(scores, corpus.by_id, 50)
        assert ys.per_year == {1881: 2}

    def test_full_percentile_equals_corpus_year_histogram(self):
        corpus = year_corpus()
        scores = scores_of([0.4, 0.3, 0.2, 0.1])
        scores = [
            DivergenceScore(d.doc_id, Metric.KLD, "pooled", v)
            for d, v in zip(corpus.documents, [0.4, 0.3, 0.2, 0.1])
        ]
        ys = year_series(scores, corpus.by_id, 100)
        assert ys.per_year == {1881: 2, 1845: 1, 1902: 1}
        assert sum(ys.per_year.values()) == 4

    def test_unknown_doc_is_an_error_naming_it(self):
        corpus = year_corpus()
        scores = [DivergenceScore("ghost", Metric.KLD, "pooled", 0.1)]
        with pytest.raises(ValueError, match="ghost"):
            year_series(scores, corpus.by_id, 100)

    def test_metrics_disagree_on_the_yearly_story(self):
        from winnower.distributions import SmoothingConfig
        from winnower.divergence import score_corpus

        corpus, seed_counts = metric_disagreement_corpus()
        seed = distribution_from_surfaces(seed_counts, corpus.vocabulary, "pooled")
        cfg = SmoothingConfig()
        kld_scores, _ = score_corpus(seed, corpus, Metric.KLD, cfg)
        jsd_scores, _ = score_corpus(seed, corpus, Metric.JSD, cfg)
        ys_kld = year_series(kld_scores, corpus.by_id, 1)
        ys_jsd = year_series(jsd_scores, corpus.by_id, 1)
        assert ys_kld.per_year != ys_jsd.per_year

    def test_rendering(self):
        corpus = year_corpus()
        scores = [
            DivergenceScore(d.doc_id, Metric.JSD, "pooled", v)
            for d, v in zip(corpus.documents, [0.4, 0.3, 0.2, 0.1])
        ]
        text = render_year_series(year_series(scores, corpus.by_id, 100))
        assert text.splitlines() == ["# jsd percentile=100", "1845\t1", "1881\t2", "1902\t1"]


class TestTopNgrams:
    def test_simple_counts(self):
        corpus = corpus_from_token_lists([("a", "a", 1881, ["rent", "rent", "land"])])
        assert top_ngrams(corpus.documents, corpus.vocabulary.words, 10) == [("rent", 2), ("land", 1)]

    def test_ties_alphabetical(self):
        corpus = corpus_from_token_lists([("a", "a", 1881, ["zed", "ant", "zed", "ant"])])
        assert top_ngrams(corpus.documents, corpus.vocabulary.words, 10) == [("ant", 2), ("zed", 2)]

    def test_order_permutation_invariant(self):
        docs = [
            ("a", "a", 1881, ["rent", "land", "rent"]),
            ("b", "b", 1882, ["land", "lease"]),
            ("c", "c", 1883, ["rent"]),
        ]
        c1 = corpus_from_token_lists(docs)
        c2 = corpus_from_token_lists(list(reversed(docs)))
        assert top_ngrams(c1.documents, c1.vocabulary.words, 5) == top_ngrams(
            c2.documents, c2.vocabulary.words, 5
        )

    def test_total_counts_cover_corpus_tokens(self):
        corpus = corpus_from_token_lists(
            [("a", "a", 1881, ["rent", "land", "rent", "farm"]), ("b", "b", 1882, ["farm", "acre"])]
        )
        full = top_ngrams(corpus.documents, corpus.vocabulary.words, len(corpus.vocabulary))
        assert sum(c for _, c in full) == sum(d.token_count for d in corpus.documents)

    def test_n_caps_output(self):
        corpus = corpus_from_token_lists([("a", "a", 1881, ["rent", "land", "farm"])])
        assert len(top_ngrams(corpus.documents, corpus.vocabulary.words, 2)) == 2

    def test_rendering_ranked(self):
        corpus = corpus_from_token_lists([("a", "a", 1881, ["rent", "rent", "land"])])
        text = render_ngrams(top_ngrams(corpus.documents, corpus.vocabulary.words, 5))
        assert text.splitlines() == ["1\trent\t2", "2\tland\t1"]
