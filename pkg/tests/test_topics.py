"""Collapsed Gibbs LDA: count conservation, determinism, planted-model
recovery, and the topic report format."""

import numpy as np
import pytest

from winnower.topics import (
    TopicModel,
    assign_names,
    load_model,
    read_name_map,
    render_topic_report,
    save_model,
    top_words,
    topic_prevalence,
    train_lda,
    write_name_map,
)

from helpers import PLANTED_A, PLANTED_B, corpus_from_token_lists, planted_two_topic_corpus


@pytest.fixture(scope="module")
def planted_model():
    corpus, sides = planted_two_topic_corpus(n_docs=120, share_a=0.5, rng_seed=7)
    model = train_lda(corpus.documents, corpus.vocabulary.words, K=2, iterations=120, rng_seed=7)
    return corpus, sides, model


def tiny_corpus():
    return corpus_from_token_lists(
        [("solo", "one document", 1881, ["rent", "land", "rent", "farm", "lease", "land"])]
    )


class TestTrainLda:
    def test_single_doc_count_conservation(self):
        corpus = tiny_corpus()
        model = train_lda(corpus.documents, corpus.vocabulary.words, K=2, iterations=20, rng_seed=1)
        assert model.doc_topic_counts.sum() == 6
        assert np.array_equal(model.doc_topic_counts.sum(axis=1), model.doc_lengths)
        assert np.array_equal(model.topic_word_counts.sum(axis=1), model.topic_totals)
        assert model.topic_totals.sum() == model.total_tokens == 6

    def test_same_seed_identical_assignments(self):
        corpus, _ = planted_two_topic_corpus(n_docs=40, rng_seed=3)
        a = train_lda(corpus.documents, corpus.vocabulary.words, K=3, iterations=30, rng_seed=11)
        b = train_lda(corpus.documents, corpus.vocabulary.words, K=3, iterations=30, rng_seed=11)
        assert np.array_equal(a.doc_topic_counts, b.doc_topic_counts)
        assert np.array_equal(a.topic_word_counts, b.topic_word_counts)

    def test_different_seed_differs(self):
        corpus, _ = planted_two_topic_corpus(n_docs=40, rng_seed=3)
        a = train_lda(corpus.documents, corpus.vocabulary.words, K=3, iterations=30, rng_seed=11)
        b = train_lda(corpus.documents, corpus.vocabulary.words, K=3, iterations=30, rng_seed=12)
        assert not np.array_equal(a.doc_topic_counts, b.doc_topic_counts)

    def test_planted_recovery(self, planted_model):
        corpus, sides, model = planted_model
        purity = model.doc_topic_counts.max(axis=1) / model.doc_lengths
        assert (purity >= 0.95).all()
        top_a = {w for w, _ in top_words(model, 0, 10)}
        top_b = {w for w, _ in top_words(model, 1, 10)}
        assert {frozenset(top_a), frozenset(top_b)} == {frozenset(PLANTED_A), frozenset(PLANTED_B)}

    def test_errors(self):
        corpus = tiny_corpus()
        with pytest.raises(ValueError, match="empty corpus"):
            train_lda([], corpus.vocabulary.words, K=2)
        with pytest.raises(ValueError, match="K"):
            train_lda(corpus.documents, corpus.vocabulary.words, K=1)
        with pytest.raises(ValueError, match="exceeds"):
            train_lda(corpus.documents, corpus.vocabulary.words, K=50)
        with pytest.raises(ValueError, match="iterations"):
            train_lda(corpus.documents, corpus.vocabulary.words, K=2, iterations=0)


class TestPrevalence:
    def test_sums_to_one(self, planted_model):
        _, _, model = planted_model
        prev = topic_prevalence(model)
        assert abs(sum(prev) - 1.0) <= 1e-6

    def test_planted_split_recovered(self):
        corpus, _ = planted_two_topic_corpus(n_docs=200, share_a=0.6, rng_seed=7)
        model = train_lda(corpus.documents, corpus.vocabulary.words, K=2, iterations=100, rng_seed=3)
        prev = sorted(topic_prevalence(model), reverse=True)
        assert prev[0] == pytest.approx(0.6, abs=0.05)
        assert prev[1] == pytest.approx(0.4, abs=0.05)

    def test_all_tokens_one_topic(self):
        model = TopicModel(
            K=2,
            alpha=1.0,
            beta=0.01,
            doc_ids=["d"],
            surfaces=["rent", "land"],
            topic_word_counts=np.array([[3, 2], [0, 0]], dtype=np.int64),
            doc_topic_counts=np.array([[5, 0]], dtype=np.int64),
            topic_totals=np.array([5, 0], dtype=np.int64),
            doc_lengths=np.array([5], dtype=np.int64),
            iterations_run=1,
            rng_seed=0,
        )
        assert topic_prevalence(model) == [1.0, 0.0]


class TestTopWords:
    def test_clamped_to_vocabulary(self, planted_model):
        _, _, model = planted_model
        assert len(top_words(model, 0, n=500)) == len(model.surfaces)

    def test_default_length_twenty_on_big_vocabulary(self, planted_model):
        _, _, model = planted_model
        assert len(top_words(model, 0)) == 20  # 20-word vocabulary in this fixture

    def test_probabilities_non_increasing(self, planted_model):
        _, _, model = planted_model
        for k in range(model.K):
            probs = [p for _, p in top_words(model, k)]
            assert all(a >= b for a, b in zip(probs, probs[1:]))

    def test_tie_broken_by_ascending_surface(self):
        model = TopicModel(
            K=2,
            alpha=1.0,
            beta=0.01,
            doc_ids=["d"],
            surfaces=["zed", "ant", "mid"],
            topic_word_counts=np.array([[2, 2, 1], [0, 0, 0]], dtype=np.int64),
            doc_topic_counts=np.array([[5, 0]], dtype=np.int64),
            topic_totals=np.array([5, 0], dtype=np.int64),
            doc_lengths=np.array([5], dtype=np.int64),
            iterations_run=1,
            rng_seed=0,
        )
        assert [w for w, _ in top_words(model, 0, 3)] == ["ant", "zed", "mid"]

    def test_bad_topic_id(self, planted_model):
        _, _, model = planted_model
        with pytest.raises(ValueError):
            top_words(model, 99)


class TestAssignNames:
    def test_names_attach_without_touching_counts(self, planted_model):
        _, _, model = planted_model
        before = model.topic_word_counts.copy()
        summaries = assign_names(model, {0: "Property negotiation"})
        assert summaries[0].name == "Property negotiation"
        assert summaries[1].name == "topic-1"
        assert np.array_equal(model.topic_word_counts, before)

    def test_empty_name_map_auto_names(self, planted_model):
        _, _, model = planted_model
        summaries = assign_names(model, {})
        assert [s.name for s in summaries] == ["topic-0", "topic-1"]

    def test_renaming_idempotent_and_order_free(self, planted_model):
        _, _, model = planted_model
        a = assign_names(model, {0: "x", 1: "y"})
        b = assign_names(model, {1: "y", 0: "x"})
        assert [(s.topic_id, s.name) for s in a] == [(s.topic_id, s.name) for s in b]
        again = assign_names(model, {0: "x", 1: "y"})
        assert [(s.topic_id, s.name) for s in again] == [(s.topic_id, s.name) for s in a]

    def test_unknown_id_rejected_by_name(self, planted_model):
        _, _, model = planted_model
        with pytest.raises(ValueError, match=r"\[7\]"):
            assign_names(model, {7: "ghost"})


class TestReportFormat:
    def test_block_shape_and_prevalence_sum(self, planted_model):
        _, _, model = planted_model
        summaries = assign_names(model, {0: "Property negotiation"})
        text = render_topic_report(summaries)
        lines = text.splitlines()
        # K blocks of (header + 20 word rows)
        assert len(lines) == model.K * 21
        headers = [lines[i * 21] for i in range(model.K)]
        prevalences = [float(h.split("\t")[2]) for h in headers]
        assert abs(sum(prevalences) - 1.0) <= 1e-6
        assert headers[0].split("\t")[1] == "Property negotiation"
        for i in range(model.K):
            for line in lines[i * 21 + 1 : (i + 1) * 21]:
                surface, prob = line.split("\t")
                assert float(prob) > 0

    def test_byte_identical_reports_for_same_seed(self):
        corpus, _ = planted_two_topic_corpus(n_docs=60, rng_seed=5)
        reports = []
        for _ in range(2):
            model = train_lda(corpus.documents, corpus.vocabulary.words, K=2, iterations=60, rng_seed=21)
            reports.append(render_topic_report(assign_names(model, {})).encode())
        assert reports[0] == reports[1]


class TestPersistence:
    def test_model_round_trip(self, planted_model, tmp_path):
        _, _, model = planted_model
        save_model(model, tmp_path / "m.json")
        loaded = load_model(tmp_path / "m.json")
        assert loaded.K == model.K
        assert np.array_equal(loaded.topic_word_counts, model.topic_word_counts)
        assert np.array_equal(loaded.doc_topic_counts, model.doc_topic_counts)
        assert render_topic_report(assign_names(loaded, {})) == render_topic_report(assign_names(model, {}))

    def test_name_map_round_trip(self, tmp_path):
        names = {0: "Property negotiation", 3: "Rental history"}
        write_name_map(tmp_path / "names.tsv", names)
        assert read_name_map(tmp_path / "names.tsv") == names
