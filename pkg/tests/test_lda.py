import numpy as np
import pytest

from simdoc.errors import ConfigurationError, FormatError
from simdoc.evaluation import topic_purity
from simdoc.lda import (
    LdaConfig,
    LdaModel,
    TopicWordIndex,
    assign_topic,
    build_topic_word_index,
    infer_topic_distribution,
    load_index,
    load_model,
    save_index,
    save_model,
    top_words,
    train_lda,
)
from simdoc.synthetic import planted_two_topic_corpus
from simdoc.text import PreprocessedDoc


@pytest.fixture(scope="module")
def planted():
    docs, vocabularies = planted_two_topic_corpus(num_docs=200, vocab_size=50, doc_length=50,
                                                  seed=0)
    model = train_lda(docs, LdaConfig(num_topics=2, gibbs_sweeps=100, rng_seed=0))
    return docs, vocabularies, model


def doc(*sentences, source_id=None):
    return PreprocessedDoc(tuple(tuple(s.split()) for s in sentences), source_id)


class TestConfig:
    @pytest.mark.parametrize("kwargs", [
        {"num_topics": 0}, {"alpha": 0.0}, {"beta": -1.0}, {"gibbs_sweeps": 0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            LdaConfig(**kwargs)

    def test_defaults_and_production_preset(self):
        c = LdaConfig()
        assert (c.num_topics, c.alpha, c.beta, c.gibbs_sweeps) == (100, 0.1, 0.001, 200)
        assert LdaConfig.production().gibbs_sweeps == 25_000


class TestTraining:
    def test_empty_corpus(self):
        with pytest.raises(ConfigurationError):
            train_lda([])
        with pytest.raises(ConfigurationError):
            train_lda([doc()])

    def test_single_topic(self):
        d = doc("apple apple pear", "plum")
        model = train_lda([d], LdaConfig(num_topics=1, gibbs_sweeps=5))
        counts = dict(zip(model.words, model.topic_word_counts[0]))
        assert counts == {"apple": 2, "pear": 1, "plum": 1}
        beta, V = model.config.beta, model.vocab_size
        expected = (np.array([2, 1, 1]) + beta) / (4 + V * beta)
        np.testing.assert_allclose(model.phi()[0], expected, atol=1e-12)
        index = build_topic_word_index(model)
        assert {index.topic_of(w) for w in model.words} == {0}

    def test_count_conservation_every_sweep(self, planted):
        docs = planted[0][:50]
        total = sum(d.num_tokens for d in docs)
        seen = []

        def check(sweep, nkw, nk):
            seen.append(sweep)
            assert nk.sum() == total
            np.testing.assert_array_equal(nkw.sum(axis=1), nk)
            assert (nkw >= 0).all()

        train_lda(docs, LdaConfig(num_topics=3, gibbs_sweeps=20), check)
        assert seen == list(range(20))

    def test_phi_rows_are_distributions(self, planted):
        phi = planted[2].phi()
        assert (phi >= 0).all()
        np.testing.assert_allclose(phi.sum(axis=1), 1.0, atol=1e-9)

    def test_deterministic(self, planted):
        docs = planted[0][:40]
        a = train_lda(docs, LdaConfig(num_topics=3, gibbs_sweeps=15, rng_seed=5))
        b = train_lda(docs, LdaConfig(num_topics=3, gibbs_sweeps=15, rng_seed=5))
        np.testing.assert_array_equal(a.topic_word_counts, b.topic_word_counts)
        assert a == b
        c = train_lda(docs, LdaConfig(num_topics=3, gibbs_sweeps=15, rng_seed=6))
        assert not np.array_equal(a.topic_word_counts, c.topic_word_counts)

    def test_planted_purity(self, planted):
        _, vocabularies, model = planted
        assert topic_purity(build_topic_word_index(model), vocabularies) >= 0.9


class TestInference:
    def test_empty_document_is_uniform_and_flagged(self, planted):
        theta = infer_topic_distribution(doc(), planted[2])
        assert theta.zero_tokens
        np.testing.assert_allclose(theta.probabilities, [0.5, 0.5])

    def test_oov_only_document(self, planted):
        assert infer_topic_distribution(doc("zzzz qqqq"), planted[2]).zero_tokens

    def test_planted_document_concentrates(self, planted):
        _, vocabularies, model = planted
        index = build_topic_word_index(model)
        topic = index.topic_of(vocabularies[0][0])
        theta = infer_topic_distribution(doc(" ".join(vocabularies[0][:30])), model)
        assert theta.probabilities[topic] > 0.9
        assert theta.probabilities.sum() == pytest.approx(1.0, abs=1e-9)
        assert theta.num_tokens == 30


class TestIndex:
    def test_index_holds_argmax(self, planted):
        model = planted[2]
        index = build_topic_word_index(model)
        phi = model.phi()
        for w, i in model.vocabulary.items():
            topic, prob = index.entries[w]
            assert phi[topic, i] == pytest.approx(phi[:, i].max(), abs=0)
            assert prob == phi[topic, i]

    def test_ties_go_to_lowest_topic(self):
        model = LdaModel({"a": 0, "b": 1}, np.array([[1, 1], [1, 1]]), LdaConfig(num_topics=2))
        index = build_topic_word_index(model)
        assert index.topic_of("a") == 0 and index.topic_of("b") == 0

    def test_assign_topic_oov(self, planted):
        index = build_topic_word_index(planted[2])
        w = planted[1][1][0]
        assert assign_topic(w, index) == assign_topic(w, index) == index.topic_of(w)
        assert assign_topic("not-a-word", index) is None

    def test_index_round_trip(self, planted, tmp_path):
        index = build_topic_word_index(planted[2])
        save_index(index, tmp_path / "i.json")
        assert load_index(tmp_path / "i.json") == index

    def test_index_format_checked(self):
        with pytest.raises(FormatError):
            TopicWordIndex.from_dict({"format": "other"})


class TestTopWords:
    def test_planted_topic_top_word(self, planted):
        _, vocabularies, model = planted
        index = build_topic_word_index(model)
        topic = index.topic_of(vocabularies[1][0])
        assert top_words(model, topic, 1)[0] in vocabularies[1]

    def test_sorted_by_probability_then_word(self, planted):
        model = planted[2]
        words = top_words(model, 0, 20)
        phi = model.phi()[0]
        keys = [(-phi[model.vocabulary[w]], w) for w in words]
        assert keys == sorted(keys)

    def test_k_larger_than_vocabulary(self):
        model = LdaModel({"a": 0, "b": 1}, np.array([[3, 1]]), LdaConfig(num_topics=1))
        assert top_words(model, 0, 10) == ["a", "b"]

    def test_out_of_range(self, planted):
        with pytest.raises(IndexError):
            top_words(planted[2], 2, 3)
        with pytest.raises(ValueError):
            top_words(planted[2], 0, 0)


class TestPersistence:
    def test_round_trip(self, planted, tmp_path):
        model = planted[2]
        save_model(model, tmp_path / "m.json")
        loaded = load_model(tmp_path / "m.json")
        assert loaded == model
        assert loaded.fingerprint() == model.fingerprint()

    def test_truncated_file(self, planted, tmp_path):
        path = tmp_path / "m.json"
        save_model(planted[2], path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises(FormatError):
            load_model(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_model(tmp_path / "nope.json")

    def test_wrong_shape(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text('{"format": "simdoc-lda", "version": 1, "config": {"num_topics": 2},'
                        ' "vocabulary": ["a"], "topic_word_counts": [[1]]}')
        with pytest.raises(FormatError, match="shape"):
            load_model(path)
