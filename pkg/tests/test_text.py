import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simdoc.errors import FormatError
from simdoc.text import (
    PipelineConfig,
    load_stopwords,
    normalize_voice,
    preprocess,
    read_corpus,
    segment_sentences,
    stem,
    tokenize_and_filter,
    write_corpus,
)

THE_ONLY = PipelineConfig(frozenset({"the"}))


class TestSegmentSentences:
    def test_empty(self):
        assert segment_sentences("") == []
        assert segment_sentences("   \n ") == []

    def test_basic_split(self):
        assert segment_sentences("A b. C d!") == ["A b.", "C d!"]

    def test_abbreviation_guard(self):
        assert segment_sentences("See Fig. 2. Done.") == ["See Fig. 2.", "Done."]
        assert segment_sentences("Use e.g. this one. Then stop.") == [
            "Use e.g. this one.", "Then stop."]

    def test_initial_guard(self):
        assert segment_sentences("J. Smith wrote it. Fine.") == ["J. Smith wrote it.", "Fine."]

    def test_punctuation_runs_and_trailing_text(self):
        assert segment_sentences("Really?! Yes") == ["Really?!", "Yes"]

    def test_no_split_inside_tokens(self):
        assert segment_sentences("Version 3.14 is out.") == ["Version 3.14 is out."]

    @settings(max_examples=200, deadline=None)
    @given(st.text(alphabet="ab .!?\n", max_size=60))
    def test_covers_all_non_whitespace(self, text):
        joined = "".join(segment_sentences(text))
        assert "".join(joined.split()) == "".join(text.split())


class TestStem:
    @pytest.mark.parametrize("word, expected", [
        ("loves", "love"),
        ("played", "play"),
        ("boxes", "box"),
        ("cats", "cat"),
        ("class", "class"),
        ("status", "status"),
        ("analysis", "analysis"),
        ("sing", "sing"),   # stem would be shorter than 3
        ("bed", "bed"),
    ])
    def test_suffixes(self, word, expected):
        assert stem(word) == expected


class TestTokenizeAndFilter:
    def test_stopwords_and_stemming(self):
        assert tokenize_and_filter("The cat loves John", THE_ONLY) == ["cat", "love", "john"]

    def test_without_stemming(self):
        config = PipelineConfig(frozenset({"the"}), stemming_enabled=False)
        assert tokenize_and_filter("The cat loves John", config) == ["cat", "loves", "john"]

    def test_empty(self):
        assert tokenize_and_filter("", THE_ONLY) == []

    def test_length_bound(self):
        config = PipelineConfig(frozenset({"the"}), min_token_length=2)
        assert tokenize_and_filter("a a a", config) == []

    def test_non_letters_split_and_dropped(self):
        config = PipelineConfig(frozenset(), stemming_enabled=False)
        assert tokenize_and_filter("x2 co-op 42 well_known", config) == [
            "co", "op", "well", "known"]

    def test_invalid_min_length(self):
        with pytest.raises(ValueError):
            PipelineConfig(frozenset(), min_token_length=0)


class TestNormalizeVoice:
    def test_passive_rewritten(self):
        assert normalize_voice("the ball was thrown by john") == "john thrown the ball"

    def test_keeps_trailing_punctuation(self):
        assert normalize_voice("The ball was thrown by John.") == "John thrown The ball."

    @pytest.mark.parametrize("sentence", ["john throws the ball", "the ball was thrown", ""])
    def test_unchanged(self, sentence):
        assert normalize_voice(sentence) == sentence

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.sampled_from(["the", "ball", "was", "is", "by", "john", "seen", "."]),
                    max_size=10))
    def test_idempotent(self, words):
        s = " ".join(words)
        once = normalize_voice(s)
        assert normalize_voice(once) == once


class TestPreprocess:
    def test_empty(self):
        assert preprocess("", "d", THE_ONLY).sentences == ()

    def test_two_sentences(self):
        doc = preprocess("The cat. The dog.", "d", THE_ONLY)
        assert doc.sentences == (("cat",), ("dog",))
        assert doc.source_id == "d"
        assert doc.num_tokens == 2

    def test_stopword_sentence_dropped(self):
        assert preprocess("The the. ", "d", THE_ONLY).sentences == ()

    def test_voice_normalization_reorders_tokens(self):
        text = "The ball was thrown by John."
        on = preprocess(text, "d", PipelineConfig(frozenset({"the", "was", "by"})))
        off = preprocess(text, "d", PipelineConfig(frozenset({"the", "was", "by"}),
                                                   voice_normalization_enabled=False))
        assert on.sentences == (("john", "thrown", "ball"),)
        assert off.sentences == (("ball", "thrown", "john"),)

    @settings(max_examples=100, deadline=None)
    @given(st.text(alphabet="abcde .!?ABC", max_size=80))
    def test_deterministic_and_invariants(self, text):
        config = PipelineConfig()
        doc = preprocess(text, None, config)
        assert doc == preprocess(text, None, config)
        for sentence in doc.sentences:
            assert sentence
            for token in sentence:
                assert token == token.lower()
                assert token not in config.stopwords
                assert len(token) >= config.min_token_length

    def test_token_count_never_increases(self):
        text = "Running dogs were chased by the cats. Boxes of apples!"
        raw = sum(len(s.split()) for s in segment_sentences(text))
        assert preprocess(text).num_tokens <= raw


class TestStopwordsAndCorpus:
    def test_bundled_list(self):
        words = load_stopwords()
        assert 250 <= len(words) <= 350
        assert {"the", "and", "of"} <= words

    def test_override_file(self, tmp_path):
        path = tmp_path / "stop.txt"
        path.write_text("Foo\nbar\n\n", encoding="utf-8")
        assert load_stopwords(path) == frozenset({"foo", "bar"})

    def test_corpus_round_trip(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_corpus([{"id": "a", "text": "x"}, {"id": "b", "text": "y"}], path)
        assert [r["id"] for r in read_corpus(path)] == ["a", "b"]

    def test_bad_line_names_line_number(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(json.dumps({"id": "a", "text": "x"}) + "\n{oops\n", encoding="utf-8")
        with pytest.raises(FormatError, match=":2:"):
            read_corpus(path)

    def test_missing_field(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(json.dumps({"id": "a"}) + "\n", encoding="utf-8")
        with pytest.raises(FormatError, match="'text'"):
            read_corpus(path)
