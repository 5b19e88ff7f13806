import json

import numpy as np
import pytest

from pipeline import planted_pipeline
from simdoc.errors import DataError, FormatError
from simdoc.evaluation import (
    VARIANTS,
    EvalReport,
    PreparedCorpus,
    Triplet,
    TripletError,
    eval_clustering,
    eval_triplets,
    make_scorer,
    read_clusters,
    read_triplets,
    run_ablation_suite,
    split_triplets,
    topic_purity,
    write_triplets,
)
from simdoc.embedding import WordVectorStore, build_topic_similarity_matrix
from simdoc.lda import LdaConfig, TopicWordIndex, build_topic_word_index, train_lda
from simdoc.scoring import SimDocConfig
from simdoc.synthetic import generate_planted_clusters
from simdoc.text import preprocess, write_corpus

TRIPLETS = [Triplet(f"a{i}", f"b{i}", f"c{i}") for i in range(10)]


def oracle(x, y):
    """Knows the answer: (d1, d2) pairs score 1, anything else 0."""
    return 1.0 if {x[0], y[0]} == {"a", "b"} else 0.0


class TestTripletAccuracy:
    def test_oracle_and_anti_oracle(self):
        assert eval_triplets(TRIPLETS, oracle).accuracy == 1.0
        assert eval_triplets(TRIPLETS, lambda x, y: 1.0 - oracle(x, y)).accuracy == 0.0

    def test_ties_count_as_wrong(self):
        report = eval_triplets(TRIPLETS, lambda x, y: 0.5)
        assert report.accuracy == 0.0
        assert report.margins == [0.0] * 10

    def test_margins_and_query_direction(self):
        calls = []

        def scorer(x, y):
            calls.append((x, y))
            return {"a0": 0.9, "c0": 0.4}[y]

        report = eval_triplets([Triplet("a0", "b0", "c0")], scorer)
        assert calls == [("b0", "a0"), ("b0", "c0")]
        assert report.margins == [pytest.approx(0.5)]
        assert report.correct == [True]

    def test_unknown_id_names_triplet(self):
        with pytest.raises(TripletError, match="t7"):
            eval_triplets([Triplet("a", "b", "zz", "t7")], oracle, known_ids={"a", "b"})

    def test_scorer_key_error_becomes_triplet_error(self):
        with pytest.raises(TripletError):
            eval_triplets([Triplet("a", "b", "c")], lambda x, y: {}[x])

    def test_empty_and_repeated_ids(self):
        with pytest.raises(DataError):
            eval_triplets([], oracle)
        with pytest.raises(DataError):
            Triplet("a", "a", "b")

    def test_jobs_do_not_change_report(self):
        rng = np.random.default_rng(0)
        values = {(x, y): float(rng.random()) for t in TRIPLETS
                  for x in (t.d1, t.d2, t.d3) for y in (t.d1, t.d2, t.d3)}
        scorer = lambda x, y: values[(x, y)]
        one = eval_triplets(TRIPLETS, scorer, jobs=1).to_json()
        four = eval_triplets(TRIPLETS, scorer, jobs=4).to_json()
        assert one == four

    def test_report_schema_leaves_timing_out(self):
        report = eval_triplets(TRIPLETS, oracle, variant="oracle")
        data = json.loads(report.to_json())
        assert data["schema_version"] == 1 and "timing" not in data
        assert "timing" in report.to_dict(include_timing=True)
        assert data["num_triplets"] == 10


def cluster_labels(n_clusters, size):
    return {f"{c}-{j:02d}": f"L{c}" for c in range(n_clusters) for j in range(size)}


class TestClustering:
    def test_oracle_scores_one(self):
        labels = cluster_labels(3, 4)
        report = eval_clustering(labels, lambda x, y: float(labels[x] == labels[y]))
        r = report.retrieval
        assert r["map"] == r["mar"] == r["maf"] == r["ma_rejection"] == 1.0

    def test_random_scorer_expected_precision(self):
        # 2 clusters of 10: each query draws 9 of 19 others, 9 of them relevant
        labels = cluster_labels(2, 10)
        ids = sorted(labels)
        precisions = []
        for seed in range(40):
            rng = np.random.default_rng(seed)
            table = {(a, b): float(rng.random()) for a in ids for b in ids}
            precisions.append(eval_clustering(labels, lambda x, y: table[(x, y)]).retrieval["map"])
        assert np.mean(precisions) == pytest.approx(9 / 19, abs=0.04)

    def test_rejection_counts_unretrieved_outsiders(self):
        labels = {"a1": "A", "a2": "A", "b1": "B", "b2": "B"}
        # every query retrieves an outsider first
        scorer = lambda x, y: float(labels[x] != labels[y])
        r = eval_clustering(labels, scorer).retrieval
        assert r["map"] == 0.0 and r["maf"] == 0.0
        assert r["ma_rejection"] == pytest.approx(0.5)

    def test_singletons_skipped(self):
        labels = {"a1": "A", "a2": "A", "b1": "B"}
        r = eval_clustering(labels, lambda x, y: float(labels[x] == labels[y])).retrieval
        assert list(r["per_cluster"]) == ["A"]
        with pytest.raises(DataError):
            eval_clustering({"a": "A", "b": "B"}, oracle)

    def test_simdoc_on_planted_clusters(self):
        records, labels, vocabularies, vectors = generate_planted_clusters(2, 10, seed=3)
        docs = [preprocess(r["text"], r["id"]) for r in records]
        model = train_lda(docs, LdaConfig(num_topics=12, gibbs_sweeps=100))
        index = build_topic_word_index(model)
        matrix = build_topic_similarity_matrix(model, WordVectorStore.from_dict(vectors), 10)
        corpus = PreparedCorpus.prepare({r["id"]: r["text"] for r in records}, index)
        scorer = make_scorer("simdoc", corpus, SimDocConfig(), matrix)
        assert eval_clustering(labels, scorer).retrieval["map"] >= 0.9


@pytest.fixture(scope="module")
def hard():
    return planted_pipeline("hard", 30)


class TestScorersAndAblation:
    def test_every_variant_builds(self, hard):
        for variant in VARIANTS:
            scorer = make_scorer(variant, hard.corpus, SimDocConfig(), hard.topic_matrix,
                                 hard.store)
            t = hard.data.triplets[0]
            assert np.isfinite(scorer(t.d2, t.d1))

    def test_unknown_variant_lists_valid_ones(self, hard):
        with pytest.raises(ValueError, match="jaccard-bot"):
            make_scorer("nope", hard.corpus)

    def test_simdoc_needs_matrix(self, hard):
        with pytest.raises(ValueError):
            make_scorer("simdoc", hard.corpus)

    def test_ablation_lists_each_variant_once(self, hard):
        out = run_ablation_suite(hard.data.triplets, hard.corpus, SimDocConfig(),
                                 hard.topic_matrix, hard.store,
                                 alternative_matrices={"other": hard.topic_matrix})
        assert list(out["variants"]) == ["alignment", "rmsd", "mean", "wordvec",
                                         "alignment[other]"]
        assert out["variants"]["alignment"] == out["variants"]["alignment[other]"]
        assert out["num_triplets"] == 30

    def test_bag_of_topics_cannot_separate_hard_triplets(self, hard):
        scorer = make_scorer("jaccard-bot", hard.corpus)
        assert eval_triplets(hard.data.triplets, scorer).accuracy <= 0.6


class TestSplitAndIO:
    def test_split(self):
        train, test = split_triplets(TRIPLETS, 0.25)
        assert len(train) == 3 and train + test == TRIPLETS
        assert split_triplets(TRIPLETS, 0.0) == ([], TRIPLETS)
        with pytest.raises(ValueError):
            split_triplets(TRIPLETS, 1.5)

    def test_triplet_round_trip(self, tmp_path):
        triplets = [Triplet("a", "b", "c", "x"), Triplet("d", "e", "f")]
        write_triplets(triplets, tmp_path / "t.jsonl")
        assert read_triplets(tmp_path / "t.jsonl") == triplets

    def test_bad_triplet_line(self, tmp_path):
        path = tmp_path / "t.jsonl"
        path.write_text('{"d1": "a", "d2": "b", "d3": "c"}\n{"d1": "a"}\n')
        with pytest.raises(FormatError, match=":2:"):
            read_triplets(path)

    def test_clusters_file(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_corpus([{"id": "x", "label": "A", "text": "one"},
                      {"id": "y", "label": "B", "text": "two"}], path)
        texts, labels = read_clusters(path)
        assert texts == {"x": "one", "y": "two"} and labels == {"x": "A", "y": "B"}
        path.write_text('{"id": "x", "text": "t"}\n')
        with pytest.raises(FormatError):
            read_clusters(path)

    def test_summary_lines(self):
        lines = eval_triplets(TRIPLETS, oracle, variant="oracle").summary_lines()
        assert "accuracy" in lines[0] and "1.0000" in lines[1]
        assert isinstance(EvalReport().summary_lines(), list)


class TestPurity:
    def test_perfect_and_swapped_labels(self):
        index = TopicWordIndex({"a": (1, 0.5), "b": (1, 0.5), "c": (0, 0.5), "d": (0, 0.5)}, 2)
        assert topic_purity(index, [["a", "b"], ["c", "d"]]) == 1.0

    def test_groups_cannot_share_a_topic(self):
        index = TopicWordIndex({"a": (0, 0.5), "b": (0, 0.5), "c": (0, 0.5), "d": (1, 0.5)}, 2)
        # the second group's top topic (0, lowest id on a tie) is already claimed
        assert topic_purity(index, [["a", "b"], ["c", "d"]]) == pytest.approx(0.5)

    def test_empty_partition(self):
        assert topic_purity(TopicWordIndex({}, 1), []) == 0.0
