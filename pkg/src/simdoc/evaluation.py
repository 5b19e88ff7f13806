"""Triplet accuracy, cluster retrieval and ablation harnesses."""

from __future__ import annotations

import json
import logging
import math
import time
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .baselines import (
    CorpusStats,
    bag_of_topics,
    bag_of_words,
    bm25_symmetric,
    jaccard,
    tfidf_cosine,
)
from .embedding import TopicSimilarityMatrix, WordVectorStore
from .errors import DataError, FormatError
from .lda import TopicWordIndex
from .scoring import (
    SimDocConfig,
    TopicSequenceDoc,
    align_documents,
    rms_best_match,
    sentence_similarity_matrix,
    to_topic_sequence_doc,
    wordvec_sentence_matrix,
)
from .text import PipelineConfig, PreprocessedDoc, preprocess

log = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1
VARIANTS = (
    "simdoc", "mean", "rmsd", "wordvec", "jaccard-bow", "jaccard-bot",
    "bm25-bow", "bm25-bot", "tfidf", "tfidf-bot",
)
BASELINE_VARIANTS = ("jaccard-bow", "jaccard-bot", "bm25-bow", "bm25-bot", "tfidf", "tfidf-bot")

Scorer = Callable[[Hashable, Hashable], float]


@dataclass(frozen=True)
class Triplet:
    """(d1, d2, d3) with (d1, d2) the more similar pair."""

    d1: str
    d2: str
    d3: str
    triplet_id: str | None = None

    def __post_init__(self):
        if len({self.d1, self.d2, self.d3}) != 3:
            raise DataError(f"triplet {self.label}: document ids must be distinct")

    @property
    def label(self) -> str:
        return self.triplet_id or f"({self.d1}, {self.d2}, {self.d3})"


class TripletError(DataError):
    def __init__(self, triplet: Triplet, message: str):
        super().__init__(f"triplet {triplet.label}: {message}")
        self.triplet = triplet


@dataclass
class EvalReport:
    accuracy: float | None = None
    margins: list[float] = field(default_factory=list)
    correct: list[bool] = field(default_factory=list)
    retrieval: dict | None = None
    variant: str | None = None
    extra: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    @property
    def num_triplets(self) -> int:
        return len(self.margins)

    def to_dict(self, include_timing: bool = False) -> dict:
        """Stable-schema dict. Timing is left out unless asked for, since it varies run to run."""
        out = {"schema_version": REPORT_SCHEMA_VERSION, "variant": self.variant}
        if self.accuracy is not None:
            out["accuracy"] = self.accuracy
            out["num_triplets"] = self.num_triplets
            out["margins"] = self.margins
            out["correct"] = self.correct
        if self.retrieval is not None:
            out["retrieval"] = self.retrieval
        if self.extra:
            out.update(self.extra)
        if include_timing:
            out["timing"] = self.timing
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2) + "\n"

    def summary_lines(self) -> list[str]:
        lines = []
        if self.accuracy is not None:
            mean_margin = float(np.mean(self.margins)) if self.margins else 0.0
            lines.append(f"{'variant':<14}{'triplets':>10}{'accuracy':>10}{'mean margin':>13}")
            lines.append(f"{str(self.variant):<14}{self.num_triplets:>10}"
                         f"{self.accuracy:>10.4f}{mean_margin:>13.4f}")
        if self.retrieval is not None:
            r = self.retrieval
            lines.append(f"{'cluster':<16}{'precision':>10}{'recall':>10}{'f-score':>10}{'rejection':>11}")
            for label, m in r["per_cluster"].items():
                lines.append(f"{label:<16}{m['precision']:>10.4f}{m['recall']:>10.4f}"
                             f"{m['f_score']:>10.4f}{m['rejection']:>11.4f}")
            lines.append(f"{'MEAN':<16}{r['map']:>10.4f}{r['mar']:>10.4f}"
                         f"{r['maf']:>10.4f}{r['ma_rejection']:>11.4f}")
        return lines


def _map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def eval_triplets(triplets: Sequence[Triplet], scorer: Scorer,
                  known_ids: Iterable[Hashable] | None = None, jobs: int = 1,
                  variant: str | None = None) -> EvalReport:
    """A triplet is correct iff sim(d2, d1) > sim(d2, d3); ties are wrong."""
    if not triplets:
        raise DataError("triplet dataset is empty")
    if known_ids is not None:
        known = set(known_ids)
        for t in triplets:
            missing = [d for d in (t.d1, t.d2, t.d3) if d not in known]
            if missing:
                raise TripletError(t, f"unknown document id(s) {missing}")

    def score(t: Triplet):
        try:
            return scorer(t.d2, t.d1), scorer(t.d2, t.d3)
        except KeyError as exc:
            raise TripletError(t, f"unknown document id {exc}") from None
        except Exception as exc:
            raise TripletError(t, f"scorer failed: {exc!r}") from exc

    start = time.perf_counter()
    pairs = _map(score, list(triplets), jobs)
    margins = [float(a - b) for a, b in pairs]
    correct = [bool(a > b) for a, b in pairs]
    elapsed = time.perf_counter() - start
    return EvalReport(
        accuracy=sum(correct) / len(correct),
        margins=margins,
        correct=correct,
        variant=variant,
        timing={"seconds": elapsed, "per_triplet": elapsed / len(triplets)},
    )


def eval_clustering(labels: Mapping[Hashable, Hashable], scorer: Scorer, jobs: int = 1,
                    variant: str | None = None) -> EvalReport:
    """Top-(n-1) retrieval for every document of every cluster of size n.

    Ranking is by descending similarity, ties by ascending document id. Since
    retrieved and target sets have the same size, precision equals recall.
    Rejection is the fraction of out-of-cluster documents left unretrieved.
    """
    ids = sorted(labels)
    members: dict = defaultdict(list)
    for doc_id in ids:
        members[labels[doc_id]].append(doc_id)
    for label, docs in members.items():
        if len(docs) < 2:
            log.warning("cluster %r has a single member; skipped", label)

    queries = [d for d in ids if len(members[labels[d]]) >= 2]
    if not queries:
        raise DataError("no cluster with at least two members")

    def retrieve(query):
        others = [d for d in ids if d != query]
        sims = [scorer(query, d) for d in others]
        ranked = sorted(zip(others, sims), key=lambda p: (-p[1], str(p[0])))
        n_target = len(members[labels[query]]) - 1
        retrieved = {d for d, _ in ranked[:n_target]}
        hits = sum(1 for d in retrieved if labels[d] == labels[query])
        outside = len(others) - n_target
        false_pos = n_target - hits
        precision = hits / n_target
        recall = hits / n_target
        f_score = 0.0 if hits == 0 else 2 * precision * recall / (precision + recall)
        rejection = 1.0 if outside == 0 else (outside - false_pos) / outside
        return query, {"precision": precision, "recall": recall, "f_score": f_score,
                       "rejection": rejection}

    start = time.perf_counter()
    results = dict(_map(retrieve, queries, jobs))
    per_cluster = {}
    for label in sorted(members, key=str):
        docs = [d for d in members[label] if d in results]
        if not docs:
            continue
        per_cluster[str(label)] = {
            k: float(np.mean([results[d][k] for d in docs]))
            for k in ("precision", "recall", "f_score", "rejection")
        }
    def mean_of(key):
        return float(np.mean([m[key] for m in per_cluster.values()]))
    retrieval = {
        "per_cluster": per_cluster,
        "map": mean_of("precision"),
        "mar": mean_of("recall"),
        "maf": mean_of("f_score"),
        "ma_rejection": mean_of("rejection"),
    }
    return EvalReport(retrieval=retrieval, variant=variant,
                      timing={"seconds": time.perf_counter() - start})


@dataclass
class PreparedCorpus:
    """Documents in every representation the scorers need, keyed by id."""

    docs: dict[str, PreprocessedDoc]
    topic_docs: dict[str, TopicSequenceDoc]

    @classmethod
    def prepare(cls, texts: Mapping[str, str], index: TopicWordIndex,
                pipeline: PipelineConfig | None = None) -> "PreparedCorpus":
        pipeline = pipeline or PipelineConfig()
        docs = {doc_id: preprocess(text, doc_id, pipeline) for doc_id, text in texts.items()}
        topic_docs = {doc_id: to_topic_sequence_doc(doc, index) for doc_id, doc in docs.items()}
        return cls(docs, topic_docs)

    def __contains__(self, doc_id):
        return doc_id in self.docs

    def ids(self) -> list[str]:
        return list(self.docs)


class SimDocScorer:
    """Pairwise scorer over a prepared corpus, caching sentence matrices per pair.

    ``aggregate`` selects how the sentence matrix becomes a document score:
    ``"align"`` (the document-level alignment), ``"mean"`` or ``"rmsd"``.
    """

    def __init__(self, corpus: PreparedCorpus, config: SimDocConfig,
                 topic_matrix: TopicSimilarityMatrix, aggregate: str = "align",
                 cache: dict | None = None):
        if aggregate not in ("align", "mean", "rmsd"):
            raise ValueError(f"unknown aggregate {aggregate!r}")
        self.corpus = corpus
        self.config = config
        self.topic_matrix = topic_matrix
        self.aggregate = aggregate
        self._cache = {} if cache is None else cache

    def sentence_matrix(self, a, b) -> np.ndarray:
        key = (self.config.sentence_params, self.config.alignment_mode, a, b)
        matrix = self._cache.get(key)
        if matrix is None:
            matrix = sentence_similarity_matrix(self.corpus.topic_docs[a],
                                                self.corpus.topic_docs[b],
                                                self.config, self.topic_matrix)
            self._cache[key] = matrix
        return matrix

    def __call__(self, a, b) -> float:
        doc_a, doc_b = self.corpus.topic_docs[a], self.corpus.topic_docs[b]
        if doc_a.is_empty or doc_b.is_empty:
            return 0.0
        matrix = self.sentence_matrix(a, b)
        if self.aggregate == "mean":
            return float(np.mean(matrix))
        if self.aggregate == "rmsd":
            return rms_best_match(matrix)
        return align_documents(doc_a.segments, doc_b.segments, matrix, self.config)


def make_scorer(variant: str, corpus: PreparedCorpus, config: SimDocConfig | None = None,
                topic_matrix: TopicSimilarityMatrix | None = None,
                store: WordVectorStore | None = None) -> Scorer:
    """Build the pairwise scorer named by ``variant`` (see ``VARIANTS``)."""
    config = config or SimDocConfig()
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; valid variants: {', '.join(VARIANTS)}")
    if variant in ("simdoc", "mean", "rmsd"):
        if topic_matrix is None:
            raise ValueError(f"variant {variant!r} needs a topic similarity matrix")
        aggregate = {"simdoc": "align", "mean": "mean", "rmsd": "rmsd"}[variant]
        return SimDocScorer(corpus, config, topic_matrix, aggregate)
    if variant == "wordvec":
        if store is None:
            raise ValueError("variant 'wordvec' needs word vectors")

        def wordvec(a, b):
            doc_a, doc_b = corpus.docs[a], corpus.docs[b]
            if not doc_a.sentences or not doc_b.sentences:
                return 0.0
            matrix = wordvec_sentence_matrix(doc_a, doc_b, store, config)
            return align_documents(doc_a.sentences, doc_b.sentences, matrix, config)
        return wordvec

    if variant.endswith("-bot"):
        bags = {d: bag_of_topics(doc) for d, doc in corpus.topic_docs.items()}
    else:
        bags = {d: bag_of_words(doc) for d, doc in corpus.docs.items()}
    if variant.startswith("jaccard"):
        return lambda a, b: jaccard(bags[a], bags[b])
    stats = CorpusStats.from_bags(bags.values())
    if variant.startswith("bm25"):
        return lambda a, b: bm25_symmetric(bags[a], bags[b], stats)
    return lambda a, b: tfidf_cosine(bags[a], bags[b], stats)


def run_ablation_suite(triplets: Sequence[Triplet], corpus: PreparedCorpus,
                       config: SimDocConfig, topic_matrix: TopicSimilarityMatrix,
                       store: WordVectorStore | None = None,
                       alternative_matrices: Mapping[str, TopicSimilarityMatrix] | None = None,
                       jobs: int = 1) -> dict:
    """Triplet accuracy of every document-level aggregator and model variant.

    ``alternative_matrices`` maps a label (typically an embedding file name)
    to a topic similarity table built from other word vectors.
    """
    scorers: dict[str, Scorer] = {
        "alignment": make_scorer("simdoc", corpus, config, topic_matrix),
        "rmsd": make_scorer("rmsd", corpus, config, topic_matrix),
        "mean": make_scorer("mean", corpus, config, topic_matrix),
    }
    if store is not None:
        scorers["wordvec"] = make_scorer("wordvec", corpus, config, store=store)
    for label, matrix in (alternative_matrices or {}).items():
        scorers[f"alignment[{label}]"] = make_scorer("simdoc", corpus, config, matrix)
    known = corpus.ids()
    variants = {}
    for name, scorer in scorers.items():
        report = eval_triplets(triplets, scorer, known, jobs, variant=name)
        variants[name] = {"accuracy": report.accuracy,
                          "mean_margin": float(np.mean(report.margins))}
    return {"schema_version": REPORT_SCHEMA_VERSION, "num_triplets": len(triplets),
            "variants": variants}


def split_triplets(triplets: Sequence[Triplet], train_fraction: float = 0.05):
    """Leading ``train_fraction`` of the triplets for tuning, the rest for testing."""
    if not 0.0 <= train_fraction <= 1.0:
        raise ValueError("train_fraction must lie in [0, 1]")
    n_train = int(math.ceil(len(triplets) * train_fraction))
    return list(triplets[:n_train]), list(triplets[n_train:])


def read_triplets(path: str | Path) -> list[Triplet]:
    triplets = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                triplets.append(Triplet(str(rec["d1"]), str(rec["d2"]), str(rec["d3"]),
                                        rec.get("id")))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise FormatError(f"{path}:{lineno}: bad triplet record ({exc!r})") from None
    return triplets


def write_triplets(triplets: Iterable[Triplet], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in triplets:
            rec = {"d1": t.d1, "d2": t.d2, "d3": t.d3}
            if t.triplet_id is not None:
                rec["id"] = t.triplet_id
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_clusters(path: str | Path) -> tuple[dict[str, str], dict[str, str]]:
    """Parse ``{id, label, text}`` lines into (texts, labels)."""
    texts, labels = {}, {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                doc_id = str(rec["id"])
                texts[doc_id] = rec["text"]
                labels[doc_id] = str(rec["label"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise FormatError(f"{path}:{lineno}: bad cluster record ({exc!r})") from None
    return texts, labels


def topic_purity(index: TopicWordIndex, partition: Iterable[Iterable[str]]) -> float:
    """Fraction of planted words whose topic matches their group's majority topic.

    Each planted group is credited with its most common topic; groups may not
    share a topic (a second group landing on an already-claimed topic counts
    all its words as misassigned).
    """
    groups = [list(g) for g in partition]
    total = sum(len(g) for g in groups)
    if total == 0:
        return 0.0
    claimed: set[int] = set()
    correct = 0
    ranked = []
    for g in groups:
        topics = [index.topic_of(w) for w in g]
        counts: dict[int, int] = {}
        for t in topics:
            if t is not None:
                counts[t] = counts.get(t, 0) + 1
        ranked.append(counts)
    for counts in sorted(ranked, key=lambda c: -max(c.values(), default=0)):
        if not counts:
            continue
        topic, hits = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))
        if topic in claimed:
            continue
        claimed.add(topic)
        correct += hits
    return correct / total
