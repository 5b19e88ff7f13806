"""Order-free reference scorers: Jaccard, Okapi BM25 and TF-IDF cosine.

``tfidf_cosine`` stands in for a Lucene-index comparison; Lucene's own
scoring formula is not reproduced.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .errors import ConfigurationError
from .scoring import TopicSequenceDoc
from .text import PreprocessedDoc

BagOfTokens = Counter


def bag_of_topics(doc: TopicSequenceDoc) -> Counter:
    return Counter(t for seg in doc.segments for t in seg)


def bag_of_words(doc: PreprocessedDoc) -> Counter:
    return Counter(doc.tokens())


@dataclass(frozen=True)
class CorpusStats:
    document_frequency: dict
    num_docs: int
    avg_length: float

    @classmethod
    def from_bags(cls, bags: Iterable[Counter]) -> "CorpusStats":
        df: Counter = Counter()
        n, total = 0, 0
        for bag in bags:
            df.update(bag.keys())
            n += 1
            total += sum(bag.values())
        return cls(dict(df), n, total / n if n else 0.0)


def jaccard(a: Counter, b: Counter) -> float:
    sa = {t for t, c in a.items() if c > 0}
    sb = {t for t, c in b.items() if c > 0}
    if not sa and not sb:
        return 1.0
    return len(sa & sb) / len(sa | sb)


def idf_bm25(term, stats: CorpusStats) -> float:
    df = stats.document_frequency.get(term, 0)
    return math.log((stats.num_docs - df + 0.5) / (df + 0.5) + 1.0)


def bm25(query: Counter, doc: Counter, stats: CorpusStats, k1: float = 1.2,
         b: float = 0.75) -> float:
    """Okapi BM25 of ``doc`` for the distinct terms of ``query``."""
    if stats.num_docs == 0 or stats.avg_length <= 0:
        raise ConfigurationError("BM25 needs non-empty corpus statistics")
    length = sum(doc.values())
    norm = k1 * (1.0 - b + b * length / stats.avg_length)
    score = 0.0
    for term in query:
        tf = doc.get(term, 0)
        if tf:
            score += idf_bm25(term, stats) * tf * (k1 + 1.0) / (tf + norm)
    return score


def bm25_symmetric(a: Counter, b: Counter, stats: CorpusStats, k1: float = 1.2,
                   b_param: float = 0.75) -> float:
    return 0.5 * (bm25(a, b, stats, k1, b_param) + bm25(b, a, stats, k1, b_param))


def _tfidf_weights(bag: Counter, stats: CorpusStats) -> dict:
    n = stats.num_docs
    weights = {}
    for term, tf in bag.items():
        df = stats.document_frequency.get(term, 0)
        idf = math.log((1.0 + n) / (1.0 + df)) + 1.0
        weights[term] = (1.0 + math.log(tf)) * idf
    return weights


def tfidf_cosine(a: Counter, b: Counter, stats: CorpusStats) -> float:
    """Cosine of (1 + ln tf) * smoothed-idf vectors."""
    wa, wb = _tfidf_weights(a, stats), _tfidf_weights(b, stats)
    dot = sum(w * wb[t] for t, w in wa.items() if t in wb)
    na = math.sqrt(sum(w * w for w in wa.values()))
    nb = math.sqrt(sum(w * w for w in wb.values()))
    if na == 0 or nb == 0:
        return 0.0
    return min(1.0, dot / (na * nb))
