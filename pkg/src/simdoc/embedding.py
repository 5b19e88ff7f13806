"""Word vectors, topic encodings and the topic-to-topic cosine table."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError
from .lda import LdaModel, top_words

DEFAULT_TOP_K = 10


@dataclass(eq=False)
class WordVectorStore:
    vectors: np.ndarray
    index: dict[str, int]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.index)

    def __contains__(self, word):
        return word in self.index

    def get(self, word: str) -> np.ndarray | None:
        i = self.index.get(word)
        return None if i is None else self.vectors[i]

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update("\n".join(sorted(self.index, key=self.index.get)).encode("utf-8"))
        h.update(np.ascontiguousarray(self.vectors).tobytes())
        return h.hexdigest()

    @classmethod
    def from_dict(cls, mapping: dict[str, np.ndarray]) -> "WordVectorStore":
        words = list(mapping)
        if not words:
            raise ValueError("empty vector mapping")
        vectors = np.vstack([np.asarray(mapping[w], dtype=np.float64) for w in words])
        return cls(vectors, {w: i for i, w in enumerate(words)})


def load_word_vectors(path: str | Path) -> WordVectorStore:
    """Parse ``word v1 ... vD`` lines (GloVe-style text).

    A leading ``<count> <dim>`` header, as written by word2vec tools, is
    skipped. The first occurrence of a repeated word wins.
    """
    index: dict[str, int] = {}
    rows: list[list[float]] = []
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split(" ")
            parts = [p for p in parts if p]
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            word, values = parts[0], parts[1:]
            if dim is None:
                if not values:
                    raise FormatError(f"{path}:{lineno}: no vector components")
                dim = len(values)
            elif len(values) != dim:
                raise FormatError(
                    f"{path}:{lineno}: expected {dim} components, found {len(values)}")
            if word in index:
                continue
            try:
                rows.append([float(v) for v in values])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-numeric vector component") from None
            index[word] = len(rows) - 1
    if dim is None:
        raise FormatError(f"{path}: no vectors found")
    return WordVectorStore(np.asarray(rows, dtype=np.float64), index)


def encode_words(words, store: WordVectorStore) -> tuple[np.ndarray, bool]:
    """Mean vector of the embeddable words; (zero vector, True) if none are."""
    vecs = [v for v in (store.get(w) for w in words) if v is not None]
    if not vecs:
        return np.zeros(store.dim), True
    return np.mean(vecs, axis=0), False


def encode_topic(model: LdaModel, topic: int, store: WordVectorStore,
                 k: int = DEFAULT_TOP_K) -> tuple[np.ndarray, bool]:
    """Average embedding of the topic's top-k words.

    Returns ``(vector, unembeddable)``; words without a vector are skipped,
    not replaced.
    """
    return encode_words(top_words(model, topic, k), store)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


@dataclass(eq=False)
class TopicSimilarityMatrix:
    values: np.ndarray
    top_k: int
    unembeddable: frozenset[int] = frozenset()

    @property
    def num_topics(self) -> int:
        return self.values.shape[0]

    def clamped(self) -> np.ndarray:
        """Entries clipped to [0, 1], the form used as alignment compensation."""
        return np.clip(self.values, 0.0, 1.0)

    def save(self, path: str | Path, key: str = "") -> None:
        np.savez(path, values=self.values, top_k=self.top_k, key=key,
                 unembeddable=np.array(sorted(self.unembeddable), dtype=np.int64))

    @classmethod
    def load(cls, path: str | Path, key: str | None = None) -> "TopicSimilarityMatrix":
        """Load a cached table; with ``key`` given, a mismatching cache is rejected."""
        with np.load(path) as data:
            if key is not None and str(data["key"]) != key:
                raise FormatError(f"{path}: cache key mismatch")
            return cls(data["values"], int(data["top_k"]),
                       frozenset(int(t) for t in data["unembeddable"]))


def cache_key(model: LdaModel, store: WordVectorStore, k: int) -> str:
    return f"{model.fingerprint()}:{store.fingerprint()}:{k}"


def topic_similarity(t_i: int, t_j: int, matrix: TopicSimilarityMatrix) -> float:
    K = matrix.num_topics
    if not (0 <= t_i < K and 0 <= t_j < K):
        raise IndexError(f"topic pair ({t_i}, {t_j}) out of range [0, {K})")
    return float(matrix.values[t_i, t_j])


def build_topic_similarity_matrix(model: LdaModel, store: WordVectorStore,
                                  k: int = DEFAULT_TOP_K) -> TopicSimilarityMatrix:
    K = model.num_topics
    encoded = np.zeros((K, store.dim))
    flagged = set()
    for t in range(K):
        encoded[t], empty = encode_topic(model, t, store, k)
        if empty:
            flagged.add(t)
    norms = np.linalg.norm(encoded, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = encoded / safe[:, None]
    values = np.clip(unit @ unit.T, -1.0, 1.0)
    values = (values + values.T) / 2
    # unit diagonal only for topics with a usable encoding
    usable = norms > 0
    values[np.diag_indices(K)] = np.where(usable, 1.0, 0.0)
    return TopicSimilarityMatrix(values, k, frozenset(flagged))
