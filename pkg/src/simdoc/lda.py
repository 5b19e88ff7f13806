"""LDA topic model trained by collapsed Gibbs sampling.

Besides training, this module covers fold-in inference for unseen documents
and the inverted word -> most-probable-topic index used to turn documents
into topic sequences.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from numba import njit

from .errors import ConfigurationError, FormatError
from .text import PreprocessedDoc

MODEL_FORMAT = "simdoc-lda"
MODEL_FORMAT_VERSION = 1
INDEX_FORMAT = "simdoc-topic-index"


@dataclass(frozen=True)
class LdaConfig:
    num_topics: int = 100
    alpha: float = 0.1
    beta: float = 0.001
    gibbs_sweeps: int = 200
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_topics < 1:
            raise ConfigurationError(f"num_topics must be >= 1, got {self.num_topics}")
        if not self.alpha > 0 or not self.beta > 0:
            raise ConfigurationError(
                f"alpha and beta must be positive, got alpha={self.alpha}, beta={self.beta}")
        if self.gibbs_sweeps < 1:
            raise ConfigurationError(f"gibbs_sweeps must be >= 1, got {self.gibbs_sweeps}")

    @classmethod
    def production(cls, rng_seed: int = 0) -> "LdaConfig":
        """Full-scale settings: 100 topics, 25,000 sweeps."""
        return cls(num_topics=100, alpha=0.1, beta=0.001, gibbs_sweeps=25_000, rng_seed=rng_seed)


@dataclass(eq=False)
class LdaModel:
    vocabulary: dict[str, int]
    topic_word_counts: np.ndarray
    config: LdaConfig
    topic_totals: np.ndarray = field(default=None)

    def __post_init__(self):
        self.topic_word_counts = np.asarray(self.topic_word_counts, dtype=np.int64)
        if self.topic_totals is None:
            self.topic_totals = self.topic_word_counts.sum(axis=1)
        self.topic_totals = np.asarray(self.topic_totals, dtype=np.int64)
        self.words = [None] * len(self.vocabulary)
        for word, idx in self.vocabulary.items():
            self.words[idx] = word

    @property
    def num_topics(self) -> int:
        return self.topic_word_counts.shape[0]

    @property
    def vocab_size(self) -> int:
        return self.topic_word_counts.shape[1]

    def phi(self) -> np.ndarray:
        """Smoothed topic-word distributions, shape (K, V); rows sum to 1."""
        beta = self.config.beta
        return (self.topic_word_counts + beta) / (
            self.topic_totals[:, None] + self.vocab_size * beta)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(json.dumps(asdict(self.config), sort_keys=True).encode())
        h.update("\n".join(self.words).encode("utf-8"))
        h.update(self.topic_word_counts.tobytes())
        return h.hexdigest()

    def __eq__(self, other):
        if not isinstance(other, LdaModel):
            return NotImplemented
        return (self.config == other.config
                and self.vocabulary == other.vocabulary
                and np.array_equal(self.topic_word_counts, other.topic_word_counts)
                and np.array_equal(self.topic_totals, other.topic_totals))


@dataclass(frozen=True)
class DocTopicVector:
    probabilities: np.ndarray
    num_tokens: int

    @property
    def zero_tokens(self) -> bool:
        """True when the document had no in-vocabulary tokens (uniform output)."""
        return self.num_tokens == 0


@dataclass(frozen=True)
class TopicWordIndex:
    """Maps every vocabulary word to its most probable topic."""

    entries: dict[str, tuple[int, float]]
    num_topics: int

    def __contains__(self, word):
        return word in self.entries

    def __len__(self):
        return len(self.entries)

    def topic_of(self, word: str) -> int | None:
        entry = self.entries.get(word)
        return None if entry is None else entry[0]

    def to_dict(self) -> dict:
        return {
            "format": INDEX_FORMAT,
            "version": MODEL_FORMAT_VERSION,
            "num_topics": self.num_topics,
            "entries": {w: [t, p] for w, (t, p) in sorted(self.entries.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TopicWordIndex":
        if data.get("format") != INDEX_FORMAT:
            raise FormatError(f"not a topic index file (format={data.get('format')!r})")
        entries = {w: (int(t), float(p)) for w, (t, p) in data["entries"].items()}
        return cls(entries, int(data["num_topics"]))


@njit(cache=True)
def _gibbs_sweep(words, docs, z, ndk, nkw, nk, alpha, beta, vbeta, uniforms):
    K = nk.shape[0]
    cdf = np.empty(K)
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        k = z[i]
        ndk[d, k] -= 1
        nkw[k, w] -= 1
        nk[k] -= 1
        total = 0.0
        for t in range(K):
            total += (ndk[d, t] + alpha) * (nkw[t, w] + beta) / (nk[t] + vbeta)
            cdf[t] = total
        u = uniforms[i] * total
        k = 0
        while k < K - 1 and cdf[k] <= u:
            k += 1
        z[i] = k
        ndk[d, k] += 1
        nkw[k, w] += 1
        nk[k] += 1


@njit(cache=True)
def _fold_in_sweep(words, z, nd, phi_t, alpha, uniforms):
    # phi_t is (V, K): frozen topic-word probabilities
    K = nd.shape[0]
    cdf = np.empty(K)
    for i in range(words.shape[0]):
        w = words[i]
        nd[z[i]] -= 1
        total = 0.0
        for t in range(K):
            total += (nd[t] + alpha) * phi_t[w, t]
            cdf[t] = total
        u = uniforms[i] * total
        k = 0
        while k < K - 1 and cdf[k] <= u:
            k += 1
        z[i] = k
        nd[k] += 1


def _encode_corpus(corpus: Sequence[PreprocessedDoc]):
    vocabulary: dict[str, int] = {}
    words, docs = [], []
    for d, doc in enumerate(corpus):
        for token in doc.tokens():
            words.append(vocabulary.setdefault(token, len(vocabulary)))
            docs.append(d)
    return vocabulary, np.asarray(words, dtype=np.int64), np.asarray(docs, dtype=np.int64)


SweepCallback = Callable[[int, np.ndarray, np.ndarray], None]


def train_lda(corpus: Sequence[PreprocessedDoc], config: LdaConfig | None = None,
              callback: SweepCallback | None = None) -> LdaModel:
    """Fit an LDA model with collapsed Gibbs sampling.

    Topics are initialized uniformly at random from ``config.rng_seed``; each
    sweep resamples every token once, in corpus order. ``callback(sweep,
    topic_word_counts, topic_totals)`` runs after each sweep.
    """
    config = config or LdaConfig()
    if len(corpus) == 0:
        raise ConfigurationError("cannot train on an empty corpus")
    vocabulary, words, docs = _encode_corpus(corpus)
    if words.size == 0:
        raise ConfigurationError("corpus contains no tokens")

    K, V = config.num_topics, len(vocabulary)
    rng = np.random.default_rng(config.rng_seed)
    z = rng.integers(K, size=words.size).astype(np.int64)
    ndk = np.zeros((len(corpus), K), dtype=np.int64)
    nkw = np.zeros((K, V), dtype=np.int64)
    np.add.at(ndk, (docs, z), 1)
    np.add.at(nkw, (z, words), 1)
    nk = nkw.sum(axis=1)

    for sweep in range(config.gibbs_sweeps):
        uniforms = rng.random(words.size)
        _gibbs_sweep(words, docs, z, ndk, nkw, nk, config.alpha, config.beta,
                     V * config.beta, uniforms)
        if callback is not None:
            callback(sweep, nkw, nk)
    return LdaModel(vocabulary, nkw.copy(), config, nk.copy())


def infer_topic_distribution(doc: PreprocessedDoc, model: LdaModel, sweeps: int = 20,
                             seed: int | None = None) -> DocTopicVector:
    """Fold-in Gibbs estimate of a new document's topic proportions.

    Model counts stay frozen; out-of-vocabulary tokens are ignored. A document
    with no usable tokens gets the uniform vector.
    """
    K = model.num_topics
    alpha = model.config.alpha
    ids = [model.vocabulary[t] for t in doc.tokens() if t in model.vocabulary]
    if not ids:
        return DocTopicVector(np.full(K, 1.0 / K), 0)
    words = np.asarray(ids, dtype=np.int64)
    rng = np.random.default_rng(model.config.rng_seed if seed is None else seed)
    phi_t = np.ascontiguousarray(model.phi().T)
    z = rng.integers(K, size=words.size).astype(np.int64)
    nd = np.bincount(z, minlength=K).astype(np.int64)
    for _ in range(sweeps):
        _fold_in_sweep(words, z, nd, phi_t, alpha, rng.random(words.size))
    theta = (nd + alpha) / (words.size + K * alpha)
    return DocTopicVector(theta / theta.sum(), int(words.size))


def build_topic_word_index(model: LdaModel) -> TopicWordIndex:
    phi = model.phi()
    best = np.argmax(phi, axis=0)  # first maximum -> lowest topic id on ties
    best_p = phi[best, np.arange(model.vocab_size)]
    entries = {word: (int(best[i]), float(best_p[i])) for i, word in enumerate(model.words)}
    return TopicWordIndex(entries, model.num_topics)


def assign_topic(word: str, index: TopicWordIndex) -> int | None:
    return index.topic_of(word)


def top_words(model: LdaModel, topic: int, k: int) -> list[str]:
    """The k most probable words of a topic; ties resolved alphabetically."""
    if not 0 <= topic < model.num_topics:
        raise IndexError(f"topic {topic} out of range [0, {model.num_topics})")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    row = model.phi()[topic]
    order = sorted(range(model.vocab_size), key=lambda i: (-row[i], model.words[i]))
    return [model.words[i] for i in order[:k]]


def model_to_dict(model: LdaModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "config": asdict(model.config),
        "vocabulary": list(model.words),
        "topic_word_counts": model.topic_word_counts.tolist(),
    }


def model_from_dict(data: dict) -> LdaModel:
    if not isinstance(data, dict) or data.get("format") != MODEL_FORMAT:
        raise FormatError("not a simdoc LDA model file")
    if data.get("version") != MODEL_FORMAT_VERSION:
        raise FormatError(f"unsupported model format version {data.get('version')!r}")
    try:
        config = LdaConfig(**data["config"])
        words = data["vocabulary"]
        counts = np.asarray(data["topic_word_counts"], dtype=np.int64)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed model file: {exc}") from None
    if counts.shape != (config.num_topics, len(words)):
        raise FormatError(
            f"count matrix shape {counts.shape} does not match "
            f"{config.num_topics} topics x {len(words)} words")
    return LdaModel({w: i for i, w in enumerate(words)}, counts, config)


def save_model(model: LdaModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, separators=(",", ":"))


def load_model(path: str | Path) -> LdaModel:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: corrupt model file ({exc})") from None
    return model_from_dict(data)


def save_index(index: TopicWordIndex, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(index.to_dict(), fh, separators=(",", ":"))


def load_index(path: str | Path) -> TopicWordIndex:
    try:
        with open(path, encoding="utf-8") as fh:
            return TopicWordIndex.from_dict(json.load(fh))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: corrupt index file ({exc})") from None
