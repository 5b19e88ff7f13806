"""Planted corpora whose similarity structure is known by construction.

Every planted topic owns a private vocabulary of made-up words. A document
is realized from a *template*: a list of sentences, each an ordered list of
topics, with one word drawn from the topic's vocabulary per position.
Topics are grouped into families, and the generated word vectors place
words of the same family close together so that topic-to-topic cosine is
informative.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .evaluation import Triplet
from .text import PreprocessedDoc, load_stopwords

FILLERS = ("the", "of", "and", "with", "in", "a")
_CONSONANTS = "bklmnprtvz"
_VOWELS = "aeiou"
EASY = "easy"
HARD = "hard"


@dataclass(frozen=True)
class PlantedConfig:
    num_topics: int = 12
    words_per_topic: int = 10
    num_families: int = 4
    num_triplets: int = 200
    min_sentences: int = 4
    max_sentences: int = 7
    min_sentence_length: int = 4
    max_sentence_length: int = 8
    topics_per_template: int = 5
    substitution_rate: float = 0.15
    swap_rate: float = 0.15
    mode: str = EASY
    d3_topic_overlap: int = 3
    local_swap_rate: float = 0.2
    shuffle_fraction: float = 0.5
    digressions: int = 1
    filler_rate: float = 0.3
    embedding_dim: int = 24
    topic_spread: float = 0.6
    word_spread: float = 0.3

    def __post_init__(self):
        if self.mode not in (EASY, HARD):
            raise ValueError(f"mode must be 'easy' or 'hard', got {self.mode!r}")
        if self.topics_per_template > self.num_topics:
            raise ValueError("topics_per_template exceeds num_topics")
        if not 0 <= self.d3_topic_overlap <= self.topics_per_template:
            raise ValueError("d3_topic_overlap must lie in [0, topics_per_template]")


@dataclass
class PlantedData:
    records: list[dict]
    triplets: list[Triplet]
    vocabularies: list[list[str]]
    word_vectors: dict[str, np.ndarray]
    config: PlantedConfig

    @property
    def texts(self) -> dict[str, str]:
        return {r["id"]: r["text"] for r in self.records}

    def write(self, directory: str | Path) -> dict[str, Path]:
        """Write corpus.jsonl, triplets.jsonl and embeddings.txt into ``directory``."""
        from .evaluation import write_triplets
        from .text import write_corpus

        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = {
            "corpus": directory / "corpus.jsonl",
            "triplets": directory / "triplets.jsonl",
            "embeddings": directory / "embeddings.txt",
        }
        write_corpus(self.records, paths["corpus"])
        write_triplets(self.triplets, paths["triplets"])
        write_word_vectors(self.word_vectors, paths["embeddings"])
        return paths


def write_word_vectors(vectors: dict[str, np.ndarray], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for word, vec in vectors.items():
            fh.write(word + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")


def make_vocabularies(num_topics: int, words_per_topic: int,
                      rng: np.random.Generator) -> list[list[str]]:
    """Disjoint vocabularies of pronounceable, stem-stable nonsense words."""
    stop = load_stopwords()
    syllables = [c + v for c in _CONSONANTS for v in _VOWELS]
    need = num_topics * words_per_topic
    seen: set[str] = set()
    words: list[str] = []
    while len(words) < need:
        picks = rng.integers(len(syllables), size=3)
        word = "".join(syllables[i] for i in picks)
        if word in seen or word in stop:
            continue
        seen.add(word)
        words.append(word)
    return [words[t * words_per_topic:(t + 1) * words_per_topic] for t in range(num_topics)]


def make_word_vectors(vocabularies: list[list[str]], config: PlantedConfig,
                      rng: np.random.Generator) -> dict[str, np.ndarray]:
    dim = config.embedding_dim
    families = rng.normal(size=(config.num_families, dim))
    vectors = {}
    for t, vocab in enumerate(vocabularies):
        centre = families[t % config.num_families] + config.topic_spread * rng.normal(size=dim)
        for word in vocab:
            vectors[word] = centre + config.word_spread * rng.normal(size=dim)
    return vectors


def _template(topics: np.ndarray, config: PlantedConfig, rng) -> list[list[int]]:
    n = int(rng.integers(config.min_sentences, config.max_sentences + 1))
    sentences = []
    for _ in range(n):
        length = int(rng.integers(config.min_sentence_length, config.max_sentence_length + 1))
        sentences.append([int(t) for t in rng.choice(topics, size=length)])
    return sentences


def _perturb(template: list[list[int]], config: PlantedConfig, rng) -> list[list[int]]:
    sentences = []
    for sentence in template:
        noisy = [int(rng.integers(config.num_topics)) if rng.random() < config.substitution_rate
                 else t for t in sentence]
        sentences.append(noisy)
    for i in range(len(sentences) - 1):
        if rng.random() < config.swap_rate:
            sentences[i], sentences[i + 1] = sentences[i + 1], sentences[i]
    return sentences


def _realize(sentences: list[list[int]], vocabularies, rng) -> list[list[str]]:
    return [[vocabularies[t][int(rng.integers(len(vocabularies[t])))] for t in s]
            for s in sentences]


def _render(word_sentences: list[list[str]], config: PlantedConfig, rng) -> str:
    out = []
    for words in word_sentences:
        tokens = []
        for w in words:
            if rng.random() < config.filler_rate:
                tokens.append(FILLERS[int(rng.integers(len(FILLERS)))])
            tokens.append(w)
        tokens[0] = tokens[0].capitalize()
        out.append(" ".join(tokens) + ".")
    return " ".join(out)


def _local_reorder(word_sentences: list[list[str]], config: PlantedConfig, rng):
    """Same words, nearly the same order: occasional adjacent transpositions."""
    out = [list(s) for s in word_sentences]
    for s in out:
        if len(s) > 1 and rng.random() < config.local_swap_rate:
            i = int(rng.integers(len(s) - 1))
            s[i], s[i + 1] = s[i + 1], s[i]
    for i in range(len(out) - 1):
        if rng.random() < config.swap_rate:
            out[i], out[i + 1] = out[i + 1], out[i]
    return out


def _global_reorder(word_sentences: list[list[str]], config: PlantedConfig, rng):
    """Same words, different order: sentences permuted, some sentences scrambled."""
    while True:
        order = rng.permutation(len(word_sentences))
        shuffled = [list(word_sentences[i]) for i in order]
        for s in shuffled:
            if rng.random() < config.shuffle_fraction:
                rng.shuffle(s)
        if shuffled != word_sentences:
            return shuffled


def _digress(word_sentences: list[list[str]], pool, vocabularies, config: PlantedConfig, rng):
    """Replace ``config.digressions`` sentences by sentences on the topics in ``pool``."""
    out = [list(s) for s in word_sentences]
    positions = rng.choice(len(out), size=min(config.digressions, len(out)), replace=False)
    for i in positions:
        topics = rng.choice(pool, size=len(out[i]))
        out[i] = _realize([[int(t) for t in topics]], vocabularies, rng)[0]
    return out


def _other_topics(topics: np.ndarray, config: PlantedConfig, rng) -> np.ndarray:
    keep = rng.choice(topics, size=config.d3_topic_overlap, replace=False)
    rest = np.setdiff1d(np.arange(config.num_topics), topics)
    fresh = rng.choice(rest, size=config.topics_per_template - config.d3_topic_overlap,
                       replace=False)
    return np.concatenate([keep, fresh])


def generate_planted_triplets(config: PlantedConfig | None = None, seed: int = 0) -> PlantedData:
    """Planted triplets (D1, D2, D3) where D1 and D2 come from one template.

    Easy mode draws D3 from a fresh template that reuses ``d3_topic_overlap``
    of D2's topics. Hard mode builds D1 and D3 from D2's own words: D1 keeps
    the order up to a few local transpositions and swaps ``digressions``
    sentences for off-topic ones, while D3 permutes the sentences and
    scrambles some of them. D2 and D3 then have identical bags of words and
    of topics.
    """
    config = config or PlantedConfig()
    rng = np.random.default_rng(seed)
    vocabularies = make_vocabularies(config.num_topics, config.words_per_topic, rng)
    vectors = make_word_vectors(vocabularies, config, rng)
    records, triplets = [], []
    all_topics = np.arange(config.num_topics)
    for i in range(config.num_triplets):
        topics = rng.choice(all_topics, size=config.topics_per_template, replace=False)
        template = _template(topics, config, rng)
        d2 = _realize(_perturb(template, config, rng), vocabularies, rng)
        if config.mode == HARD:
            off_topic = np.setdiff1d(all_topics, topics)
            d1 = _digress(_local_reorder(d2, config, rng), off_topic, vocabularies, config, rng)
            d3 = _global_reorder(d2, config, rng)
        else:
            d1 = _realize(_perturb(template, config, rng), vocabularies, rng)
            other = _template(_other_topics(topics, config, rng), config, rng)
            d3 = _realize(_perturb(other, config, rng), vocabularies, rng)
        ids = [f"t{i:05d}-d{k}" for k in (1, 2, 3)]
        for doc_id, words in zip(ids, (d1, d2, d3)):
            records.append({"id": doc_id, "text": _render(words, config, rng)})
        triplets.append(Triplet(*ids, triplet_id=f"t{i:05d}"))
    return PlantedData(records, triplets, vocabularies, vectors, config)


def generate_planted_clusters(num_clusters: int = 2, cluster_size: int = 10,
                              config: PlantedConfig | None = None, seed: int = 0):
    """Cluster dataset: each cluster's documents are noisy copies of one template.

    Cluster templates use disjoint topic subsets. Returns ``(records, labels,
    vocabularies, word_vectors)`` where records carry ``id``, ``label`` and
    ``text``.
    """
    config = config or PlantedConfig()
    if num_clusters * config.topics_per_template > config.num_topics:
        raise ValueError("not enough topics for disjoint cluster templates")
    rng = np.random.default_rng(seed)
    vocabularies = make_vocabularies(config.num_topics, config.words_per_topic, rng)
    vectors = make_word_vectors(vocabularies, config, rng)
    topic_order = rng.permutation(config.num_topics)
    records, labels = [], {}
    for c in range(num_clusters):
        topics = topic_order[c * config.topics_per_template:(c + 1) * config.topics_per_template]
        template = _template(topics, config, rng)
        for j in range(cluster_size):
            doc_id = f"c{c:02d}-{j:03d}"
            words = _realize(_perturb(template, config, rng), vocabularies, rng)
            records.append({"id": doc_id, "label": f"cluster{c}", "text": _render(words, config, rng)})
            labels[doc_id] = f"cluster{c}"
    return records, labels, vocabularies, vectors


def planted_two_topic_corpus(num_docs: int = 200, vocab_size: int = 50, doc_length: int = 50,
                             seed: int = 0) -> tuple[list[PreprocessedDoc], list[list[str]]]:
    """Documents drawn from one of two disjoint vocabularies, alternating."""
    rng = np.random.default_rng(seed)
    vocabularies = make_vocabularies(2, vocab_size, rng)
    docs = []
    for d in range(num_docs):
        vocab = vocabularies[d % 2]
        words = tuple(vocab[i] for i in rng.integers(vocab_size, size=doc_length))
        docs.append(PreprocessedDoc((words,), f"doc{d}"))
    return docs, vocabularies


def config_to_dict(config: PlantedConfig) -> dict:
    return asdict(config)
