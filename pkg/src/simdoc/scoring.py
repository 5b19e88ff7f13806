"""Sentence- and document-level similarity over topic-sequence documents."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Hashable, Sequence

import numpy as np

from .alignment import (
    ALIGNMENT_MODES,
    CORNER,
    AlignmentParams,
    align_tables,
    normalized_alignment,
    segment_similarity_matrix,
    triangular,
)
from .embedding import DEFAULT_TOP_K, TopicSimilarityMatrix, WordVectorStore
from .lda import TopicWordIndex
from .text import PreprocessedDoc

Segment = tuple[int, ...]

# Sentence similarities are small (identical sentences of length L score
# 2/(L+1)), so document-level gaps must be small too or every document edit
# drives the table to its zero floor.
DEFAULT_SENTENCE_PARAMS = AlignmentParams(1.0, -0.5, -0.5, -1.0, 1.0)
DEFAULT_DOCUMENT_PARAMS = AlignmentParams(1.0, -0.05, -0.05, -0.1, 1.0)


@dataclass(frozen=True)
class TopicSequenceDoc:
    segments: tuple[Segment, ...]
    source_id: Hashable = None

    @property
    def is_empty(self) -> bool:
        return not self.segments

    def __len__(self):
        return len(self.segments)


@dataclass(frozen=True)
class SimDocConfig:
    """Both alignment levels plus topic-encoding settings (ten tunable numbers)."""

    sentence_params: AlignmentParams = DEFAULT_SENTENCE_PARAMS
    document_params: AlignmentParams = DEFAULT_DOCUMENT_PARAMS
    top_k: int = DEFAULT_TOP_K
    alignment_mode: str = CORNER

    def __post_init__(self):
        if self.alignment_mode not in ALIGNMENT_MODES:
            raise ValueError(f"alignment_mode must be one of {ALIGNMENT_MODES}")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")

    def to_dict(self) -> dict:
        return {
            "sentence": self.sentence_params.to_dict(),
            "document": self.document_params.to_dict(),
            "top_k": self.top_k,
            "alignment_mode": self.alignment_mode,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimDocConfig":
        base = cls()
        return cls(
            AlignmentParams(**data["sentence"]) if "sentence" in data else base.sentence_params,
            AlignmentParams(**data["document"]) if "document" in data else base.document_params,
            int(data.get("top_k", base.top_k)),
            data.get("alignment_mode", base.alignment_mode),
        )

    def with_params(self, sentence: AlignmentParams, document: AlignmentParams) -> "SimDocConfig":
        return replace(self, sentence_params=sentence, document_params=document)


def to_topic_sequence_doc(doc: PreprocessedDoc, index: TopicWordIndex) -> TopicSequenceDoc:
    """Replace every token by its indexed topic; drop OOV tokens and emptied sentences."""
    segments = []
    for sentence in doc.sentences:
        topics = tuple(t for t in (index.topic_of(w) for w in sentence) if t is not None)
        if topics:
            segments.append(topics)
    return TopicSequenceDoc(tuple(segments), doc.source_id)


def _clamped_sim(matrix: TopicSimilarityMatrix):
    values = matrix.values
    return lambda x, y: max(0.0, float(values[x, y]))


def sentence_similarity(seg_a: Sequence[int], seg_b: Sequence[int], config: SimDocConfig,
                        topic_matrix: TopicSimilarityMatrix) -> float:
    if not seg_a or not seg_b:
        return 0.0
    return normalized_alignment(seg_a, seg_b, config.sentence_params,
                                _clamped_sim(topic_matrix), config.alignment_mode)


def sentence_similarity_matrix(doc_a: TopicSequenceDoc, doc_b: TopicSequenceDoc,
                               config: SimDocConfig,
                               topic_matrix: TopicSimilarityMatrix) -> np.ndarray:
    """All-pairs sentence similarity, shape (len(doc_a), len(doc_b))."""
    return segment_similarity_matrix(doc_a.segments, doc_b.segments, topic_matrix.clamped(),
                                     config.sentence_params, config.alignment_mode)


def _segment_equality(segs_a, segs_b) -> np.ndarray:
    return np.array([[a == b for b in segs_b] for a in segs_a], dtype=np.bool_).reshape(
        len(segs_a), len(segs_b))


def align_documents(segs_a: Sequence, segs_b: Sequence, sentence_matrix: np.ndarray,
                    config: SimDocConfig) -> float:
    """Document-level recurrence over precomputed sentence similarities, normalized."""
    if len(segs_a) == 0 or len(segs_b) == 0:
        return 0.0
    raw = align_tables(_segment_equality(segs_a, segs_b), sentence_matrix,
                       config.document_params, config.alignment_mode)
    return raw / triangular(max(len(segs_a), len(segs_b)))


def document_similarity(doc_a: TopicSequenceDoc, doc_b: TopicSequenceDoc, config: SimDocConfig,
                        topic_matrix: TopicSimilarityMatrix,
                        sentence_matrix: np.ndarray | None = None) -> float:
    """Two-level alignment score; 0 when either document is empty.

    Two sentences count as a document-level match only when their topic
    sequences are identical; everything else goes through the compensated
    edit branches with the sentence similarity as token similarity.
    """
    if doc_a.is_empty or doc_b.is_empty:
        return 0.0
    if sentence_matrix is None:
        sentence_matrix = sentence_similarity_matrix(doc_a, doc_b, config, topic_matrix)
    return align_documents(doc_a.segments, doc_b.segments, sentence_matrix, config)


def document_similarity_mean(doc_a: TopicSequenceDoc, doc_b: TopicSequenceDoc,
                             config: SimDocConfig, topic_matrix: TopicSimilarityMatrix,
                             sentence_matrix: np.ndarray | None = None) -> float:
    if doc_a.is_empty or doc_b.is_empty:
        return 0.0
    if sentence_matrix is None:
        sentence_matrix = sentence_similarity_matrix(doc_a, doc_b, config, topic_matrix)
    return float(np.mean(sentence_matrix))


def rms_best_match(sentence_matrix: np.ndarray) -> float:
    """Root mean square of best-match similarities, taken from the shorter side.

    When both sides have the same number of sentences the rows are used.
    """
    if sentence_matrix.size == 0:
        return 0.0
    na, nb = sentence_matrix.shape
    best = sentence_matrix.max(axis=1) if na <= nb else sentence_matrix.max(axis=0)
    return float(np.sqrt(np.mean(best ** 2)))


def document_similarity_rmsd(doc_a: TopicSequenceDoc, doc_b: TopicSequenceDoc,
                             config: SimDocConfig, topic_matrix: TopicSimilarityMatrix,
                             sentence_matrix: np.ndarray | None = None) -> float:
    if doc_a.is_empty or doc_b.is_empty:
        return 0.0
    if sentence_matrix is None:
        sentence_matrix = sentence_similarity_matrix(doc_a, doc_b, config, topic_matrix)
    return rms_best_match(sentence_matrix)


def _word_sim_table(words: list[str], store: WordVectorStore) -> np.ndarray:
    vecs = np.zeros((len(words), store.dim))
    for i, w in enumerate(words):
        v = store.get(w)
        if v is not None:
            vecs[i] = v
    norms = np.linalg.norm(vecs, axis=1)
    unit = vecs / np.where(norms > 0, norms, 1.0)[:, None]
    return np.clip(unit @ unit.T, 0.0, 1.0)


def wordvec_sentence_matrix(doc_a: PreprocessedDoc, doc_b: PreprocessedDoc,
                            store: WordVectorStore, config: SimDocConfig) -> np.ndarray:
    words = sorted(set(doc_a.tokens()) | set(doc_b.tokens()))
    ids = {w: i for i, w in enumerate(words)}
    segs_a = [tuple(ids[w] for w in s) for s in doc_a.sentences]
    segs_b = [tuple(ids[w] for w in s) for s in doc_b.sentences]
    return segment_similarity_matrix(segs_a, segs_b, _word_sim_table(words, store),
                                     config.sentence_params, config.alignment_mode)


def document_similarity_wordvec(doc_a: PreprocessedDoc, doc_b: PreprocessedDoc,
                                store: WordVectorStore, config: SimDocConfig) -> float:
    """The two-level alignment run directly on words instead of topics.

    Equality is string equality; token similarity is the clamped cosine of
    the word vectors (0 for words without a vector).
    """
    if not doc_a.sentences or not doc_b.sentences:
        return 0.0
    matrix = wordvec_sentence_matrix(doc_a, doc_b, store, config)
    return align_documents(doc_a.sentences, doc_b.sentences, matrix, config)


def explain(doc_a: TopicSequenceDoc, doc_b: TopicSequenceDoc, config: SimDocConfig,
            topic_matrix: TopicSimilarityMatrix) -> dict:
    matrix = sentence_similarity_matrix(doc_a, doc_b, config, topic_matrix)
    return {
        "similarity": document_similarity(doc_a, doc_b, config, topic_matrix, matrix),
        "segments_a": [list(s) for s in doc_a.segments],
        "segments_b": [list(s) for s in doc_b.segments],
        "sentence_matrix": matrix.tolist(),
    }
