"""Document similarity by aligning sentence-segmented topic sequences."""

from .alignment import AlignmentParams, align, normalized_alignment, op_score
from .embedding import (
    TopicSimilarityMatrix,
    WordVectorStore,
    build_topic_similarity_matrix,
    load_word_vectors,
    topic_similarity,
)
from .lda import LdaConfig, LdaModel, build_topic_word_index, load_model, save_model, train_lda
from .scoring import (
    SimDocConfig,
    TopicSequenceDoc,
    document_similarity,
    sentence_similarity,
    to_topic_sequence_doc,
)
from .text import PipelineConfig, PreprocessedDoc, preprocess

__version__ = "0.1.0"

__all__ = [
    "AlignmentParams", "LdaConfig", "LdaModel", "PipelineConfig", "PreprocessedDoc",
    "SimDocConfig", "TopicSequenceDoc", "TopicSimilarityMatrix", "WordVectorStore",
    "align", "build_topic_similarity_matrix", "build_topic_word_index", "document_similarity",
    "load_model", "load_word_vectors", "normalized_alignment", "op_score", "preprocess",
    "save_model", "sentence_similarity", "to_topic_sequence_doc", "topic_similarity",
    "train_lda",
]
