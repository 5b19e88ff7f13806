"""
Topic similarity from word vectors
==================================

Each topic is embedded as the mean vector of its top-k words, and two topics
are compared by the cosine of their embeddings. The full K x K table is
built once and cached on disk, keyed by the model, the vectors and k.
"""

import tempfile
from pathlib import Path

import numpy as np

from simdoc.embedding import (
    TopicSimilarityMatrix,
    WordVectorStore,
    build_topic_similarity_matrix,
    cache_key,
)
from simdoc.lda import LdaConfig, train_lda
from simdoc.synthetic import PlantedConfig, generate_planted_triplets
from simdoc.text import preprocess

# planted topics come in families whose word vectors lie close together
config = PlantedConfig(num_triplets=60)
data = generate_planted_triplets(config, seed=0)
docs = [preprocess(r["text"], r["id"]) for r in data.records]
model = train_lda(docs, LdaConfig(num_topics=config.num_topics, gibbs_sweeps=150))
store = WordVectorStore.from_dict(data.word_vectors)

matrix = build_topic_similarity_matrix(model, store, k=10)
np.set_printoptions(precision=2, suppress=True, linewidth=120)
print(matrix.values)
print("symmetric:", np.allclose(matrix.values, matrix.values.T),
      " unit diagonal:", np.allclose(np.diag(matrix.values), 1.0))

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "topics.npz"
    key = cache_key(model, store, 10)
    matrix.save(path, key)
    again = TopicSimilarityMatrix.load(path, key)
    print("cache round trip equal:", np.array_equal(again.values, matrix.values))
