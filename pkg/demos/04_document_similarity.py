"""
Comparing two documents
=======================

Every sentence pair of the two documents is scored by the sentence-level
aligner. The document-level aligner then runs over the sentences, with exact
sentence equality as the match condition and the sentence scores as the
similarity that offsets its penalties. Averaging the sentence matrix, or
taking the root mean square of each sentence's best match, are the two
order-free alternatives.
"""

import numpy as np

from simdoc.embedding import TopicSimilarityMatrix
from simdoc.scoring import (
    SimDocConfig,
    TopicSequenceDoc,
    document_similarity,
    document_similarity_mean,
    document_similarity_rmsd,
    explain,
)

# six topics: 0-1 and 2-3 are related pairs
values = np.full((6, 6), 0.05)
values[0, 1] = values[1, 0] = 0.8
values[2, 3] = values[3, 2] = 0.7
np.fill_diagonal(values, 1.0)
topics = TopicSimilarityMatrix(values, top_k=10)
config = SimDocConfig()

story = TopicSequenceDoc(((0, 2, 4), (1, 3), (5, 5, 0), (2, 4)))
paraphrase = TopicSequenceDoc(((1, 2, 4), (1, 3), (5, 5, 1), (3, 4)))
shuffled = TopicSequenceDoc(((2, 4), (5, 5, 0), (1, 3), (0, 2, 4)))

print(f"{'pair':<22}{'alignment':>10}{'rmsd':>8}{'mean':>8}")
for name, other in [("self", story), ("paraphrase", paraphrase), ("sentences shuffled", shuffled)]:
    print(f"{name:<22}{document_similarity(story, other, config, topics):>10.3f}"
          f"{document_similarity_rmsd(story, other, config, topics):>8.3f}"
          f"{document_similarity_mean(story, other, config, topics):>8.3f}")

# the self score has a closed form: 2 M / (N + 1) for N distinct sentences
print("closed form:", 2 * config.document_params.match_gain / (len(story) + 1))

detail = explain(story, paraphrase, config, topics)
print(np.round(np.array(detail["sentence_matrix"]), 2))
