"""
Cluster retrieval
=================

Each document of a cluster of size n retrieves its n - 1 nearest neighbours.
Precision, recall and F-score are averaged per cluster and then across
clusters; rejection is the share of out-of-cluster documents left out.
"""

from simdoc.embedding import WordVectorStore, build_topic_similarity_matrix
from simdoc.evaluation import PreparedCorpus, eval_clustering, make_scorer
from simdoc.lda import LdaConfig, build_topic_word_index, train_lda
from simdoc.scoring import SimDocConfig
from simdoc.synthetic import generate_planted_clusters
from simdoc.text import preprocess

records, labels, vocabularies, vectors = generate_planted_clusters(2, 10, seed=3)
docs = [preprocess(r["text"], r["id"]) for r in records]
model = train_lda(docs, LdaConfig(num_topics=12, gibbs_sweeps=150))
topics = build_topic_similarity_matrix(model, WordVectorStore.from_dict(vectors), 10)
corpus = PreparedCorpus.prepare({r["id"]: r["text"] for r in records},
                                build_topic_word_index(model))

for variant in ("simdoc", "jaccard-bow"):
    report = eval_clustering(labels, make_scorer(variant, corpus, SimDocConfig(), topics),
                             variant=variant)
    print(f"\n{variant}")
    for line in report.summary_lines():
        print(line)
