"""
Triplet benchmark on planted data
=================================

A triplet (D1, D2, D3) is answered correctly when sim(D2, D1) > sim(D2, D3).
Easy triplets draw D3 from a different template. Hard triplets give D2 and
D3 the very same words in a different order, so only an order-aware scorer
can tell D1 (same order, one off-topic sentence) from D3.
"""

from simdoc.embedding import WordVectorStore, build_topic_similarity_matrix
from simdoc.evaluation import VARIANTS, PreparedCorpus, eval_triplets, make_scorer
from simdoc.lda import LdaConfig, build_topic_word_index, train_lda
from simdoc.scoring import SimDocConfig
from simdoc.synthetic import PlantedConfig, generate_planted_triplets
from simdoc.text import PipelineConfig, preprocess

for mode in ("easy", "hard"):
    config = PlantedConfig(mode=mode, num_triplets=100)
    data = generate_planted_triplets(config, seed=1)
    training = PipelineConfig(voice_normalization_enabled=False)
    docs = [preprocess(r["text"], r["id"], training) for r in data.records]
    model = train_lda(docs, LdaConfig(num_topics=config.num_topics, gibbs_sweeps=200))
    store = WordVectorStore.from_dict(data.word_vectors)
    topics = build_topic_similarity_matrix(model, store, 10)
    corpus = PreparedCorpus.prepare(data.texts, build_topic_word_index(model))

    print(f"\n{mode} triplets")
    for variant in VARIANTS:
        scorer = make_scorer(variant, corpus, SimDocConfig(), topics, store)
        report = eval_triplets(data.triplets, scorer, corpus.ids(), variant=variant)
        print(f"  {variant:<12}{report.accuracy:>7.3f}")
