"""
Tuning the ten alignment parameters
===================================

Triplet accuracy is a step function of the parameters, so the tuner uses a
coordinate pattern search: try a step up and down along each parameter,
keep any improvement, shrink the steps when nothing helps, and restart from
a fresh point when the steps become tiny.
"""

from simdoc.embedding import WordVectorStore, build_topic_similarity_matrix
from simdoc.evaluation import PreparedCorpus, SimDocScorer, eval_triplets, split_triplets
from simdoc.lda import LdaConfig, build_topic_word_index, train_lda
from simdoc.synthetic import PlantedConfig, generate_planted_triplets
from simdoc.text import PipelineConfig, preprocess
from simdoc.tuner import PARAM_NAMES, TuneConfig, initial_params, to_config, tune

config = PlantedConfig(mode="hard", num_triplets=100)
data = generate_planted_triplets(config, seed=1)
training = PipelineConfig(voice_normalization_enabled=False)
docs = [preprocess(r["text"], r["id"], training) for r in data.records]
model = train_lda(docs, LdaConfig(num_topics=config.num_topics, gibbs_sweeps=200))
topics = build_topic_similarity_matrix(model, WordVectorStore.from_dict(data.word_vectors), 10)
corpus = PreparedCorpus.prepare(data.texts, build_topic_word_index(model))

train, test = split_triplets(data.triplets, 0.3)
cache = {}  # sentence matrices only depend on the sentence-level parameters
factory = lambda cfg: SimDocScorer(corpus, cfg, topics, cache=cache)
result = tune(initial_params(), train, factory, TuneConfig(max_evaluations=300))

print(f"train accuracy {result.initial_accuracy:.3f} -> {result.accuracy:.3f} "
      f"after {result.evaluations} evaluations")
for name, start, end in zip(PARAM_NAMES, initial_params(), result.params):
    print(f"  {name:<26}{start:>7.2f}{end:>7.2f}")
for label, vector in (("initial", initial_params()), ("tuned", result.params)):
    acc = eval_triplets(test, factory(to_config(vector))).accuracy
    print(f"test accuracy with {label} parameters: {acc:.3f}")
