"""
From raw text to topic sequences
================================

Text is split into sentences, tokenized, stopword-filtered and lightly
stemmed. A collapsed Gibbs LDA model then assigns every vocabulary word its
most probable topic, which turns each sentence into a sequence of topic ids.
"""

from simdoc.lda import LdaConfig, build_topic_word_index, top_words, train_lda
from simdoc.scoring import to_topic_sequence_doc
from simdoc.synthetic import planted_two_topic_corpus
from simdoc.text import PipelineConfig, preprocess, segment_sentences

text = "The ball was thrown by John. Dr. Smith loves dogs! Boxes of apples arrived."
print(segment_sentences(text))
print(preprocess(text).sentences)
# passive sentences are rewritten to active voice before tokenizing
print(preprocess(text, config=PipelineConfig(voice_normalization_enabled=False)).sentences)

# a corpus with two planted topics, each owning a private 50-word vocabulary
docs, vocabularies = planted_two_topic_corpus(num_docs=200, vocab_size=50, doc_length=50)
model = train_lda(docs, LdaConfig(num_topics=2, gibbs_sweeps=100, rng_seed=0))
for topic in range(model.num_topics):
    print(f"topic {topic}:", " ".join(top_words(model, topic, 8)))

index = build_topic_word_index(model)
planted = {w: g for g, vocab in enumerate(vocabularies) for w in vocab}
agree = sum(index.topic_of(w) == index.topic_of(vocabularies[planted[w]][0]) for w in planted)
print(f"words sharing a topic with their planted group: {agree}/{len(planted)}")

# a sentence becomes the ordered list of its words' topics; unknown words drop out
sentence = " ".join(vocabularies[0][:3] + ["unknownword"] + vocabularies[1][:2])
print(to_topic_sequence_doc(preprocess(sentence), index).segments)
