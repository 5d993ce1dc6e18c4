"""End-to-end walkthrough on a planted corpus.

Builds a ground-truth model with well-separated Gaussian topics, samples a
corpus from it, seeds the trainable model with a Gaussian mixture fit, and
trains the variational autoencoder. Because the truth is known, we can
check directly how much of it the model recovers.
"""

import numpy as np

from tntm.corpus import bow_vector
from tntm.gmm import fit_gmm, to_topic_params
from tntm.metrics import topic_diversity
from tntm.model import doc_topics, log_beta, top_words
from tntm.synth import greedy_match_cosine, make_planted_instance, synth_corpus
from tntm.train import TrainConfig, train

K, VOCAB, P, M, DOC_LEN = 4, 80, 4, 600, 30

print(f"planting {K} topics in R^{P}, vocabulary of {VOCAB} words")
instance = make_planted_instance(k=K, vocab_size=VOCAB, embed_dim=P, seed=1)
corpus, truths = synth_corpus(instance, m=M, doc_len=DOC_LEN, seed=2)
print(f"sampled {len(corpus)} documents of {DOC_LEN} words each\n")

print("step 1: Gaussian mixture on the vocabulary embeddings")
fit = fit_gmm(instance.vocab_embeddings, k=K, seed=3)
print(f"  loglik {fit.final_loglik:.1f} after {fit.n_iter} iterations "
      f"(converged: {fit.converged})")
init_topics = to_topic_params(fit)
init_cosines = greedy_match_cosine(init_topics.mu, instance.topics.mu)
print(f"  mixture means vs planted means (cosine): "
      f"{', '.join(f'{c:.3f}' for c in init_cosines)}\n")

print("step 2: variational training (bag-of-words encoder)")
config = TrainConfig(epochs=10, batch_size=64, seed=4)
model, history = train(corpus, instance.vocab_embeddings, config, init_topics)
for row in history[::3]:
    print(f"  epoch {row['epoch']:2d}  elbo/doc {row['elbo']:8.2f}  "
          f"kl/doc {row['kl']:5.2f}  collapse stat {row['collapse_stat']:.3f}")
print()

print("step 3: inspect what was learned")
cosines = greedy_match_cosine(model.topics.mu, instance.topics.mu)
print(f"  learned means vs planted means (cosine): "
      f"{', '.join(f'{c:.3f}' for c in cosines)}")

lb = log_beta(model.topics, instance.vocab_embeddings)
lists = [[i for i, _ in top_words(lb, k, 10)] for k in range(K)]
print(f"  top-10 topic diversity: {topic_diversity(lists):.2f}")
for k in range(K):
    words = [instance.vocabulary.tokens[i] for i in lists[k][:6]]
    print(f"  topic {k}: {' '.join(words)}")

learned_norm = model.topics.mu / np.linalg.norm(model.topics.mu, axis=1, keepdims=True)
planted_norm = instance.topics.mu / np.linalg.norm(
    instance.topics.mu, axis=1, keepdims=True
)
to_planted = np.argmax(learned_norm @ planted_norm.T, axis=1)
hits = 0
for doc, truth in zip(corpus.documents, truths):
    theta = doc_topics(bow_vector(doc, VOCAB), model)
    hits += int(to_planted[int(np.argmax(theta))] == int(np.argmax(truth.theta_true)))
print(f"\n  dominant-topic accuracy over {M} documents: {hits / M:.1%}")
