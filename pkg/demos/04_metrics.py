"""The four topic-quality scores on a corpus small enough to check by hand.

Two clean topics (weather words, finance words) and one deliberately mixed
topic show how each metric reacts: embedding coherence rewards tight
clusters, topic diversity penalizes shared top-words, embedding diversity
measures centroid separation (lower is better), and NPMI rewards words
that actually co-occur in documents.
"""

import numpy as np

from tntm.corpus import preprocess
from tntm.metrics import (
    embedding_coherence,
    embedding_diversity,
    npmi_coherence,
    topic_diversity,
)

raw_docs = [
    ("d0", "rain wind storm cloud rain"),
    ("d1", "storm cloud rain thunder wind"),
    ("d2", "wind thunder cloud storm"),
    ("d3", "stock bond market trade stock"),
    ("d4", "market trade bond yield stock"),
    ("d5", "yield bond market trade"),
    ("d6", "rain stock cloud market"),
]
corpus = preprocess(raw_docs, min_doc_freq=1)
vocab = corpus.vocabulary
print(f"vocabulary ({len(vocab)}): {' '.join(vocab.tokens)}\n")

# toy embeddings: weather words near +x, finance words near +y
rng = np.random.default_rng(0)
emb = np.zeros((len(vocab), 3))
weather = {"rain", "wind", "storm", "cloud", "thunder"}
for i, tok in enumerate(vocab.tokens):
    base = np.array([1.0, 0.0, 0.0]) if tok in weather else np.array([0.0, 1.0, 0.0])
    emb[i] = base + 0.15 * rng.standard_normal(3)

def ids(*tokens):
    return [vocab.index(t) for t in tokens]

clean = [
    ids("rain", "wind", "storm", "cloud"),
    ids("stock", "bond", "market", "trade"),
]
mixed = [
    ids("rain", "wind", "stock", "bond"),
    ids("storm", "cloud", "market", "trade"),
]
overlapping = [
    ids("rain", "wind", "storm", "cloud"),
    ids("rain", "wind", "bond", "market"),
]

for name, topics in (("clean", clean), ("mixed", mixed), ("overlapping", overlapping)):
    warnings = []
    print(f"{name} topics:")
    print(f"  embedding coherence (higher better): "
          f"{embedding_coherence(topics, emb):+.3f}")
    print(f"  topic diversity     (higher better): {topic_diversity(topics):.2f}")
    print(f"  embedding diversity (lower better):  "
          f"{embedding_diversity(topics, emb):+.3f}")
    print(f"  npmi coherence      (higher better): "
          f"{npmi_coherence(topics, corpus, t=4, warnings=warnings):+.3f}")
    print()
