"""Planted synthetic instances for end-to-end checks.

Builds a ground-truth model whose topics are well-separated spherical
Gaussians, samples a vocabulary clustered around them, and generates a
corpus from the generative process. Recovery of the planted structure is
the strongest available oracle for the whole pipeline.
"""

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, Vocabulary
from .model import PriorSpec, SyntheticDoc, TopicParams, generate_synthetic


@dataclass(frozen=True)
class PlantedInstance:
    topics: TopicParams
    prior: PriorSpec
    vocab_embeddings: np.ndarray
    vocabulary: Vocabulary
    word_topic: np.ndarray  # planted topic of each vocabulary word


def make_planted_instance(
    k: int,
    vocab_size: int,
    embed_dim: int,
    seed: int,
    separation: float = 10.0,
    sigma: float = 0.5,
    alpha: float = 0.2,
) -> PlantedInstance:
    """Topic means on orthogonal directions (scaled by ``separation``),
    spherical covariances sigma^2 I, and a vocabulary sampled round-robin
    from the topics so each word belongs to a planted cluster."""
    if vocab_size < k:
        raise ValueError("need at least one vocabulary word per topic")
    rng = np.random.default_rng(seed)
    if k <= embed_dim:
        basis, _ = np.linalg.qr(rng.standard_normal((embed_dim, embed_dim)))
        directions = basis[:, :k].T
    else:
        directions = rng.standard_normal((k, embed_dim))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    mu = separation * directions

    topics = TopicParams(
        mu=mu,
        a=np.zeros((k, embed_dim, embed_dim)),
        d=np.full((k, embed_dim), 2.0 * np.log(sigma)),
    )
    prior = PriorSpec.symmetric(k, alpha)

    word_topic = np.arange(vocab_size) % k
    emb = mu[word_topic] + sigma * rng.standard_normal((vocab_size, embed_dim))
    width = max(5, len(str(vocab_size - 1)))
    vocabulary = Vocabulary(tokens=tuple(f"w{i:0{width}d}" for i in range(vocab_size)))
    return PlantedInstance(
        topics=topics,
        prior=prior,
        vocab_embeddings=emb,
        vocabulary=vocabulary,
        word_topic=word_topic,
    )


def synth_corpus(
    instance: PlantedInstance, m: int, doc_len: int, seed: int
) -> tuple[Corpus, list[SyntheticDoc]]:
    """Generate a corpus from a planted instance (separate seed stream)."""
    return generate_synthetic(
        instance.topics,
        instance.prior,
        instance.vocab_embeddings,
        m=m,
        doc_len=doc_len,
        seed=seed,
        vocabulary=instance.vocabulary,
    )


def greedy_match_cosine(learned_mu: np.ndarray, planted_mu: np.ndarray) -> list[float]:
    """Greedy one-to-one matching of learned to planted means by cosine.

    Repeatedly takes the best remaining (learned, planted) pair; returns the
    matched cosines, one per planted topic.
    """
    learned = np.asarray(learned_mu, dtype=np.float64)
    planted = np.asarray(planted_mu, dtype=np.float64)
    ln = learned / np.linalg.norm(learned, axis=1, keepdims=True)
    pn = planted / np.linalg.norm(planted, axis=1, keepdims=True)
    sim = ln @ pn.T
    k = sim.shape[0]
    free_l = set(range(k))
    free_p = set(range(k))
    matched = {}
    for _ in range(k):
        best = None
        for i in free_l:
            for j in free_p:
                if best is None or sim[i, j] > sim[best]:
                    best = (i, j)
        matched[best[1]] = float(sim[best])
        free_l.discard(best[0])
        free_p.discard(best[1])
    return [matched[j] for j in range(k)]
