"""Topic-quality metrics over top-word lists.

Four scores: embedding coherence (mean pairwise cosine of a topic's
top-word embeddings; higher is better), topic diversity (fraction of
unique words across all topics' top words), embedding diversity (mean
pairwise cosine between topic centroid embeddings; lower is better), and
NPMI coherence from document-level Boolean co-occurrence.

All functions are pure and invariant under permutation of topics and of
words within a topic. Conventional choices that the literature leaves
open are keyword arguments: coherence metrics default to the top 10
words, diversity to the top 20, NPMI smoothing eps to 1e-12.
"""

import itertools

import numpy as np

from .corpus import Corpus
from .numkernel import cosine_similarity

TopicSet = list[list[int]]


def _check_topics(topics: TopicSet) -> None:
    if not topics or any(len(t) == 0 for t in topics):
        raise ValueError("every topic needs a non-empty top-word list")
    for i, t in enumerate(topics):
        if len(set(t)) != len(t):
            raise ValueError(f"topic {i} repeats a top-word index")


def embedding_coherence(topics: TopicSet, eval_embeddings: np.ndarray) -> float:
    """Mean over topics of the mean pairwise cosine of top-word embeddings."""
    _check_topics(topics)
    emb = np.asarray(eval_embeddings, dtype=np.float64)
    scores = []
    for words in topics:
        pair_vals = [
            cosine_similarity(emb[a], emb[b])
            for a, b in itertools.combinations(words, 2)
        ]
        if not pair_vals:
            raise ValueError("coherence needs at least two top-words per topic")
        scores.append(float(np.mean(pair_vals)))
    return float(np.mean(scores))


def topic_diversity(topics: TopicSet) -> float:
    """Unique words across all top-word lists divided by K * t."""
    _check_topics(topics)
    t = len(topics[0])
    if any(len(words) != t for words in topics):
        raise ValueError("all topics must list the same number of top-words")
    unique = set()
    for words in topics:
        unique.update(words)
    return len(unique) / (len(topics) * t)


def embedding_diversity(topics: TopicSet, eval_embeddings: np.ndarray) -> float:
    """Mean pairwise cosine between topic centroids; lower means more diverse."""
    _check_topics(topics)
    if len(topics) < 2:
        raise ValueError("embedding diversity needs at least two topics")
    emb = np.asarray(eval_embeddings, dtype=np.float64)
    centroids = [np.mean(emb[list(words)], axis=0) for words in topics]
    pair_vals = [
        cosine_similarity(ca, cb) for ca, cb in itertools.combinations(centroids, 2)
    ]
    return float(np.mean(pair_vals))


def npmi_coherence(
    topics: TopicSet,
    corpus: Corpus,
    t: int = 10,
    eps: float = 1e-12,
    warnings: list[str] | None = None,
) -> float:
    """Normalized pointwise mutual information over top-word pairs.

    Probabilities are document-frequency estimates with Boolean
    co-occurrence: p(i) = df(i)/M, p(i, j) = df(i, j)/M, and

        NPMI(i, j) = log((p(i,j) + eps) / (p(i) p(j))) / -log(p(i,j) + eps),

    clamped to [-1, 1]. A pair co-occurring in every document scores 1 (the
    limit value); a pair with a word absent from the corpus scores -1 and a
    warning is appended to ``warnings`` when a list is supplied.
    """
    _check_topics(topics)
    if t < 2:
        raise ValueError("NPMI needs at least two top-words per topic")
    doc_sets = [frozenset(doc.bow) for doc in corpus.documents]
    m = len(doc_sets)

    def df(word: int) -> int:
        return sum(1 for s in doc_sets if word in s)

    def df_pair(a: int, b: int) -> int:
        return sum(1 for s in doc_sets if a in s and b in s)

    df_cache: dict[int, int] = {}
    topic_scores = []
    for words in topics:
        head = words[:t]
        pair_vals = []
        for a, b in itertools.combinations(head, 2):
            for w in (a, b):
                if w not in df_cache:
                    df_cache[w] = df(w)
            if df_cache[a] == 0 or df_cache[b] == 0:
                absent = [w for w in (a, b) if df_cache[w] == 0]
                if warnings is not None:
                    warnings.append(
                        f"word index {absent} absent from corpus; pair ({a},{b}) scored -1"
                    )
                pair_vals.append(-1.0)
                continue
            dij = df_pair(a, b)
            if dij == m:
                pair_vals.append(1.0)
                continue
            p_ij = dij / m
            p_i = df_cache[a] / m
            p_j = df_cache[b] / m
            val = np.log((p_ij + eps) / (p_i * p_j)) / -np.log(p_ij + eps)
            pair_vals.append(float(np.clip(val, -1.0, 1.0)))
        if not pair_vals:
            raise ValueError("NPMI needs at least one word pair per topic")
        topic_scores.append(float(np.mean(pair_vals)))
    return float(np.mean(topic_scores))
