"""Corpus preprocessing and the sparse bag-of-words representation.

The pipeline lowercases text, treats every character that is neither a
letter nor a digit as a separator, drops stopwords, and keeps only tokens
occurring in at least ``min_doc_freq`` distinct documents. Documents that
end up empty are dropped but reported, so alignment with externally
produced document-embedding files stays auditable.
"""

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import AllDocumentsEmpty, IndexOutOfRange

# Word characters except underscore: Unicode letters and digits.
_TOKEN_RE = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on every non-alphanumeric character."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Vocabulary:
    """Ordered list of unique tokens; position = canonical index."""

    tokens: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.tokens)) != len(self.tokens):
            raise ValueError("vocabulary contains duplicate tokens")
        if any(t == "" for t in self.tokens):
            raise ValueError("vocabulary contains an empty token")
        object.__setattr__(
            self, "_index", {tok: i for i, tok in enumerate(self.tokens)}
        )

    def __len__(self) -> int:
        return len(self.tokens)

    def index(self, token: str) -> int:
        return self._index[token]

    def __contains__(self, token: str) -> bool:
        return token in self._index


@dataclass(frozen=True)
class Document:
    """One document: id, word sequence as vocab indices, and sparse counts."""

    doc_id: str
    word_sequence: tuple[int, ...]
    bow: dict[int, int]

    def __post_init__(self):
        if any(c <= 0 for c in self.bow.values()):
            raise ValueError(f"doc {self.doc_id}: bag-of-words counts must be positive")
        if sum(self.bow.values()) != len(self.word_sequence):
            raise ValueError(
                f"doc {self.doc_id}: bow counts sum to {sum(self.bow.values())}, "
                f"but the word sequence has length {len(self.word_sequence)}"
            )

    @property
    def length(self) -> int:
        return len(self.word_sequence)


@dataclass(frozen=True)
class Corpus:
    """Ordered documents plus the vocabulary they are indexed against."""

    documents: tuple[Document, ...]
    vocabulary: Vocabulary
    dropped_doc_ids: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if len(self.documents) < 1:
            raise AllDocumentsEmpty("corpus contains no documents")
        n = len(self.vocabulary)
        for doc in self.documents:
            for idx in doc.bow:
                if not 0 <= idx < n:
                    raise IndexOutOfRange(
                        f"doc {doc.doc_id}: index {idx} out of range for vocabulary size {n}"
                    )

    def __len__(self) -> int:
        return len(self.documents)


def _doc_from_indices(doc_id: str, indices: list[int]) -> Document:
    bow: dict[int, int] = {}
    for idx in indices:
        bow[idx] = bow.get(idx, 0) + 1
    return Document(doc_id=doc_id, word_sequence=tuple(indices), bow=bow)


def preprocess(
    raw_docs: list[tuple[str, str]],
    stopwords: set[str] | frozenset[str] = frozenset(),
    min_doc_freq: int = 1,
) -> Corpus:
    """Build a Corpus from raw (doc_id, text) pairs.

    Tokens are lowercased; non-alphanumeric characters separate tokens;
    stopwords are removed; only tokens present in at least ``min_doc_freq``
    distinct documents survive. The vocabulary is sorted alphabetically so
    output order is deterministic. Documents left empty are dropped and
    listed in ``Corpus.dropped_doc_ids``.
    """
    if not raw_docs:
        raise AllDocumentsEmpty("no input documents")
    if min_doc_freq < 1:
        raise ValueError("min_doc_freq must be >= 1")

    tokenized: list[tuple[str, list[str]]] = []
    doc_freq: dict[str, int] = {}
    for doc_id, text in raw_docs:
        toks = [t for t in tokenize(text) if t not in stopwords]
        tokenized.append((doc_id, toks))
        for tok in set(toks):
            doc_freq[tok] = doc_freq.get(tok, 0) + 1

    kept = {tok for tok, df in doc_freq.items() if df >= min_doc_freq}
    vocab = Vocabulary(tokens=tuple(sorted(kept)))

    documents: list[Document] = []
    dropped: list[str] = []
    for doc_id, toks in tokenized:
        indices = [vocab.index(t) for t in toks if t in kept]
        if indices:
            documents.append(_doc_from_indices(doc_id, indices))
        else:
            dropped.append(doc_id)

    if not documents:
        raise AllDocumentsEmpty(
            f"preprocessing removed all {len(raw_docs)} documents"
        )
    return Corpus(
        documents=tuple(documents),
        vocabulary=vocab,
        dropped_doc_ids=tuple(dropped),
    )


def bow_vector(doc: Document, n: int) -> np.ndarray:
    """Densify a document's sparse counts into a length-n float64 vector."""
    out = np.zeros(n, dtype=np.float64)
    for idx, count in doc.bow.items():
        if not 0 <= idx < n:
            raise IndexOutOfRange(f"bow index {idx} out of range for n={n}")
        out[idx] = count
    return out


# ------------------------------------------------------------------ file IO
#
# vocab.txt    one token per line, LF endings, line number = index.
# corpus.jsonl one JSON object per line:
#              {"doc_id": ..., "bow": [[index, count], ...], "length": l_d}
#              with bow indices strictly ascending.

def write_vocab(path, vocabulary: Vocabulary) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(vocabulary.tokens))
        fh.write("\n")


def read_vocab(path) -> Vocabulary:
    with open(path, "r", encoding="utf-8") as fh:
        content = fh.read()
    if content.endswith("\n"):
        content = content[:-1]
    return Vocabulary(tokens=tuple(content.split("\n")))


def write_corpus_jsonl(path, corpus: Corpus) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in corpus.documents:
            record = {
                "doc_id": doc.doc_id,
                "bow": [[idx, doc.bow[idx]] for idx in sorted(doc.bow)],
                "length": doc.length,
            }
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=False))
            fh.write("\n")


def read_corpus_jsonl(path, vocabulary: Vocabulary) -> Corpus:
    """Load corpus.jsonl; word sequences are reconstructed in index order
    (word order within documents is not stored in this format)."""
    documents: list[Document] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            indices: list[int] = []
            prev = -1
            for idx, count in record["bow"]:
                if idx <= prev:
                    raise ValueError(
                        f"{path}:{line_no + 1}: bow indices must be strictly ascending"
                    )
                prev = idx
                indices.extend([idx] * count)
            if "length" in record and record["length"] != len(indices):
                raise ValueError(
                    f"{path}:{line_no + 1}: declared length {record['length']} "
                    f"!= sum of counts {len(indices)}"
                )
            documents.append(_doc_from_indices(record["doc_id"], indices))
    return Corpus(documents=tuple(documents), vocabulary=vocabulary)


def read_stopwords(path) -> frozenset[str]:
    """One token per line; blank lines ignored."""
    with open(path, "r", encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip())
