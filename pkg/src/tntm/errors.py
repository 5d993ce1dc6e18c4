"""Exception hierarchy for the tntm package.

Every error raised by the library derives from :class:`TntmError`, so callers
(and the CLI) can catch one base class and map the concrete class name to a
machine-readable code.
"""


class TntmError(Exception):
    """Base class for all tntm errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# ---------------------------------------------------------------- corpus

class AllDocumentsEmpty(TntmError):
    """Preprocessing removed every document."""


class IndexOutOfRange(TntmError):
    """A vocabulary index exceeds the declared vocabulary size."""


# ---------------------------------------------------------------- tensorio

class BadMagic(TntmError):
    """File does not start with the expected magic bytes."""


class UnsupportedVersion(TntmError):
    """File format version is not supported by this reader."""


class TruncatedPayload(TntmError):
    """Declared sizes disagree with the actual byte length."""


class NonFiniteValue(TntmError):
    """A NaN or Inf was found where only finite values are allowed."""


class HeaderSchemaError(TntmError):
    """Checkpoint header is missing required entries or is malformed."""


class ShapeMismatch(TntmError):
    """Tensor shape is inconsistent with the declared configuration."""


# ---------------------------------------------------------------- numkernel

class NotPositiveDefinite(TntmError):
    """Matrix is not symmetric positive definite."""


class DimensionMismatch(TntmError):
    """Operand dimensions are incompatible."""


class ZeroVector(TntmError):
    """Cosine similarity is undefined for a zero vector."""


class RankDeficient(TntmError):
    """Input has fewer nonzero singular values than requested components."""


# ---------------------------------------------------------------- gmm

class DegenerateComponent(TntmError):
    """A mixture component lost essentially all responsibility mass."""


# ---------------------------------------------------------------- model

class UninitializedBatchStats(TntmError):
    """Eval-mode forward pass before any batch statistics were tracked."""


class EmptyBatch(TntmError):
    """A batch with zero documents was supplied."""


class TopicIndexOutOfRange(TntmError):
    """Topic index k is outside 0..K-1."""


# ---------------------------------------------------------------- train

class NonFiniteLoss(TntmError):
    """Training loss or gradients became NaN/Inf; aborting.

    Carries the offending batch (document indices and input arrays) in
    ``diagnostics`` so the caller can dump it for inspection.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


# ---------------------------------------------------------------- metrics

class WordAbsentFromCorpus(TntmError):
    """A top-word never occurs in the reference corpus.

    Only raised when strict mode is requested; the default behaviour is to
    score the affected pairs at the NPMI minimum and record a warning.
    """
