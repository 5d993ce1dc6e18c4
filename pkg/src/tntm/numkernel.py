"""Shared numerical primitives.

Everything here is a pure function over float64 arrays: Cholesky
factorization, multivariate Gaussian log-densities, stabilized
log-sum-exp / log-softmax, cosine similarity, and a PCA fallback for
dimensionality reduction. All higher modules build on these kernels.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    NotPositiveDefinite,
    RankDeficient,
    ZeroVector,
)

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class SpdMatrix:
    """A symmetric positive definite matrix held as its lower Cholesky factor.

    ``sigma = lower @ lower.T``; the diagonal of ``lower`` is strictly
    positive, which makes log-determinants and triangular solves cheap and
    stable.
    """

    dim: int
    lower: np.ndarray

    def __post_init__(self):
        if self.lower.shape != (self.dim, self.dim):
            raise DimensionMismatch(
                f"Cholesky factor has shape {self.lower.shape}, expected ({self.dim}, {self.dim})"
            )
        if not np.all(np.diag(self.lower) > 0.0):
            raise NotPositiveDefinite("Cholesky factor must have a strictly positive diagonal")

    @property
    def sigma(self) -> np.ndarray:
        """Reconstruct the dense matrix L L^T."""
        return self.lower @ self.lower.T

    @property
    def log_det(self) -> float:
        """log det(sigma) = 2 * sum(log diag(L))."""
        return 2.0 * float(np.sum(np.log(np.diag(self.lower))))

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve sigma @ x = b via two triangular solves."""
        y = scipy.linalg.solve_triangular(self.lower, b, lower=True)
        return scipy.linalg.solve_triangular(self.lower.T, y, lower=False)

    def inverse(self) -> np.ndarray:
        return self.solve(np.eye(self.dim))


def cholesky(sym_matrix: np.ndarray) -> SpdMatrix:
    """Factor a symmetric positive definite matrix as L L^T.

    The input must be symmetric within 1e-8 (absolute, relative to its
    largest entry). Raises NotPositiveDefinite when a leading minor fails.
    """
    m = np.asarray(sym_matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if float(np.max(np.abs(m - m.T))) > 1e-8 * scale:
        raise NotPositiveDefinite("matrix is not symmetric within tolerance")
    try:
        lower = np.linalg.cholesky(0.5 * (m + m.T))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    return SpdMatrix(dim=m.shape[0], lower=lower)


def gaussian_logpdf(x: np.ndarray, mu: np.ndarray, cov: SpdMatrix) -> float:
    """Log-density of a multivariate normal at a single point.

    Computed as -(P/2) log(2 pi) - sum(log diag(L)) - 0.5 ||L^-1 (x - mu)||^2,
    which is finite for any finite input.
    """
    x = np.asarray(x, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    if x.shape != (cov.dim,) or mu.shape != (cov.dim,):
        raise DimensionMismatch(
            f"x {x.shape} / mu {mu.shape} incompatible with dim {cov.dim}"
        )
    z = scipy.linalg.solve_triangular(cov.lower, x - mu, lower=True)
    return float(
        -0.5 * cov.dim * LOG_2PI - np.sum(np.log(np.diag(cov.lower))) - 0.5 * np.dot(z, z)
    )


def gaussian_logpdf_rows(points: np.ndarray, mu: np.ndarray, cov: SpdMatrix) -> np.ndarray:
    """Vectorized :func:`gaussian_logpdf` over the rows of ``points``.

    ``points`` is (n, P); returns a length-n vector. One triangular solve is
    shared across all rows.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != cov.dim:
        raise DimensionMismatch(f"points {pts.shape} incompatible with dim {cov.dim}")
    z = scipy.linalg.solve_triangular(cov.lower, (pts - mu).T, lower=True)
    log_norm = -0.5 * cov.dim * LOG_2PI - np.sum(np.log(np.diag(cov.lower)))
    return log_norm - 0.5 * np.sum(z * z, axis=0)


def lse(x: np.ndarray, axis: int | None = None):
    """Log-sum-exp with the rolling-max shift: max + log sum exp(x - max).

    For a 1-D input (axis=None) a float is returned; otherwise the reduction
    runs along ``axis``.
    """
    x = np.asarray(x, dtype=np.float64)
    if axis is None:
        m = float(np.max(x))
        return m + float(np.log(np.sum(np.exp(x - m))))
    m = np.max(x, axis=axis, keepdims=True)
    out = m.squeeze(axis) + np.log(np.sum(np.exp(x - m), axis=axis))
    return out


def lss(x: np.ndarray, axis: int | None = None) -> np.ndarray:
    """Log-softmax: x - lse(x), stabilized by the same max shift."""
    x = np.asarray(x, dtype=np.float64)
    if axis is None:
        return x - lse(x)
    m = np.max(x, axis=axis, keepdims=True)
    return x - m - np.log(np.sum(np.exp(x - m), axis=axis, keepdims=True))


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """exp(lss(x)); rows sum to one by construction."""
    return np.exp(lss(x, axis=axis))


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    if np.array_equal(a, b):
        return 1.0  # exact identity, independent of norm roundoff
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def pca_reduce(matrix: np.ndarray, target_dim: int) -> np.ndarray:
    """Project rows onto the top principal components of the centered input.

    Components come from an eigen-decomposition of the sample covariance
    (denominator n-1), ordered by descending explained variance. Each
    component's sign is fixed so its largest-magnitude loading is positive.
    Raises RankDeficient when fewer than ``target_dim`` nonzero singular
    values exist.
    """
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {x.shape}")
    n, q = x.shape
    if target_dim > q or target_dim > n or target_dim < 1:
        raise DimensionMismatch(
            f"target_dim {target_dim} must satisfy 1 <= target_dim <= min(n={n}, q={q})"
        )
    centered = x - np.mean(x, axis=0)
    cov = centered.T @ centered / max(n - 1, 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    tol = max(n, q) * np.finfo(np.float64).eps * max(float(eigvals[0]), 0.0)
    rank = int(np.sum(eigvals > tol))
    if rank < target_dim:
        raise RankDeficient(f"input has rank {rank}, need {target_dim} components")

    components = eigvecs[:, :target_dim]
    for j in range(target_dim):
        peak = int(np.argmax(np.abs(components[:, j])))
        if components[peak, j] < 0.0:
            components[:, j] = -components[:, j]
    return centered @ components
