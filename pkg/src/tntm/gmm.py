"""Expectation-maximization for a full-covariance Gaussian mixture.

Fitted on reduced word embeddings, the mixture's means and covariances
seed the per-topic Gaussians. Initialization is k-means++ for the means,
a shared spherical covariance from the data variance, and uniform
weights; every step is deterministic for a fixed seed.
"""

from dataclasses import dataclass

import numpy as np

from . import numkernel
from .errors import NotPositiveDefinite
from .numkernel import SpdMatrix


@dataclass(frozen=True)
class GmmFit:
    """Result of EM: per-component parameters plus the final E-step state.

    ``loglik_history`` holds the total log-likelihood before each M-step
    and after the last one; it is non-decreasing up to roundoff.
    ``weights`` are recorded for inspection but unused downstream (the
    document-topic prior is fixed, not mixture-derived).
    """

    k: int
    means: np.ndarray
    covariances: tuple[SpdMatrix, ...]
    weights: np.ndarray
    final_loglik: float
    responsibilities: np.ndarray
    loglik_history: tuple[float, ...]
    n_iter: int
    converged: bool
    n_restarts: int


def _kmeans_pp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: D^2-weighted sampling of k data points."""
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]), dtype=np.float64)
    centers[0] = x[rng.integers(n)]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centers[j] = x[idx]
        d2 = np.minimum(d2, np.sum((x - centers[j]) ** 2, axis=1))
    return centers


def _log_densities(x, means, covariances, log_weights):
    """(n, k) matrix of log w_k + log phi(x_i; mu_k, Sigma_k)."""
    cols = [
        log_weights[j] + numkernel.gaussian_logpdf_rows(x, means[j], covariances[j])
        for j in range(means.shape[0])
    ]
    return np.stack(cols, axis=1)


def fit_gmm(
    embeddings: np.ndarray,
    k: int,
    seed: int,
    max_iter: int = 100,
    tol: float = 1e-3,
    reg_covar: float = 1e-6,
    means_init: np.ndarray | None = None,
) -> GmmFit:
    """Fit a k-component full-covariance Gaussian mixture with EM.

    Stops when the relative log-likelihood improvement drops below ``tol``
    or after ``max_iter`` iterations. ``reg_covar`` is added to every
    covariance diagonal in each M-step. A component whose responsibility
    mass falls below 10 * eps * n is restarted at the point with the lowest
    total (mixture) density. ``means_init`` overrides the k-means++ seeding.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"embeddings must be 2-D, got shape {x.shape}")
    n, p = x.shape
    if n < k:
        raise ValueError(f"need at least k={k} points, got {n}")
    if reg_covar <= 0.0:
        raise ValueError("reg_covar must be > 0")
    rng = np.random.default_rng(seed)

    if means_init is not None:
        means = np.asarray(means_init, dtype=np.float64).copy()
        if means.shape != (k, p):
            raise ValueError(f"means_init has shape {means.shape}, expected ({k}, {p})")
    else:
        means = _kmeans_pp(x, k, rng)
    var0 = float(np.mean(np.var(x, axis=0))) + reg_covar
    covariances = tuple(
        numkernel.cholesky(var0 * np.eye(p)) for _ in range(k)
    )
    weights = np.full(k, 1.0 / k)

    degenerate_floor = 10.0 * np.finfo(np.float64).eps * n
    history: list[float] = []
    resp = np.full((n, k), 1.0 / k)
    converged = False
    n_restarts = 0
    n_iter = 0

    for it in range(max_iter):
        n_iter = it + 1
        logjoint = _log_densities(x, means, covariances, np.log(weights))
        point_logdens = numkernel.lse(logjoint, axis=1)
        loglik = float(np.sum(point_logdens))
        resp = np.exp(logjoint - point_logdens[:, None])
        history.append(loglik)
        if it > 0 and abs(loglik - history[-2]) <= tol * max(abs(history[-2]), 1.0):
            converged = True
            break

        # M-step
        mass = resp.sum(axis=0)
        worst_order = iter(np.argsort(point_logdens))
        new_means = np.empty_like(means)
        new_covs: list[SpdMatrix] = []
        for j in range(k):
            if mass[j] < degenerate_floor:
                n_restarts += 1
                new_means[j] = x[next(worst_order)]
                new_covs.append(numkernel.cholesky(var0 * np.eye(p)))
                mass[j] = 1.0
                continue
            new_means[j] = resp[:, j] @ x / mass[j]
            diff = x - new_means[j]
            cov = (resp[:, j] * diff.T) @ diff / mass[j]
            cov = 0.5 * (cov + cov.T) + reg_covar * np.eye(p)
            new_covs.append(numkernel.cholesky(cov))
        means = new_means
        covariances = tuple(new_covs)
        weights = mass / mass.sum()

    if not converged:
        # refresh responsibilities so they are consistent with final params
        logjoint = _log_densities(x, means, covariances, np.log(weights))
        point_logdens = numkernel.lse(logjoint, axis=1)
        loglik = float(np.sum(point_logdens))
        resp = np.exp(logjoint - point_logdens[:, None])
        history.append(loglik)

    return GmmFit(
        k=k,
        means=means,
        covariances=covariances,
        weights=weights,
        final_loglik=history[-1],
        responsibilities=resp,
        loglik_history=tuple(history),
        n_iter=n_iter,
        converged=converged,
        n_restarts=n_restarts,
    )


def factor_covariance(sigma: np.ndarray, eps_split: float = 0.01) -> tuple[np.ndarray, np.ndarray]:
    """Split an SPD matrix into (A, D) with sigma = A A^T + diag(exp(D)).

    A diagonal input maps to A = 0, D = log(diag). Otherwise D takes a
    small slice (``eps_split``) of each diagonal entry and A is the Cholesky
    factor of the remainder; eps_split shrinks geometrically until the
    remainder is SPD.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    p = sigma.shape[0]
    diag = np.diag(sigma).copy()
    if np.any(diag <= 0.0):
        raise NotPositiveDefinite("covariance has a non-positive diagonal entry")
    off = sigma - np.diag(diag)
    if float(np.max(np.abs(off))) <= 1e-12 * float(np.max(diag)):
        return np.zeros((p, p)), np.log(diag)
    split = eps_split
    for _ in range(60):
        try:
            d = np.log(diag * split)
            a = numkernel.cholesky(sigma - np.diag(np.exp(d))).lower
            return a, d
        except NotPositiveDefinite:
            split *= 0.1
    raise NotPositiveDefinite("could not split covariance into A A^T + exp(D)")


def to_topic_params(fit: GmmFit):
    """Convert mixture components into per-topic (mu, A, D) parameters.

    The reconstruction A A^T + diag(exp(D)) reproduces each component
    covariance exactly (up to factorization roundoff).
    """
    from .model import TopicParams  # local import to avoid a module cycle

    k = fit.k
    p = fit.means.shape[1]
    a = np.empty((k, p, p), dtype=np.float64)
    d = np.empty((k, p), dtype=np.float64)
    for j in range(k):
        a[j], d[j] = factor_covariance(fit.covariances[j].sigma)
    return TopicParams(mu=fit.means.copy(), a=a, d=d)
