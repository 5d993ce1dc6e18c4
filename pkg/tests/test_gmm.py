"""EM for the full-covariance mixture and the (A, D) covariance split."""

import itertools

import numpy as np
import pytest

from tntm.gmm import factor_covariance, fit_gmm, to_topic_params
from tntm.numkernel import cholesky


def _three_cluster_data(seed=0, sigma=0.5, per_cluster=100):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    points = np.concatenate(
        [c + sigma * rng.standard_normal((per_cluster, 2)) for c in centers]
    )
    labels = np.repeat(np.arange(3), per_cluster)
    return points, labels, centers


class TestFitGmm:
    def test_three_cluster_recovery(self):
        points, labels, _ = _three_cluster_data()
        # oracle: per-true-cluster sample means
        truth = np.stack([points[labels == j].mean(axis=0) for j in range(3)])
        fit = fit_gmm(points, k=3, seed=1)
        best = min(
            max(np.linalg.norm(fit.means[list(perm)] - truth, axis=1))
            for perm in itertools.permutations(range(3))
        )
        assert best < 0.1

    def test_single_component_closed_form(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((60, 3)) @ np.diag([1.0, 2.0, 0.5]) + 1.5
        reg = 1e-6
        fit = fit_gmm(x, k=1, seed=0, reg_covar=reg)
        np.testing.assert_allclose(fit.means[0], x.mean(axis=0), atol=1e-8)
        centered = x - x.mean(axis=0)
        biased = centered.T @ centered / x.shape[0] + reg * np.eye(3)
        np.testing.assert_allclose(fit.covariances[0].sigma, biased, atol=1e-8)

    def test_n_equals_k_distinct_points(self):
        points = np.array([[0.0, 0.0], [50.0, 0.0], [0.0, 50.0], [50.0, 50.0]])
        fit = fit_gmm(points, k=4, seed=3)
        assert np.all(np.isfinite(fit.means))
        assert np.isfinite(fit.final_loglik)
        best = min(
            max(np.linalg.norm(fit.means[list(perm)] - points, axis=1))
            for perm in itertools.permutations(range(4))
        )
        assert best < 1e-3

    def test_loglik_monotone_over_random_datasets(self):
        rng = np.random.default_rng(4)
        for trial in range(20):
            n = int(rng.integers(30, 80))
            p = int(rng.integers(2, 5))
            k = int(rng.integers(1, 5))
            x = rng.standard_normal((n, p)) * rng.uniform(0.5, 3.0)
            fit = fit_gmm(x, k=k, seed=trial)
            diffs = np.diff(fit.loglik_history)
            assert np.all(diffs >= -1e-9), f"trial {trial}: {diffs.min()}"

    def test_deterministic_given_seed(self):
        points, _, _ = _three_cluster_data(seed=5)
        a = fit_gmm(points, k=3, seed=7)
        b = fit_gmm(points, k=3, seed=7)
        assert a.means.tobytes() == b.means.tobytes()
        assert a.responsibilities.tobytes() == b.responsibilities.tobytes()
        assert a.final_loglik == b.final_loglik

    def test_simplex_invariants(self):
        points, _, _ = _three_cluster_data(seed=6)
        fit = fit_gmm(points, k=3, seed=8)
        assert abs(fit.weights.sum() - 1.0) < 1e-10
        np.testing.assert_allclose(fit.responsibilities.sum(axis=1), 1.0, atol=1e-10)

    def test_rejects_too_few_points(self):
        with pytest.raises(ValueError):
            fit_gmm(np.zeros((2, 2)), k=3, seed=0)

    def test_degenerate_component_restarts(self):
        # one initial mean astronomically far away: its responsibility mass
        # collapses below the floor, so it must restart at the point the
        # mixture explains worst and still produce a sane fit
        points, _, _ = _three_cluster_data(seed=12, per_cluster=40)
        far = np.full((1, 2), 1e9)
        init = np.vstack([points[:2], far])
        fit = fit_gmm(points, k=3, seed=13, means_init=init)
        assert fit.n_restarts >= 1
        assert np.all(np.isfinite(fit.means))
        assert np.isfinite(fit.final_loglik)
        assert np.all(np.abs(fit.means) < 100.0)
        np.testing.assert_allclose(fit.responsibilities.sum(axis=1), 1.0, atol=1e-10)


class TestCovarianceSplit:
    def test_diagonal_case(self):
        c = np.array([0.5, 2.0, 1.3])
        a, d = factor_covariance(np.diag(c))
        np.testing.assert_array_equal(a, np.zeros((3, 3)))
        np.testing.assert_allclose(d, np.log(c), atol=1e-15)

    def test_identity_case(self):
        a, d = factor_covariance(np.eye(4))
        np.testing.assert_array_equal(a, np.zeros((4, 4)))
        np.testing.assert_allclose(d, np.zeros(4), atol=1e-15)

    def test_full_covariance_reconstruction(self):
        rng = np.random.default_rng(9)
        for _ in range(25):
            b = rng.standard_normal((4, 4))
            sigma = b @ b.T + 0.5 * np.eye(4)
            a, d = factor_covariance(sigma)
            recon = a @ a.T + np.diag(np.exp(d))
            err = np.linalg.norm(recon - sigma) / np.linalg.norm(sigma)
            assert err < 1e-6

    def test_shrinks_split_when_needed(self):
        # nearly singular: sigma - 0.01 diag(sigma) is not SPD at first try
        v = np.array([1.0, 1.0]) / np.sqrt(2.0)
        sigma = np.outer(v, v) + 1e-4 * np.eye(2)
        a, d = factor_covariance(sigma)
        recon = a @ a.T + np.diag(np.exp(d))
        np.testing.assert_allclose(recon, sigma, rtol=1e-6)
        assert np.all(np.exp(d) > 0.0)

    def test_to_topic_params_reproduces_fit(self):
        points, _, _ = _three_cluster_data(seed=10)
        fit = fit_gmm(points, k=3, seed=11)
        topics = to_topic_params(fit)
        np.testing.assert_array_equal(topics.mu, fit.means)
        for j in range(3):
            sigma = fit.covariances[j].sigma
            err = np.linalg.norm(topics.sigma(j) - sigma) / np.linalg.norm(sigma)
            assert err < 1e-6
        # SPD by construction: Cholesky must succeed
        for j in range(3):
            cholesky(topics.sigma(j))
