"""Shared builders and the finite-difference gradient oracle."""

import numpy as np

from tntm.model import TntmModel, TopicParams, elbo_batch_full, init_model


def random_topics(rng, k, p, r=None, scale=1.0):
    r = p if r is None else r
    return TopicParams(
        mu=scale * rng.standard_normal((k, p)),
        a=0.3 * rng.standard_normal((k, p, r)),
        d=rng.standard_normal((k, p)) - 0.5,
    )


def small_model(seed=0, k=2, n=6, p=2, r=2, block_widths=(6, 4)) -> TntmModel:
    """Tiny bow-mode model with embeddings attached; covers the residual and
    width-changing block paths."""
    rng = np.random.default_rng(seed)
    topics = random_topics(rng, k, p, r)
    model = init_model(topics, vocab_size=n, block_widths=block_widths, seed=seed)
    model.attach_embeddings(rng.standard_normal((n, p)))
    return model


def random_batch(rng, n, batch_size, max_count=4):
    counts = rng.integers(0, max_count, size=(batch_size, n)).astype(np.float64)
    counts[:, 0] += 1.0  # no empty documents
    return counts


def finite_diff_max_rel_errors(
    model, prior, doc_reprs, counts, num_samples, seed, h=1e-5
) -> dict[str, float]:
    """Max relative error between analytic gradients and central differences.

    The elbo is re-evaluated with a freshly seeded generator each time, so
    noise and dropout masks are identical across evaluations; running
    batch-norm statistics are never advanced.

    Central differences at step h carry a cancellation floor of roughly
    eps * |f| / (2h); differences below 50x that floor are counted as exact,
    since no finite-difference oracle can resolve them at the stated h.
    """

    def value() -> float:
        rng = np.random.default_rng(seed)
        return elbo_batch_full(
            doc_reprs, counts, model, prior, num_samples, rng,
            update_stats=False, compute_grads=False,
        )["elbo"]

    base = elbo_batch_full(
        doc_reprs, counts, model, prior, num_samples,
        np.random.default_rng(seed), update_stats=False,
    )
    analytic = base["grads"]
    eps64 = np.finfo(np.float64).eps
    atol = 50.0 * eps64 * max(1.0, abs(base["elbo"])) / (2.0 * h)

    errors: dict[str, float] = {}
    for name, param in model.named_parameters().items():
        flat = param.reshape(-1)
        grad = analytic[name].reshape(-1)
        worst = 0.0
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + h
            f_plus = value()
            flat[idx] = orig - h
            f_minus = value()
            flat[idx] = orig
            fd = (f_plus - f_minus) / (2.0 * h)
            diff = abs(grad[idx] - fd)
            if diff <= atol:
                continue
            worst = max(worst, diff / max(abs(grad[idx]), abs(fd), 1e-12))
        errors[name] = worst
    return errors
