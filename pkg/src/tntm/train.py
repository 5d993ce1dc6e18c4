"""Mini-batch training: dual Adam optimizers, gradient clipping, history.

Each batch runs encode -> sample -> refresh the log-likelihood matrix ->
loss -> backprop -> clip -> two Adam steps (one optimizer for the
inference network with high first-moment momentum, a slower one for the
topic parameters). Everything is driven by a single seeded generator, so
a fixed seed reproduces the run bit for bit at one thread.
"""

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import tensorio
from .corpus import Corpus, bow_vector
from .errors import NonFiniteLoss, ShapeMismatch
from .model import PriorSpec, TntmModel, TopicParams, elbo_batch_full, init_model
from .numkernel import lse, lss, softmax


@dataclass
class OptimizerState:
    """Adam state: first/second moments per tensor plus a shared step count."""

    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: OptimizerState,
) -> tuple[dict[str, np.ndarray], OptimizerState]:
    """One bias-corrected Adam update, applied in place to ``params``."""
    state.t += 1
    bc1 = 1.0 - state.beta1**state.t
    bc2 = 1.0 - state.beta2**state.t
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ShapeMismatch(
                f"gradient for {name!r} has shape {g.shape}, parameter {p.shape}"
            )
        if name not in state.m:
            state.m[name] = np.zeros_like(p)
            state.v[name] = np.zeros_like(p)
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        p -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    return params, state


def global_grad_norm(grads: dict[str, np.ndarray]) -> float:
    """L2 norm across all tensors."""
    total = 0.0
    for g in grads.values():
        total += float(np.sum(g * g))
    return float(np.sqrt(total))


def clip_gradients(grads: dict[str, np.ndarray], max_norm: float) -> dict[str, np.ndarray]:
    """Scale all gradients by max_norm/norm when the global norm exceeds it."""
    if max_norm <= 0.0:
        raise ValueError("max_norm must be > 0")
    norm = global_grad_norm(grads)
    if norm > max_norm:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return grads


@dataclass
class TrainConfig:
    """Hyperparameters; defaults follow the reference configuration.

    The encoder optimizer deliberately runs with high first-moment momentum
    (0.99), the usual countermeasure against component collapse; the topic
    optimizer uses standard momentum and a smaller learning rate.
    """

    epochs: int = 50
    batch_size: int = 128
    lr_encoder: float = 1e-3
    beta1_encoder: float = 0.99
    beta2_encoder: float = 0.999
    lr_topics: float = 1e-4
    beta1_topics: float = 0.9
    beta2_topics: float = 0.999
    clip_norm: float = 5.0
    num_samples: int = 1
    seed: int = 0
    adam_eps: float = 1e-8

    def __post_init__(self):
        # zero learning rates are allowed (they freeze the parameters)
        if self.lr_encoder < 0 or self.lr_topics < 0:
            raise ValueError("learning rates must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.num_samples < 1:
            raise ValueError("num_samples must be >= 1")


def _doc_representations(corpus: Corpus, doc_embeddings: np.ndarray | None):
    """Per-document encoder inputs and bag-of-words count matrix."""
    n = len(corpus.vocabulary)
    counts = np.stack([bow_vector(doc, n) for doc in corpus.documents])
    if doc_embeddings is None:
        reprs = counts
    else:
        doc_embeddings = np.asarray(doc_embeddings, dtype=np.float64)
        if doc_embeddings.shape[0] != len(corpus):
            raise ShapeMismatch(
                f"{doc_embeddings.shape[0]} document embeddings for {len(corpus)} documents"
            )
        reprs = doc_embeddings
    return reprs, counts


def train(
    corpus: Corpus,
    embeddings: np.ndarray,
    config: TrainConfig,
    init: TopicParams | TntmModel,
    doc_embeddings: np.ndarray | None = None,
    out_dir: str | Path | None = None,
    checkpoint_every: int = 0,
) -> tuple[TntmModel, list[dict]]:
    """Optimize the ELBO over the corpus; returns the model and per-epoch history.

    ``init`` is either topic parameters from the mixture-model fit (a fresh
    encoder is then created from the run seed) or a full model, e.g. loaded
    from a checkpoint. ``embeddings`` must be aligned with the vocabulary.
    History records per-document means of the ELBO and its two terms plus a
    collapse statistic: the batch mean of max_k softmax(mu_q)_k.
    """
    rng = np.random.default_rng(config.seed)
    n = len(corpus.vocabulary)

    if isinstance(init, TntmModel):
        model = init
    else:
        model = init_model(
            topics=init.copy(),
            vocab_size=n,
            encoder_mode="docvec" if doc_embeddings is not None else "bow",
            docvec_dim=None if doc_embeddings is None else doc_embeddings.shape[1],
            seed=config.seed,
        )
    model.attach_embeddings(embeddings)
    prior = model.prior()

    reprs, counts = _doc_representations(corpus, doc_embeddings)
    m_docs = len(corpus)

    enc_opt = OptimizerState(
        lr=config.lr_encoder,
        beta1=config.beta1_encoder,
        beta2=config.beta2_encoder,
        eps=config.adam_eps,
    )
    topic_opt = OptimizerState(
        lr=config.lr_topics,
        beta1=config.beta1_topics,
        beta2=config.beta2_topics,
        eps=config.adam_eps,
    )
    enc_names = set(model.encoder.parameter_names())

    history: list[dict] = []
    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)

    for epoch in range(config.epochs):
        tic = time.perf_counter()
        perm = rng.permutation(m_docs)
        sums = {"elbo": 0.0, "kl": 0.0, "recon": 0.0, "collapse": 0.0}

        for start in range(0, m_docs, config.batch_size):
            batch_idx = perm[start : start + config.batch_size]
            result = elbo_batch_full(
                reprs[batch_idx],
                counts[batch_idx],
                model,
                prior,
                config.num_samples,
                rng,
                update_stats=True,
            )
            grads = {name: -g for name, g in result["grads"].items()}
            norm = global_grad_norm(grads)
            if not (np.isfinite(result["elbo"]) and np.isfinite(norm)):
                raise NonFiniteLoss(
                    f"non-finite loss at epoch {epoch}, batch starting at {start} "
                    f"(elbo={result['elbo']}, grad_norm={norm})",
                    diagnostics={
                        "epoch": epoch,
                        "doc_indices": batch_idx,
                        "doc_reprs": reprs[batch_idx],
                        "counts": counts[batch_idx],
                    },
                )
            clip_gradients(grads, config.clip_norm)

            params = model.named_parameters()
            adam_step(
                {k: v for k, v in params.items() if k in enc_names},
                {k: v for k, v in grads.items() if k in enc_names},
                enc_opt,
            )
            adam_step(
                {k: v for k, v in params.items() if k not in enc_names},
                {k: v for k, v in grads.items() if k not in enc_names},
                topic_opt,
            )

            sums["elbo"] += result["elbo"]
            sums["kl"] += result["kl"]
            sums["recon"] += result["recon"]
            sums["collapse"] += float(np.sum(np.max(softmax(result["mu_q"], axis=1), axis=1)))

        wall_ms = (time.perf_counter() - tic) * 1000.0
        history.append(
            {
                "epoch": epoch,
                "elbo": sums["elbo"] / m_docs,
                "kl": sums["kl"] / m_docs,
                "recon": sums["recon"] / m_docs,
                "collapse_stat": sums["collapse"] / m_docs,
                "wall_ms": wall_ms,
            }
        )
        if (
            checkpoint_every > 0
            and out_path is not None
            and (epoch + 1) % checkpoint_every == 0
        ):
            tensorio.save_checkpoint(out_path / f"model_epoch{epoch:04d}.ckpt", model)

    if out_path is not None:
        write_history(out_path / "history.jsonl", history)
    return model, history


def write_history(path, history: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in history:
            fh.write(json.dumps(row, sort_keys=True))
            fh.write("\n")


def evaluate_elbo(
    model: TntmModel,
    prior: PriorSpec,
    doc_reprs: np.ndarray,
    counts: np.ndarray,
    num_samples: int,
    rng: np.random.Generator,
) -> dict:
    """Per-document mean ELBO on held-out documents (eval-mode encoder)."""
    mu_q, log_var, _ = model.encoder.forward_batch(doc_reprs, train=False)
    var_q = np.exp(log_var)
    kl = 0.5 * np.sum(
        var_q / prior.var
        + (prior.mu - mu_q) ** 2 / prior.var
        + np.log(prior.var)
        - log_var
        - 1.0
    )

    from .model import log_beta  # local import keeps module load order simple

    log_b = log_beta(model.topics, model.word_embeddings)
    recon = 0.0
    for _ in range(num_samples):
        eps = rng.standard_normal(mu_q.shape)
        theta_hat = mu_q + np.exp(0.5 * log_var) * eps
        s = lss(theta_hat, axis=1)
        word_logmix = lse(log_b[None, :, :] + s[:, :, None], axis=1)
        recon += float(np.sum(counts * word_logmix))
    recon /= num_samples
    m_docs = doc_reprs.shape[0]
    return {
        "elbo": (recon - float(kl)) / m_docs,
        "kl": float(kl) / m_docs,
        "recon": recon / m_docs,
    }
