"""The topic model itself.

Topics are multivariate Gaussians N(mu_k, Sigma_k) in a reduced
word-embedding space, with Sigma_k = A_k A_k^T + diag(exp(D_k)) so positive
definiteness holds by construction. Document-topic proportions carry a
logistic-normal prior (the Laplace approximation to a symmetric Dirichlet),
and a variational posterior LN(mu_q, Sigma_q) is produced per document by
the inference network.

The reconstruction term is evaluated entirely in log space,

    u^T log(beta theta) = sum_v u_v * LSE_k(log beta_{k,v} + LSS(theta_hat)_k),

which stays finite even when every density in beta underflows. All
gradients (encoder weights, topic means, covariance factors) are computed
analytically; see :func:`elbo_batch`.

Orientation note: the log-likelihood matrix is stored K x N (topics by
vocabulary), entry (k, n) = log phi(omega_n; mu_k, Sigma_k).
"""

from dataclasses import dataclass

import numpy as np

from . import numkernel
from .corpus import Corpus, Document, Vocabulary
from .encoder import EncoderConfig, EncoderNetwork, EncoderOutput, encode
from .errors import (
    DimensionMismatch,
    EmptyBatch,
    HeaderSchemaError,
    ShapeMismatch,
    TopicIndexOutOfRange,
)
from .numkernel import SpdMatrix, lse, lss, softmax

# floor on exp(D) so Sigma stays SPD for arbitrarily negative D
_EXP_FLOOR = 1e-300


# ---------------------------------------------------------------- prior

@dataclass(frozen=True)
class PriorSpec:
    """Logistic-normal prior over topic proportions: zero mean, shared
    diagonal variance s_k = (1/alpha)(1 - 1/K)."""

    mu: np.ndarray
    var: np.ndarray
    alpha: float | None = None

    def __post_init__(self):
        if self.mu.shape != self.var.shape or self.mu.ndim != 1:
            raise DimensionMismatch("prior mu and var must be equal-length vectors")
        if np.any(self.mu != 0.0):
            raise ValueError("prior mean must be all zeros")
        if np.any(self.var <= 0.0):
            raise ValueError("prior variances must be positive")
        spread = float(np.max(self.var) - np.min(self.var))
        if spread > 1e-12 * float(np.max(self.var)):
            raise ValueError("prior is symmetric; all variances must be equal")

    @property
    def k(self) -> int:
        return self.mu.shape[0]

    @staticmethod
    def symmetric(k: int, alpha: float = 0.2) -> "PriorSpec":
        if k < 2:
            raise ValueError("symmetric prior requires at least 2 topics")
        if alpha <= 0.0:
            raise ValueError("alpha must be positive")
        s = (1.0 / alpha) * (1.0 - 1.0 / k)
        return PriorSpec(mu=np.zeros(k), var=np.full(k, s), alpha=alpha)


# ---------------------------------------------------------------- topics

@dataclass
class TopicParams:
    """Per-topic mean and factored covariance.

    mu: (K, P); a: (K, P, r); d: (K, P) log-diagonal. Sigma_k is
    a_k a_k^T + diag(exp(d_k)), SPD for any finite values.
    """

    mu: np.ndarray
    a: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=np.float64)
        self.a = np.asarray(self.a, dtype=np.float64)
        self.d = np.asarray(self.d, dtype=np.float64)
        k, p = self.mu.shape
        if self.a.shape[:2] != (k, p) or self.d.shape != (k, p):
            raise ShapeMismatch(
                f"inconsistent topic shapes: mu {self.mu.shape}, a {self.a.shape}, d {self.d.shape}"
            )
        if self.a.shape[2] > p:
            raise ShapeMismatch(f"rank {self.a.shape[2]} exceeds embedding dim {p}")

    @property
    def k(self) -> int:
        return self.mu.shape[0]

    @property
    def p(self) -> int:
        return self.mu.shape[1]

    @property
    def r(self) -> int:
        return self.a.shape[2]

    def sigma(self, k: int) -> np.ndarray:
        return self.a[k] @ self.a[k].T + np.diag(np.maximum(np.exp(self.d[k]), _EXP_FLOOR))

    def cholesky_factors(self) -> tuple[SpdMatrix, ...]:
        return tuple(numkernel.cholesky(self.sigma(k)) for k in range(self.k))

    def copy(self) -> "TopicParams":
        return TopicParams(mu=self.mu.copy(), a=self.a.copy(), d=self.d.copy())


# ---------------------------------------------------------------- sampling

@dataclass(frozen=True)
class ThetaSample:
    """Reparametrized draw: theta_hat = mu_q + sqrt(Sigma_q) eps, theta = softmax."""

    theta_hat: np.ndarray
    theta: np.ndarray
    epsilon: np.ndarray


def sample_theta(out: EncoderOutput, epsilon: np.ndarray) -> ThetaSample:
    """Draw topic proportions through the reparametrization path."""
    epsilon = np.asarray(epsilon, dtype=np.float64)
    if epsilon.shape != out.mu_q.shape:
        raise DimensionMismatch(
            f"epsilon shape {epsilon.shape} != mu_q shape {out.mu_q.shape}"
        )
    theta_hat = out.mu_q + np.exp(0.5 * out.log_var_q) * epsilon
    return ThetaSample(theta_hat=theta_hat, theta=softmax(theta_hat), epsilon=epsilon)


# ---------------------------------------------------------------- decoder

def log_beta(phi: TopicParams, embeddings: np.ndarray) -> np.ndarray:
    """K x N matrix of log phi(omega_n; mu_k, Sigma_k).

    One Cholesky factorization per topic per call.
    """
    emb = np.asarray(embeddings, dtype=np.float64)
    if emb.ndim != 2 or emb.shape[1] != phi.p:
        raise DimensionMismatch(
            f"embeddings {emb.shape} incompatible with embedding dim {phi.p}"
        )
    chols = phi.cholesky_factors()
    rows = [
        numkernel.gaussian_logpdf_rows(emb, phi.mu[k], chols[k]) for k in range(phi.k)
    ]
    return np.stack(rows, axis=0)


def reconstruction_loglik(
    log_beta_matrix: np.ndarray, theta_hat: np.ndarray, bow: np.ndarray
) -> float:
    """Stabilized u^T log(beta theta) for one document.

    Works on the pre-softmax theta_hat; equals the naive path whenever that
    path does not underflow, and stays finite always.
    """
    lb = np.asarray(log_beta_matrix, dtype=np.float64)
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    bow = np.asarray(bow, dtype=np.float64)
    if lb.ndim != 2 or theta_hat.shape != (lb.shape[0],) or bow.shape != (lb.shape[1],):
        raise DimensionMismatch(
            f"log_beta {lb.shape}, theta_hat {theta_hat.shape}, bow {bow.shape} inconsistent"
        )
    word_logmix = lse(lb + lss(theta_hat)[:, None], axis=0)
    return float(bow @ word_logmix)


def kl_divergence(out: EncoderOutput, prior: PriorSpec) -> float:
    """Closed-form KL between the diagonal Gaussians behind q and the prior."""
    if out.mu_q.shape != prior.mu.shape:
        raise DimensionMismatch(
            f"posterior dim {out.mu_q.shape} != prior dim {prior.mu.shape}"
        )
    var_q = np.exp(out.log_var_q)
    return float(
        0.5
        * np.sum(
            var_q / prior.var
            + (prior.mu - out.mu_q) ** 2 / prior.var
            + np.log(prior.var)
            - out.log_var_q
            - 1.0
        )
    )


# ---------------------------------------------------------------- the model

class TntmModel:
    """Inference network + topic parameters + static configuration.

    ``word_embeddings`` (N x P, vocabulary order) are bound at runtime for
    training and top-word extraction; they are an input file, not part of
    checkpoints.
    """

    def __init__(
        self,
        encoder: EncoderNetwork,
        topics: TopicParams,
        vocab_size: int,
        prior_alpha: float = 0.2,
        word_embeddings: np.ndarray | None = None,
    ):
        self.encoder = encoder
        self.topics = topics
        self.vocab_size = int(vocab_size)
        self.prior_alpha = float(prior_alpha)
        self.word_embeddings = None
        if word_embeddings is not None:
            self.attach_embeddings(word_embeddings)
        if encoder.config.out_dim != topics.k:
            raise ShapeMismatch(
                f"encoder outputs {encoder.config.out_dim} topics, parameters have {topics.k}"
            )
        if encoder.config.mode == "bow" and encoder.config.input_dim != self.vocab_size:
            raise ShapeMismatch(
                f"bow encoder input dim {encoder.config.input_dim} != vocab size {self.vocab_size}"
            )

    # ------------------------------------------------------------ basics

    @property
    def k(self) -> int:
        return self.topics.k

    @property
    def p(self) -> int:
        return self.topics.p

    @property
    def r(self) -> int:
        return self.topics.r

    def prior(self) -> PriorSpec:
        return PriorSpec.symmetric(self.k, self.prior_alpha)

    def attach_embeddings(self, embeddings: np.ndarray) -> None:
        emb = np.asarray(embeddings, dtype=np.float64)
        if emb.shape != (self.vocab_size, self.topics.p):
            raise ShapeMismatch(
                f"embeddings {emb.shape} != (vocab {self.vocab_size}, dim {self.topics.p})"
            )
        self.word_embeddings = emb

    def copy(self) -> "TntmModel":
        return TntmModel(
            encoder=self.encoder.copy(),
            topics=self.topics.copy(),
            vocab_size=self.vocab_size,
            prior_alpha=self.prior_alpha,
            word_embeddings=None if self.word_embeddings is None else self.word_embeddings.copy(),
        )

    # ------------------------------------------------------------ tensors

    def named_parameters(self) -> dict[str, np.ndarray]:
        """Trainable tensors keyed by their checkpoint names."""
        return {
            "topic_mu": self.topics.mu,
            "topic_A": self.topics.a,
            "topic_D": self.topics.d,
            **self.encoder.named_parameters(),
        }

    def named_tensors(self) -> dict[str, np.ndarray]:
        """All persisted tensors (parameters plus batch-norm statistics)."""
        return {
            "topic_mu": self.topics.mu,
            "topic_A": self.topics.a,
            "topic_D": self.topics.d,
            **self.encoder.named_tensors(),
        }

    def checkpoint_config(self) -> dict:
        cfg = self.encoder.config
        return {
            "k": self.k,
            "vocab_size": self.vocab_size,
            "embed_dim": self.p,
            "rank": self.r,
            "prior_alpha": self.prior_alpha,
            "encoder_mode": cfg.mode,
            "encoder_input_dim": cfg.input_dim,
            "encoder_hidden0": cfg.hidden0,
            "encoder_block_widths": list(cfg.block_widths),
            "dropout": cfg.dropout,
            "leaky_slope": cfg.leaky_slope,
            "bn_eps": cfg.bn_eps,
            "bn_momentum": cfg.bn_momentum,
            "bn_batches_tracked": self.encoder.batches_tracked,
        }

    @classmethod
    def expected_tensor_shapes(cls, config: dict) -> dict[str, tuple[int, ...]]:
        k = config["k"]
        p = config["embed_dim"]
        r = config["rank"]
        widths = [config["encoder_hidden0"], *config["encoder_block_widths"]]
        shapes: dict[str, tuple[int, ...]] = {
            "topic_mu": (k, p),
            "topic_A": (k, p, r),
            "topic_D": (k, p),
            "enc.linear0.w": (config["encoder_input_dim"], widths[0]),
            "enc.linear0.b": (widths[0],),
        }
        for i, width in enumerate(config["encoder_block_widths"]):
            prev = widths[i]
            shapes[f"enc.block{i}.linear.w"] = (prev, width)
            shapes[f"enc.block{i}.linear.b"] = (width,)
            for stat in ("bn.gamma", "bn.beta", "bn.run_mean", "bn.run_var"):
                shapes[f"enc.block{i}.{stat}"] = (width,)
        for head in ("head_mu", "head_logvar"):
            shapes[f"enc.{head}.w"] = (widths[-1], k)
            shapes[f"enc.{head}.b"] = (k,)
        return shapes

    @classmethod
    def from_checkpoint(cls, config: dict, tensors: dict[str, np.ndarray]) -> "TntmModel":
        required_keys = (
            "k",
            "vocab_size",
            "embed_dim",
            "rank",
            "prior_alpha",
            "encoder_mode",
            "encoder_input_dim",
            "encoder_hidden0",
            "encoder_block_widths",
        )
        missing = [key for key in required_keys if key not in config]
        if missing:
            raise HeaderSchemaError(f"checkpoint config is missing {missing}")
        if config["encoder_mode"] == "bow" and config["encoder_input_dim"] != config["vocab_size"]:
            raise ShapeMismatch("bow encoder input dim must equal vocab_size")

        shapes = cls.expected_tensor_shapes(config)
        missing_tensors = sorted(set(shapes) - set(tensors))
        if missing_tensors:
            raise HeaderSchemaError(f"checkpoint is missing tensors {missing_tensors}")
        extra = sorted(set(tensors) - set(shapes))
        if extra:
            raise HeaderSchemaError(f"checkpoint contains unknown tensors {extra}")
        for name, shape in shapes.items():
            if tensors[name].shape != shape:
                raise ShapeMismatch(
                    f"tensor {name!r} has shape {tensors[name].shape}, expected {shape}"
                )

        enc_config = EncoderConfig(
            input_dim=config["encoder_input_dim"],
            hidden0=config["encoder_hidden0"],
            block_widths=tuple(config["encoder_block_widths"]),
            out_dim=config["k"],
            mode=config["encoder_mode"],
            dropout=config.get("dropout", 0.3),
            leaky_slope=config.get("leaky_slope", 0.01),
            bn_eps=config.get("bn_eps", 1e-5),
            bn_momentum=config.get("bn_momentum", 0.1),
        )
        enc_params = {
            name: np.asarray(tensors[name], dtype=np.float64).copy()
            for name in shapes
            if name.startswith("enc.")
        }
        encoder = EncoderNetwork(
            config=enc_config,
            params=enc_params,
            batches_tracked=int(config.get("bn_batches_tracked", 0)),
        )
        topics = TopicParams(
            mu=tensors["topic_mu"].astype(np.float64).copy(),
            a=tensors["topic_A"].astype(np.float64).copy(),
            d=tensors["topic_D"].astype(np.float64).copy(),
        )
        return cls(
            encoder=encoder,
            topics=topics,
            vocab_size=int(config["vocab_size"]),
            prior_alpha=float(config["prior_alpha"]),
        )


def init_model(
    topics: TopicParams,
    vocab_size: int,
    encoder_mode: str = "bow",
    docvec_dim: int | None = None,
    block_widths: tuple[int, ...] = (200, 200),
    prior_alpha: float = 0.2,
    seed: int = 0,
) -> TntmModel:
    """Fresh model around given topic parameters with a random encoder."""
    rng = np.random.default_rng(seed)
    if encoder_mode == "bow":
        cfg = EncoderConfig.bow(vocab_size, topics.k, block_widths=block_widths)
    elif encoder_mode == "docvec":
        if docvec_dim is None:
            raise ValueError("docvec mode requires docvec_dim")
        cfg = EncoderConfig.docvec(docvec_dim, topics.k, block_widths=block_widths)
    else:
        raise ValueError(f"unknown encoder mode {encoder_mode!r}")
    encoder = EncoderNetwork.init_random(cfg, rng)
    return TntmModel(
        encoder=encoder, topics=topics, vocab_size=vocab_size, prior_alpha=prior_alpha
    )


# ---------------------------------------------------------------- ELBO

def _decode_batch(
    log_b: np.ndarray, theta_hat: np.ndarray, counts: np.ndarray, want_grads: bool = True
):
    """Reconstruction log-likelihood and its gradients for a batch.

    Returns (recon_total, d_theta_hat (B,K), d_log_beta (K,N)). Chunked over
    the batch so the (chunk, K, N) temporary stays bounded.
    """
    b, k = theta_hat.shape
    n = log_b.shape[1]
    s = lss(theta_hat, axis=1)
    recon = 0.0
    d_theta_hat = np.empty_like(theta_hat) if want_grads else None
    d_log_beta = np.zeros_like(log_b) if want_grads else None
    p_theta = softmax(theta_hat, axis=1) if want_grads else None
    chunk = max(1, int(2e7 / max(k * n, 1)))
    for lo in range(0, b, chunk):
        hi = min(lo + chunk, b)
        t = log_b[None, :, :] + s[lo:hi, :, None]
        z = numkernel.lse(t, axis=1)  # (chunk, N)
        recon += float(np.sum(counts[lo:hi] * z))
        if not want_grads:
            continue
        weights = np.exp(t - z[:, None, :])
        coeff = counts[lo:hi, None, :] * weights
        d_log_beta += coeff.sum(axis=0)
        g_s = coeff.sum(axis=2)
        d_theta_hat[lo:hi] = g_s - p_theta[lo:hi] * g_s.sum(axis=1, keepdims=True)
    return recon, d_theta_hat, d_log_beta


def _topic_grads_from_log_beta(
    phi: TopicParams,
    embeddings: np.ndarray,
    chols: tuple[SpdMatrix, ...],
    d_log_beta: np.ndarray,
):
    """Chain d(elbo)/d(log beta) into gradients for mu, A, D.

    For l = log phi(omega; mu, Sigma):
        dl/dmu    = Sigma^-1 (omega - mu)
        dl/dSigma = -1/2 Sigma^-1 + 1/2 Sigma^-1 (omega-mu)(omega-mu)^T Sigma^-1
    then Sigma = A A^T + diag(exp(D)) gives dA = 2 G A, dD = diag(G) exp(D).
    """
    k, p, r = phi.k, phi.p, phi.r
    grad_mu = np.zeros((k, p))
    grad_a = np.zeros((k, p, r))
    grad_d = np.zeros((k, p))
    for j in range(k):
        gj = d_log_beta[j]
        lam = chols[j].inverse()
        delta = embeddings - phi.mu[j]
        grad_mu[j] = lam @ (delta.T @ gj)
        scatter = delta.T @ (gj[:, None] * delta)
        g_sigma = 0.5 * (lam @ scatter @ lam) - 0.5 * float(gj.sum()) * lam
        grad_a[j] = 2.0 * g_sigma @ phi.a[j]
        grad_d[j] = np.diag(g_sigma) * np.exp(phi.d[j])
    return grad_mu, grad_a, grad_d


def elbo_batch_full(
    doc_reprs: np.ndarray,
    counts: np.ndarray,
    model: TntmModel,
    prior: PriorSpec,
    num_samples: int,
    rng: np.random.Generator,
    update_stats: bool = False,
    compute_grads: bool = True,
) -> dict:
    """ELBO estimate and analytic gradients for one mini-batch.

    ``doc_reprs`` is (B, input_dim) and ``counts`` the (B, N) bag-of-words
    matrix. Returns a dict with the elbo, per-parameter gradients of the
    elbo, and per-batch diagnostics (kl, reconstruction, mu_q). With
    ``compute_grads=False`` only the value is produced (the noise stream is
    drawn identically either way).
    """
    if doc_reprs.shape[0] == 0:
        raise EmptyBatch("batch contains no documents")
    if num_samples < 1:
        raise ValueError("number of Monte Carlo samples must be >= 1")
    if model.word_embeddings is None:
        raise ValueError("model has no word embeddings attached")
    if prior.k != model.k:
        raise DimensionMismatch(f"prior dim {prior.k} != model topics {model.k}")

    mu_q, log_var, cache = model.encoder.forward_batch(
        doc_reprs,
        train=True,
        rng=rng,
        update_stats=update_stats,
        return_cache=compute_grads,
    )
    var_q = np.exp(log_var)

    kl_terms = 0.5 * (
        var_q / prior.var
        + (prior.mu - mu_q) ** 2 / prior.var
        + np.log(prior.var)
        - log_var
        - 1.0
    )
    kl_sum = float(kl_terms.sum())

    phi = model.topics
    chols = phi.cholesky_factors()
    log_b = np.stack(
        [
            numkernel.gaussian_logpdf_rows(model.word_embeddings, phi.mu[j], chols[j])
            for j in range(phi.k)
        ],
        axis=0,
    )

    recon_total = 0.0
    d_mu_recon = np.zeros_like(mu_q)
    d_lv_recon = np.zeros_like(log_var)
    d_log_beta = np.zeros_like(log_b)
    half_std = 0.5 * np.exp(0.5 * log_var)
    for _ in range(num_samples):
        eps = rng.standard_normal(mu_q.shape)
        theta_hat = mu_q + np.exp(0.5 * log_var) * eps
        recon_j, d_theta_hat, d_log_beta_j = _decode_batch(
            log_b, theta_hat, counts, want_grads=compute_grads
        )
        recon_total += recon_j
        if compute_grads:
            d_mu_recon += d_theta_hat
            d_lv_recon += d_theta_hat * half_std * eps
            d_log_beta += d_log_beta_j
    inv_l = 1.0 / num_samples
    recon_total *= inv_l

    elbo = -kl_sum + recon_total
    result = {
        "elbo": elbo,
        "grads": None,
        "kl": kl_sum,
        "recon": recon_total,
        "mu_q": mu_q,
        "log_beta": log_b,
    }
    if not compute_grads:
        return result

    d_log_beta *= inv_l
    # gradients of the elbo wrt encoder outputs
    d_mu_q = -(mu_q - prior.mu) / prior.var + inv_l * d_mu_recon
    d_log_var = -0.5 * (var_q / prior.var - 1.0) + inv_l * d_lv_recon
    enc_grads = model.encoder.backward_batch(cache, d_mu_q, d_log_var)

    grad_mu, grad_a, grad_d = _topic_grads_from_log_beta(
        phi, model.word_embeddings, chols, d_log_beta
    )
    result["grads"] = {
        "topic_mu": grad_mu,
        "topic_A": grad_a,
        "topic_D": grad_d,
        **enc_grads,
    }
    return result


def elbo_batch(
    batch: list[tuple[np.ndarray, np.ndarray]],
    model: TntmModel,
    prior: PriorSpec,
    num_samples: int,
    rng: np.random.Generator,
) -> tuple[float, dict[str, np.ndarray]]:
    """ELBO and per-parameter gradients for a list of (doc_repr, bow) pairs."""
    if not batch:
        raise EmptyBatch("batch contains no documents")
    doc_reprs = np.stack([np.asarray(d, dtype=np.float64) for d, _ in batch])
    counts = np.stack([np.asarray(u, dtype=np.float64) for _, u in batch])
    result = elbo_batch_full(doc_reprs, counts, model, prior, num_samples, rng)
    return result["elbo"], result["grads"]


# ---------------------------------------------------------------- inference

def doc_topics(
    doc_repr: np.ndarray,
    model: TntmModel,
    mc_samples: int = 0,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Topic proportions for one document.

    By default the deterministic center softmax(mu_q); with ``mc_samples``
    set, the Monte Carlo posterior mean over reparametrized draws.
    """
    out = encode(doc_repr, model.encoder, mode="eval")
    if mc_samples <= 0:
        return softmax(out.mu_q)
    if rng is None:
        raise ValueError("mc_samples requires an rng")
    std = np.exp(0.5 * out.log_var_q)
    draws = out.mu_q + std * rng.standard_normal((mc_samples, out.mu_q.shape[0]))
    return np.mean(softmax(draws, axis=1), axis=0)


def top_words(log_beta_matrix: np.ndarray, k: int, t: int) -> list[tuple[int, float]]:
    """The t vocabulary indices with the largest log-likelihood under topic k.

    Sorted descending; ties broken by ascending vocabulary index.
    """
    lb = np.asarray(log_beta_matrix)
    if not 0 <= k < lb.shape[0]:
        raise TopicIndexOutOfRange(f"topic {k} out of range for K={lb.shape[0]}")
    if t > lb.shape[1]:
        raise ValueError(f"t={t} exceeds vocabulary size {lb.shape[1]}")
    row = lb[k]
    order = np.lexsort((np.arange(row.shape[0]), -row))
    return [(int(i), float(row[i])) for i in order[:t]]


# ---------------------------------------------------------------- generation

@dataclass(frozen=True)
class SyntheticDoc:
    """Ground truth for one generated document."""

    theta_true: np.ndarray
    zeta: tuple[int, ...]
    embeddings: np.ndarray
    nearest_word_indices: tuple[int, ...]


def generate_synthetic(
    phi: TopicParams,
    prior: PriorSpec,
    vocab_embeddings: np.ndarray,
    m: int,
    doc_len: int,
    seed: int,
    vocabulary: Vocabulary | None = None,
) -> tuple[Corpus, list[SyntheticDoc]]:
    """Sample a corpus from the generative process, snapping to the vocabulary.

    Per document: theta from the logistic-normal prior, a topic per word
    position, an embedding from that topic's Gaussian, then the nearest
    vocabulary embedding (Euclidean) as the emitted discrete word. The
    snapping step is oracle machinery bridging continuous embeddings and
    bag-of-words training data; ground truth is kept alongside.
    """
    emb = np.asarray(vocab_embeddings, dtype=np.float64)
    if emb.ndim != 2 or emb.shape[1] != phi.p:
        raise DimensionMismatch(
            f"vocab embeddings {emb.shape} incompatible with embedding dim {phi.p}"
        )
    if vocabulary is None:
        width = max(5, len(str(emb.shape[0] - 1)))
        vocabulary = Vocabulary(tokens=tuple(f"w{i:0{width}d}" for i in range(emb.shape[0])))
    if len(vocabulary) != emb.shape[0]:
        raise DimensionMismatch("vocabulary and embedding row count differ")

    rng = np.random.default_rng(seed)
    chols = phi.cholesky_factors()
    emb_sq = np.sum(emb * emb, axis=1)

    documents = []
    truths: list[SyntheticDoc] = []
    id_width = max(5, len(str(max(m - 1, 0))))
    for d in range(m):
        eta = prior.mu + np.sqrt(prior.var) * rng.standard_normal(prior.k)
        theta = softmax(eta)
        zeta = rng.choice(phi.k, size=doc_len, p=theta)
        noise = rng.standard_normal((doc_len, phi.p))
        omegas = np.empty((doc_len, phi.p))
        for i in range(doc_len):
            z = int(zeta[i])
            omegas[i] = phi.mu[z] + chols[z].lower @ noise[i]
        # nearest vocabulary embedding per position (squared Euclidean)
        d2 = emb_sq[None, :] - 2.0 * omegas @ emb.T
        snapped = np.argmin(d2, axis=1)

        indices = [int(v) for v in snapped]
        bow: dict[int, int] = {}
        for idx in indices:
            bow[idx] = bow.get(idx, 0) + 1
        documents.append(
            Document(doc_id=f"d{d:0{id_width}d}", word_sequence=tuple(indices), bow=bow)
        )
        truths.append(
            SyntheticDoc(
                theta_true=theta,
                zeta=tuple(int(z) for z in zeta),
                embeddings=omegas,
                nearest_word_indices=tuple(indices),
            )
        )
    corpus = Corpus(documents=tuple(documents), vocabulary=vocabulary)
    return corpus, truths
