"""Inference network: initial linear layer, skip blocks, two output heads.

Each skip block is linear -> LeakyReLU -> residual add of the block input
-> batch normalization -> dropout. The residual add applies when the block
input width equals the block width (with the default bag-of-words sizes the
first block changes width, so only later blocks carry the skip). Forward
and backward passes are written directly in numpy so gradients are exact
and the whole path stays in float64.

Parameter names double as checkpoint tensor names:
    enc.linear0.{w,b}
    enc.block{i}.{linear.w,linear.b,bn.gamma,bn.beta,bn.run_mean,bn.run_var}
    enc.head_mu.{w,b}, enc.head_logvar.{w,b}
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, UninitializedBatchStats


@dataclass(frozen=True)
class EncoderConfig:
    input_dim: int
    hidden0: int
    block_widths: tuple[int, ...]
    out_dim: int
    mode: str  # "bow" | "docvec"
    dropout: float = 0.3
    leaky_slope: float = 0.01
    bn_eps: float = 1e-5
    bn_momentum: float = 0.1

    def __post_init__(self):
        if self.mode not in ("bow", "docvec"):
            raise ValueError(f"mode must be 'bow' or 'docvec', got {self.mode!r}")

    @staticmethod
    def bow(vocab_size: int, k: int, block_widths: tuple[int, ...] = (200, 200), **kw):
        """Default bag-of-words encoder: first layer as wide as the vocabulary."""
        return EncoderConfig(
            input_dim=vocab_size,
            hidden0=vocab_size,
            block_widths=tuple(block_widths),
            out_dim=k,
            mode="bow",
            **kw,
        )

    @staticmethod
    def docvec(input_dim: int, k: int, block_widths: tuple[int, ...] = (200, 200), **kw):
        """Document-embedding encoder: small trunk, no dropout."""
        trunk = block_widths[0] if block_widths else 200
        return EncoderConfig(
            input_dim=input_dim,
            hidden0=trunk,
            block_widths=tuple(block_widths),
            out_dim=k,
            mode="docvec",
            **kw,
        )

    @property
    def widths(self) -> tuple[int, ...]:
        """Widths along the trunk: initial layer then each block."""
        return (self.hidden0, *self.block_widths)

    @property
    def dropout_active(self) -> bool:
        # dropout is a bow-mode feature; the docvec trunk runs without it
        return self.mode == "bow" and self.dropout > 0.0


@dataclass(frozen=True)
class EncoderOutput:
    """Variational parameters for one document: mean and log-variance diag."""

    mu_q: np.ndarray
    log_var_q: np.ndarray


def _linear_init(rng: np.random.Generator, fan_in: int, fan_out: int):
    bound = 1.0 / np.sqrt(fan_in)
    w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
    b = rng.uniform(-bound, bound, size=fan_out)
    return w, b


class EncoderNetwork:
    """Holds parameters and batch-norm state; forward/backward over batches."""

    def __init__(
        self,
        config: EncoderConfig,
        params: dict[str, np.ndarray],
        batches_tracked: int = 0,
    ):
        self.config = config
        self.params = params
        self.batches_tracked = batches_tracked

    # ------------------------------------------------------------ creation

    @classmethod
    def init_random(cls, config: EncoderConfig, rng: np.random.Generator):
        params: dict[str, np.ndarray] = {}
        params["enc.linear0.w"], params["enc.linear0.b"] = _linear_init(
            rng, config.input_dim, config.hidden0
        )
        prev = config.hidden0
        for i, width in enumerate(config.block_widths):
            w, b = _linear_init(rng, prev, width)
            params[f"enc.block{i}.linear.w"] = w
            params[f"enc.block{i}.linear.b"] = b
            params[f"enc.block{i}.bn.gamma"] = np.ones(width)
            params[f"enc.block{i}.bn.beta"] = np.zeros(width)
            params[f"enc.block{i}.bn.run_mean"] = np.zeros(width)
            params[f"enc.block{i}.bn.run_var"] = np.ones(width)
            prev = width
        for head in ("head_mu", "head_logvar"):
            w, b = _linear_init(rng, prev, config.out_dim)
            params[f"enc.{head}.w"] = w
            params[f"enc.{head}.b"] = b
        return cls(config=config, params=params, batches_tracked=0)

    # ------------------------------------------------------------ naming

    def parameter_names(self) -> list[str]:
        """Trainable tensors, in a fixed order."""
        names = ["enc.linear0.w", "enc.linear0.b"]
        for i in range(len(self.config.block_widths)):
            names += [
                f"enc.block{i}.linear.w",
                f"enc.block{i}.linear.b",
                f"enc.block{i}.bn.gamma",
                f"enc.block{i}.bn.beta",
            ]
        names += ["enc.head_mu.w", "enc.head_mu.b", "enc.head_logvar.w", "enc.head_logvar.b"]
        return names

    def state_names(self) -> list[str]:
        """Non-trainable batch-norm statistics."""
        names = []
        for i in range(len(self.config.block_widths)):
            names += [f"enc.block{i}.bn.run_mean", f"enc.block{i}.bn.run_var"]
        return names

    def named_parameters(self) -> dict[str, np.ndarray]:
        return {name: self.params[name] for name in self.parameter_names()}

    def named_tensors(self) -> dict[str, np.ndarray]:
        return {name: self.params[name] for name in self.parameter_names() + self.state_names()}

    def copy(self) -> "EncoderNetwork":
        return EncoderNetwork(
            config=self.config,
            params={k: v.copy() for k, v in self.params.items()},
            batches_tracked=self.batches_tracked,
        )

    # ------------------------------------------------------------ forward

    def forward_batch(
        self,
        x: np.ndarray,
        train: bool,
        rng: np.random.Generator | None = None,
        update_stats: bool = True,
        return_cache: bool = False,
    ):
        """Run the network on a (batch, input_dim) matrix.

        Train mode normalizes with batch statistics, applies dropout (bow
        mode), and, when ``update_stats`` is set, advances the running
        batch-norm statistics. Eval mode uses running statistics and is
        deterministic; it requires at least one tracked training batch.
        """
        cfg = self.config
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != cfg.input_dim:
            raise DimensionMismatch(
                f"input has shape {x.shape}, expected (batch, {cfg.input_dim})"
            )
        if not train and self.batches_tracked == 0:
            raise UninitializedBatchStats(
                "eval-mode forward before any training batch was tracked"
            )
        if train and cfg.dropout_active and rng is None:
            raise ValueError("train-mode forward with dropout requires an rng")

        p = self.params
        h = x @ p["enc.linear0.w"] + p["enc.linear0.b"]
        cache = {"x": x, "train": train, "blocks": []} if return_cache else None

        batch = x.shape[0]
        for i in range(len(cfg.block_widths)):
            z = h @ p[f"enc.block{i}.linear.w"] + p[f"enc.block{i}.linear.b"]
            act = np.where(z > 0.0, z, cfg.leaky_slope * z)
            residual = h.shape[1] == z.shape[1]
            s = act + h if residual else act

            if train:
                mean = s.mean(axis=0)
                var = s.var(axis=0)  # biased, as used for normalization
                if update_stats:
                    unbiased = var * batch / (batch - 1) if batch > 1 else var
                    m = cfg.bn_momentum
                    p[f"enc.block{i}.bn.run_mean"] *= 1.0 - m
                    p[f"enc.block{i}.bn.run_mean"] += m * mean
                    p[f"enc.block{i}.bn.run_var"] *= 1.0 - m
                    p[f"enc.block{i}.bn.run_var"] += m * unbiased
            else:
                mean = p[f"enc.block{i}.bn.run_mean"]
                var = p[f"enc.block{i}.bn.run_var"]
            inv_std = 1.0 / np.sqrt(var + cfg.bn_eps)
            x_hat = (s - mean) * inv_std
            y = p[f"enc.block{i}.bn.gamma"] * x_hat + p[f"enc.block{i}.bn.beta"]

            if train and cfg.dropout_active:
                keep = 1.0 - cfg.dropout
                mask = (rng.random(y.shape) < keep) / keep
                out = y * mask
            else:
                mask = None
                out = y

            if cache is not None:
                cache["blocks"].append(
                    {
                        "h_in": h,
                        "z": z,
                        "residual": residual,
                        "x_hat": x_hat,
                        "inv_std": inv_std,
                        "mask": mask,
                    }
                )
            h = out

        if train and update_stats and cfg.block_widths:
            self.batches_tracked += 1

        mu_q = h @ p["enc.head_mu.w"] + p["enc.head_mu.b"]
        log_var = h @ p["enc.head_logvar.w"] + p["enc.head_logvar.b"]
        if cache is not None:
            cache["h_last"] = h
        return mu_q, log_var, cache

    # ------------------------------------------------------------ backward

    def backward_batch(
        self, cache: dict, d_mu_q: np.ndarray, d_log_var: np.ndarray
    ) -> dict[str, np.ndarray]:
        """Backpropagate head gradients through the trunk.

        ``cache`` must come from a train-mode forward with return_cache=True;
        batch-norm gradients are taken through the batch statistics.
        """
        cfg = self.config
        p = self.params
        grads: dict[str, np.ndarray] = {}
        h_last = cache["h_last"]

        grads["enc.head_mu.w"] = h_last.T @ d_mu_q
        grads["enc.head_mu.b"] = d_mu_q.sum(axis=0)
        grads["enc.head_logvar.w"] = h_last.T @ d_log_var
        grads["enc.head_logvar.b"] = d_log_var.sum(axis=0)
        dh = d_mu_q @ p["enc.head_mu.w"].T + d_log_var @ p["enc.head_logvar.w"].T

        for i in reversed(range(len(cfg.block_widths))):
            blk = cache["blocks"][i]
            dy = dh * blk["mask"] if blk["mask"] is not None else dh

            gamma = p[f"enc.block{i}.bn.gamma"]
            x_hat = blk["x_hat"]
            grads[f"enc.block{i}.bn.gamma"] = np.sum(dy * x_hat, axis=0)
            grads[f"enc.block{i}.bn.beta"] = np.sum(dy, axis=0)
            dx_hat = dy * gamma
            if cache["train"]:
                b = x_hat.shape[0]
                ds = (
                    blk["inv_std"]
                    / b
                    * (
                        b * dx_hat
                        - np.sum(dx_hat, axis=0)
                        - x_hat * np.sum(dx_hat * x_hat, axis=0)
                    )
                )
            else:
                ds = dx_hat * blk["inv_std"]

            dh_in = ds.copy() if blk["residual"] else np.zeros_like(blk["h_in"])
            dz = ds * np.where(blk["z"] > 0.0, 1.0, cfg.leaky_slope)
            grads[f"enc.block{i}.linear.w"] = blk["h_in"].T @ dz
            grads[f"enc.block{i}.linear.b"] = dz.sum(axis=0)
            dh_in += dz @ p[f"enc.block{i}.linear.w"].T
            dh = dh_in

        grads["enc.linear0.w"] = cache["x"].T @ dh
        grads["enc.linear0.b"] = dh.sum(axis=0)
        return grads


def encode(
    doc_repr: np.ndarray,
    network: EncoderNetwork,
    mode: str = "eval",
    rng: np.random.Generator | None = None,
) -> EncoderOutput:
    """Compute the variational parameters for a single document."""
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    doc = np.asarray(doc_repr, dtype=np.float64)
    if doc.ndim != 1:
        raise DimensionMismatch(f"doc_repr must be a vector, got shape {doc.shape}")
    mu_q, log_var, _ = network.forward_batch(
        doc[None, :], train=(mode == "train"), rng=rng, update_stats=False
    )
    return EncoderOutput(mu_q=mu_q[0], log_var_q=log_var[0])
