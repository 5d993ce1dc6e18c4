"""Command-line front end: init, train, topics, infer, eval, synth.

Module errors print one machine-parsable line ``ERR <code>: <msg>`` and
exit 1; configuration and IO problems exit 2. Every command echoes its
effective configuration to ``<out>/config.json`` and is deterministic for
a fixed ``--seed`` (``--threads 1`` pins the BLAS thread count, which is
set before numpy is imported; heavy imports are therefore local to the
command functions).
"""

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import NonFiniteValue, TntmError


def _set_threads(n: int) -> None:
    for var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
        "VECLIB_MAXIMUM_THREADS",
    ):
        os.environ[var] = str(n)


def _echo_config(out_dir: Path, args: argparse.Namespace) -> None:
    payload = {
        key: (str(value) if isinstance(value, Path) else value)
        for key, value in vars(args).items()
        if key != "func"
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "config.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _dump_json(path: Path, payload) -> None:
    try:
        text = json.dumps(payload, sort_keys=True, allow_nan=False, ensure_ascii=False)
    except ValueError as exc:
        raise NonFiniteValue(f"refusing to write NaN/Inf into {path.name}") from exc
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
        fh.write("\n")


def _load_aligned_embeddings(path, vocab, allow_missing=False):
    """Read an embedding matrix aligned to the vocabulary.

    All-zero rows mark words the preparation tool never found; they are
    rejected unless --allow-missing was passed, since a zero embedding
    poisons cosine metrics and density evaluations silently.
    """
    import numpy as np

    from . import tensorio

    emb = tensorio.read_matrix(path)
    if emb.shape[0] != len(vocab):
        raise TntmError(
            f"embedding rows ({emb.shape[0]}) != vocabulary size ({len(vocab)})"
        )
    if not allow_missing:
        zero_rows = np.flatnonzero(~np.any(emb != 0.0, axis=1))
        if zero_rows.size:
            shown = ", ".join(vocab.tokens[i] for i in zero_rows[:5])
            raise TntmError(
                f"{zero_rows.size} all-zero embedding rows (first: {shown}); "
                "pass --allow-missing to accept them"
            )
    return emb.astype("float64")


# ------------------------------------------------------------------ commands

def cmd_init(args) -> int:
    from . import corpus as corpus_mod
    from . import gmm as gmm_mod
    from . import model as model_mod
    from . import numkernel, tensorio

    if args.k < 2:
        raise TntmError("at least 2 topics are required for training")
    out = Path(args.out)
    _echo_config(out, args)
    vocab = corpus_mod.read_vocab(args.vocab)
    emb = _load_aligned_embeddings(args.word_emb, vocab, args.allow_missing)

    if args.pca_dim is not None:
        emb = numkernel.pca_reduce(emb, args.pca_dim)
        tensorio.write_matrix(out / "word_emb_reduced.tntm", emb)
        print(f"wrote {out / 'word_emb_reduced.tntm'} ({emb.shape[0]}x{emb.shape[1]}); "
              "pass it as --word-emb to later commands")

    fit = gmm_mod.fit_gmm(
        emb,
        k=args.k,
        seed=args.seed,
        max_iter=args.gmm_max_iter,
        tol=args.gmm_tol,
        reg_covar=args.gmm_reg_covar,
    )
    print(
        f"gmm: loglik={fit.final_loglik:.4f} iters={fit.n_iter} "
        f"converged={fit.converged} restarts={fit.n_restarts}"
    )
    topics = gmm_mod.to_topic_params(fit)

    docvec_dim = None
    if args.encoder == "docvec":
        if args.doc_emb is None:
            raise TntmError("--encoder docvec requires --doc-emb to size the network")
        docvec_dim = tensorio.read_matrix(args.doc_emb).shape[1]

    model = model_mod.init_model(
        topics=topics,
        vocab_size=len(vocab),
        encoder_mode=args.encoder,
        docvec_dim=docvec_dim,
        prior_alpha=args.alpha,
        seed=args.seed,
    )
    log_b = model_mod.log_beta(topics, emb)
    for k in range(topics.k):
        words = [vocab.tokens[i] for i, _ in model_mod.top_words(log_b, k, 5)]
        print(f"topic {k}: {' '.join(words)}")

    tensorio.save_checkpoint(out / "init.ckpt", model)
    print(f"wrote {out / 'init.ckpt'}")
    return 0


def cmd_train(args) -> int:
    from . import corpus as corpus_mod
    from . import tensorio
    from . import train as train_mod

    out = Path(args.out)
    _echo_config(out, args)
    vocab = corpus_mod.read_vocab(args.vocab)
    corpus = corpus_mod.read_corpus_jsonl(args.corpus, vocab)
    emb = _load_aligned_embeddings(args.word_emb, vocab, args.allow_missing)
    model = tensorio.load_checkpoint(args.ckpt)

    doc_emb = None
    if model.encoder.config.mode == "docvec":
        if args.doc_emb is None:
            raise TntmError("checkpoint uses the docvec encoder; --doc-emb is required")
        doc_emb = tensorio.read_matrix(args.doc_emb).astype("float64")

    config = train_mod.TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        lr_encoder=args.lr_encoder,
        lr_topics=args.lr_topics,
        clip_norm=args.clip_norm,
        num_samples=args.samples,
        seed=args.seed,
    )
    model, history = train_mod.train(
        corpus,
        emb,
        config,
        init=model,
        doc_embeddings=doc_emb,
        out_dir=out,
        checkpoint_every=args.checkpoint_every,
    )
    tensorio.save_checkpoint(out / "model.ckpt", model)
    last = history[-1]
    print(
        f"trained {config.epochs} epochs: elbo/doc={last['elbo']:.4f} "
        f"kl/doc={last['kl']:.4f} collapse_stat={last['collapse_stat']:.4f}"
    )
    print(f"wrote {out / 'model.ckpt'} and {out / 'history.jsonl'}")
    return 0


def cmd_topics(args) -> int:
    from . import corpus as corpus_mod
    from . import model as model_mod
    from . import tensorio

    out = Path(args.out)
    _echo_config(out, args)
    vocab = corpus_mod.read_vocab(args.vocab)
    emb = _load_aligned_embeddings(args.word_emb, vocab, args.allow_missing)
    model = tensorio.load_checkpoint(args.ckpt)
    log_b = model_mod.log_beta(model.topics, emb)

    payload = {"topics": []}
    for k in range(model.k):
        entries = [
            {"token": vocab.tokens[i], "log_likelihood": value}
            for i, value in model_mod.top_words(log_b, k, args.t)
        ]
        payload["topics"].append({"id": k, "top_words": entries})
    _dump_json(out / "topics.json", payload)
    print(f"wrote {out / 'topics.json'}")
    return 0


def cmd_infer(args) -> int:
    import numpy as np

    from . import corpus as corpus_mod
    from . import model as model_mod
    from . import tensorio
    from .corpus import bow_vector

    out = Path(args.out)
    _echo_config(out, args)
    vocab = corpus_mod.read_vocab(args.vocab)
    corpus = corpus_mod.read_corpus_jsonl(args.corpus, vocab)
    model = tensorio.load_checkpoint(args.ckpt)

    if model.encoder.config.mode == "docvec":
        if args.doc_emb is None:
            raise TntmError("checkpoint uses the docvec encoder; --doc-emb is required")
        reprs = tensorio.read_matrix(args.doc_emb).astype("float64")
        if reprs.shape[0] != len(corpus):
            raise TntmError(
                f"{reprs.shape[0]} document embeddings for {len(corpus)} documents"
            )
    else:
        reprs = np.stack(
            [bow_vector(doc, len(vocab)) for doc in corpus.documents]
        )

    with open(out / "theta.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for i, doc in enumerate(corpus.documents):
            theta = model_mod.doc_topics(reprs[i], model)
            if not np.all(np.isfinite(theta)):
                raise NonFiniteValue(f"theta for doc {doc.doc_id} is not finite")
            fh.write(
                json.dumps({"doc_id": doc.doc_id, "theta": [float(x) for x in theta]})
            )
            fh.write("\n")
    print(f"wrote {out / 'theta.jsonl'}")
    return 0


def cmd_eval(args) -> int:
    from . import corpus as corpus_mod
    from . import metrics as metrics_mod

    out = Path(args.out)
    _echo_config(out, args)
    vocab = corpus_mod.read_vocab(args.vocab)
    corpus = corpus_mod.read_corpus_jsonl(args.corpus, vocab)
    emb = _load_aligned_embeddings(args.eval_emb, vocab, args.allow_missing)

    with open(args.topics, "r", encoding="utf-8") as fh:
        topics_payload = json.load(fh)
    index_lists = []
    for topic in topics_payload["topics"]:
        indices = []
        for entry in topic["top_words"]:
            token = entry["token"]
            if token not in vocab:
                raise TntmError(f"top-word {token!r} is not in the vocabulary")
            indices.append(vocab.index(token))
        index_lists.append(indices)

    def clipped(t):
        avail = min(t, min(len(words) for words in index_lists))
        return [words[:avail] for words in index_lists], avail

    warnings: list[str] = []
    coh_topics, t_coh = clipped(args.t_coherence)
    div_topics, t_div = clipped(args.t_diversity)
    if t_coh < args.t_coherence or t_div < args.t_diversity:
        warnings.append(
            f"topics.json provides only {t_coh if t_coh < args.t_coherence else t_div} "
            "words per topic; metrics use the available prefix"
        )
    payload = {
        "embedding_coherence": metrics_mod.embedding_coherence(coh_topics, emb),
        "topic_diversity": metrics_mod.topic_diversity(div_topics),
        "embedding_diversity": metrics_mod.embedding_diversity(div_topics, emb),
        "npmi": metrics_mod.npmi_coherence(
            coh_topics, corpus, t=t_coh, warnings=warnings
        ),
        "t_coherence": t_coh,
        "t_diversity": t_div,
        "warnings": warnings,
    }
    _dump_json(out / "metrics.json", payload)
    print(f"wrote {out / 'metrics.json'}")
    return 0


def cmd_synth(args) -> int:
    from . import corpus as corpus_mod
    from . import synth as synth_mod
    from . import tensorio

    out = Path(args.out)
    _echo_config(out, args)
    instance = synth_mod.make_planted_instance(
        k=args.k,
        vocab_size=args.vocab_size,
        embed_dim=args.p,
        seed=args.seed,
        separation=args.separation,
        sigma=args.sigma,
        alpha=args.alpha,
    )
    corpus, truths = synth_mod.synth_corpus(
        instance, m=args.m, doc_len=args.doc_len, seed=args.seed + 1
    )

    corpus_mod.write_vocab(out / "vocab.txt", corpus.vocabulary)
    corpus_mod.write_corpus_jsonl(out / "corpus.jsonl", corpus)
    tensorio.write_matrix(out / "word_emb.tntm", instance.vocab_embeddings)
    tensorio.write_matrix(out / "truth_topic_mu.tntm", instance.topics.mu)
    with open(out / "truth_theta.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for doc, truth in zip(corpus.documents, truths):
            fh.write(
                json.dumps(
                    {
                        "doc_id": doc.doc_id,
                        "theta_true": [float(x) for x in truth.theta_true],
                        "dominant": int(max(range(len(truth.theta_true)),
                                            key=lambda j: truth.theta_true[j])),
                        "zeta": list(truth.zeta),
                    }
                )
            )
            fh.write("\n")
    print(
        f"wrote planted corpus to {out} "
        f"(K={args.k}, N={args.vocab_size}, P={args.p}, M={args.m})"
    )
    return 0


# ------------------------------------------------------------------ parser

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--allow-missing", action="store_true",
                     help="accept all-zero embedding rows (missing words)")
    sub.add_argument("--threads", type=int, default=0,
                     help="BLAS thread cap; 1 guarantees bit-determinism")
    sub.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tntm", description="Gaussian-topic model over word embeddings"
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("init", help="GMM-seed topic parameters, write init checkpoint")
    p.add_argument("--vocab", required=True)
    p.add_argument("--word-emb", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--encoder", choices=("bow", "docvec"), default="bow")
    p.add_argument("--doc-emb", default=None)
    p.add_argument("--pca-dim", type=int, default=None,
                   help="reduce embeddings with PCA before clustering")
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--gmm-max-iter", type=int, default=100)
    p.add_argument("--gmm-tol", type=float, default=1e-3)
    p.add_argument("--gmm-reg-covar", type=float, default=1e-6)
    _add_common(p)
    p.set_defaults(func=cmd_init)

    p = subs.add_parser("train", help="train from an init checkpoint")
    p.add_argument("--vocab", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--word-emb", required=True)
    p.add_argument("--doc-emb", default=None)
    p.add_argument("--ckpt", required=True)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--lr-encoder", type=float, default=1e-3)
    p.add_argument("--lr-topics", type=float, default=1e-4)
    p.add_argument("--clip-norm", type=float, default=5.0)
    p.add_argument("--samples", type=int, default=1, help="Monte Carlo samples per doc")
    p.add_argument("--checkpoint-every", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = subs.add_parser("topics", help="write top words per topic")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--word-emb", required=True)
    p.add_argument("--t", type=int, default=20)
    _add_common(p)
    p.set_defaults(func=cmd_topics)

    p = subs.add_parser("infer", help="document-topic proportions")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--doc-emb", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_infer)

    p = subs.add_parser("eval", help="topic-quality metrics")
    p.add_argument("--topics", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--eval-emb", required=True)
    p.add_argument("--t-coherence", type=int, default=10)
    p.add_argument("--t-diversity", type=int, default=20)
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = subs.add_parser("synth", help="generate a planted synthetic corpus")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--vocab-size", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--doc-len", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--sigma", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads and args.threads > 0:
        _set_threads(args.threads)
    try:
        return args.func(args)
    except TntmError as exc:
        print(f"ERR {exc.code}: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"ERR Config: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
