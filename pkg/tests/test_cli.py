"""Command-line pipeline: composition, determinism, error codes."""

import json

import numpy as np
import pytest

from tntm.cli import main


def _run(argv):
    return main(argv)


def _synth_args(out, seed=5, k=3, vocab=30, p=3, m=60, doc_len=15):
    return [
        "synth",
        "--k", str(k),
        "--vocab-size", str(vocab),
        "--p", str(p),
        "--m", str(m),
        "--doc-len", str(doc_len),
        "--seed", str(seed),
        "--out", str(out),
    ]


class TestSynth:
    def test_deterministic_byte_identical(self, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert _run(_synth_args(out_a)) == 0
        assert _run(_synth_args(out_b)) == 0
        for name in ("vocab.txt", "corpus.jsonl", "word_emb.tntm",
                     "truth_topic_mu.tntm", "truth_theta.jsonl"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name

    def test_outputs_parse(self, tmp_path):
        out = tmp_path / "s"
        assert _run(_synth_args(out)) == 0
        from tntm import tensorio
        from tntm.corpus import read_corpus_jsonl, read_vocab

        vocab = read_vocab(out / "vocab.txt")
        corpus = read_corpus_jsonl(out / "corpus.jsonl", vocab)
        emb = tensorio.read_matrix(out / "word_emb.tntm")
        assert emb.shape == (30, 3)
        assert len(corpus) <= 60  # documents generated
        assert (out / "config.json").exists()


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """synth -> init -> train once; later tests read the artifacts."""
    root = tmp_path_factory.mktemp("pipeline")
    data = root / "data"
    assert _run(_synth_args(data, seed=11, m=80)) == 0
    init_dir = root / "init"
    assert _run([
        "init",
        "--vocab", str(data / "vocab.txt"),
        "--word-emb", str(data / "word_emb.tntm"),
        "--k", "3",
        "--seed", "13",
        "--out", str(init_dir),
    ]) == 0
    train_dir = root / "train"
    assert _run([
        "train",
        "--vocab", str(data / "vocab.txt"),
        "--corpus", str(data / "corpus.jsonl"),
        "--word-emb", str(data / "word_emb.tntm"),
        "--ckpt", str(init_dir / "init.ckpt"),
        "--epochs", "3",
        "--batch-size", "16",
        "--seed", "13",
        "--out", str(train_dir),
    ]) == 0
    return {"data": data, "init": init_dir, "train": train_dir, "root": root}


class TestPipeline:
    def test_init_writes_checkpoint_and_config(self, pipeline):
        assert (pipeline["init"] / "init.ckpt").exists()
        assert (pipeline["init"] / "config.json").exists()

    def test_train_outputs(self, pipeline):
        assert (pipeline["train"] / "model.ckpt").exists()
        lines = (pipeline["train"] / "history.jsonl").read_text().strip().split("\n")
        assert len(lines) == 3
        row = json.loads(lines[-1])
        assert np.isfinite(row["elbo"])

    def test_topics_output(self, pipeline):
        out = pipeline["root"] / "topics"
        assert _run([
            "topics",
            "--ckpt", str(pipeline["train"] / "model.ckpt"),
            "--vocab", str(pipeline["data"] / "vocab.txt"),
            "--word-emb", str(pipeline["data"] / "word_emb.tntm"),
            "--t", "10",
            "--out", str(out),
        ]) == 0
        payload = json.loads((out / "topics.json").read_text())
        assert len(payload["topics"]) == 3
        for topic in payload["topics"]:
            assert len(topic["top_words"]) == 10
            lls = [w["log_likelihood"] for w in topic["top_words"]]
            assert lls == sorted(lls, reverse=True)

    def test_infer_rows_sum_to_one(self, pipeline):
        out = pipeline["root"] / "infer"
        assert _run([
            "infer",
            "--ckpt", str(pipeline["train"] / "model.ckpt"),
            "--vocab", str(pipeline["data"] / "vocab.txt"),
            "--corpus", str(pipeline["data"] / "corpus.jsonl"),
            "--out", str(out),
        ]) == 0
        for line in (out / "theta.jsonl").read_text().strip().split("\n"):
            row = json.loads(line)
            assert abs(sum(row["theta"]) - 1.0) < 1e-9

    def test_eval_metrics(self, pipeline):
        topics_dir = pipeline["root"] / "topics"
        out = pipeline["root"] / "eval"
        assert _run([
            "eval",
            "--topics", str(topics_dir / "topics.json"),
            "--vocab", str(pipeline["data"] / "vocab.txt"),
            "--corpus", str(pipeline["data"] / "corpus.jsonl"),
            "--eval-emb", str(pipeline["data"] / "word_emb.tntm"),
            "--t-coherence", "5",
            "--t-diversity", "10",
            "--out", str(out),
        ]) == 0
        metrics = json.loads((out / "metrics.json").read_text())
        assert set(metrics) == {
            "embedding_coherence",
            "topic_diversity",
            "embedding_diversity",
            "npmi",
            "t_coherence",
            "t_diversity",
            "warnings",
        }
        assert -1.0 <= metrics["npmi"] <= 1.0


class TestEvalDirect:
    def test_disjoint_topics_have_diversity_one(self, tmp_path):
        data = tmp_path / "data"
        assert _run(_synth_args(data, seed=21, k=3, vocab=30)) == 0
        from tntm.corpus import read_vocab

        vocab = read_vocab(data / "vocab.txt")
        topics_payload = {
            "topics": [
                {
                    "id": k,
                    "top_words": [
                        {"token": vocab.tokens[k * 10 + j], "log_likelihood": -float(j)}
                        for j in range(10)
                    ],
                }
                for k in range(3)
            ]
        }
        (tmp_path / "topics.json").write_text(json.dumps(topics_payload))
        out = tmp_path / "eval"
        assert _run([
            "eval",
            "--topics", str(tmp_path / "topics.json"),
            "--vocab", str(data / "vocab.txt"),
            "--corpus", str(data / "corpus.jsonl"),
            "--eval-emb", str(data / "word_emb.tntm"),
            "--t-coherence", "5",
            "--t-diversity", "10",
            "--out", str(out),
        ]) == 0
        metrics = json.loads((out / "metrics.json").read_text())
        assert metrics["topic_diversity"] == 1.0


class TestErrorCodes:
    def test_missing_file_exits_2(self, tmp_path, capsys):
        code = _run([
            "init",
            "--vocab", str(tmp_path / "nope.txt"),
            "--word-emb", str(tmp_path / "nope.tntm"),
            "--k", "3",
            "--out", str(tmp_path / "out"),
        ])
        assert code == 2
        assert "ERR" in capsys.readouterr().err

    def test_bad_magic_exits_1(self, tmp_path, capsys):
        data = tmp_path / "data"
        assert _run(_synth_args(data, seed=31)) == 0
        bad = tmp_path / "bad.tntm"
        bad.write_bytes(b"XXXX" + bytes(40))
        code = _run([
            "init",
            "--vocab", str(data / "vocab.txt"),
            "--word-emb", str(bad),
            "--k", "3",
            "--out", str(tmp_path / "out"),
        ])
        assert code == 1
        assert "ERR BadMagic:" in capsys.readouterr().err

    def test_docvec_without_doc_emb_exits_1(self, tmp_path, capsys):
        data = tmp_path / "data"
        assert _run(_synth_args(data, seed=33)) == 0
        code = _run([
            "init",
            "--vocab", str(data / "vocab.txt"),
            "--word-emb", str(data / "word_emb.tntm"),
            "--k", "3",
            "--encoder", "docvec",
            "--out", str(tmp_path / "out"),
        ])
        assert code == 1
        assert "ERR" in capsys.readouterr().err


class TestPcaPath:
    def test_init_with_pca_dim_writes_reduced(self, tmp_path):
        data = tmp_path / "data"
        assert _run(_synth_args(data, seed=41, p=6)) == 0
        out = tmp_path / "init"
        assert _run([
            "init",
            "--vocab", str(data / "vocab.txt"),
            "--word-emb", str(data / "word_emb.tntm"),
            "--k", "3",
            "--pca-dim", "2",
            "--seed", "7",
            "--out", str(out),
        ]) == 0
        from tntm import tensorio

        reduced = tensorio.read_matrix(out / "word_emb_reduced.tntm")
        assert reduced.shape == (30, 2)
        model = tensorio.load_checkpoint(out / "init.ckpt")
        assert model.p == 2


class TestZeroRowGuard:
    def test_zero_embedding_row_rejected_unless_allowed(self, tmp_path, capsys):
        data = tmp_path / "data"
        assert _run(_synth_args(data, seed=51)) == 0
        from tntm import tensorio

        emb = tensorio.read_matrix(data / "word_emb.tntm").astype(float)
        emb[4, :] = 0.0  # mark one word as never-found
        tensorio.write_matrix(data / "word_emb_zero.tntm", emb)

        argv = [
            "init",
            "--vocab", str(data / "vocab.txt"),
            "--word-emb", str(data / "word_emb_zero.tntm"),
            "--k", "3",
            "--out", str(tmp_path / "out"),
        ]
        assert _run(argv) == 1
        err = capsys.readouterr().err
        assert "all-zero" in err and "--allow-missing" in err
        assert _run(argv + ["--allow-missing"]) == 0


class TestDocvecPipeline:
    def test_init_train_infer_with_doc_embeddings(self, tmp_path):
        data = tmp_path / "data"
        assert _run(_synth_args(data, seed=61, m=80)) == 0

        # document embeddings: mean word embedding per document
        from tntm import tensorio
        from tntm.corpus import bow_vector, read_corpus_jsonl, read_vocab

        vocab = read_vocab(data / "vocab.txt")
        corpus = read_corpus_jsonl(data / "corpus.jsonl", vocab)
        emb = tensorio.read_matrix(data / "word_emb.tntm").astype(float)
        counts = np.stack([bow_vector(d, len(vocab)) for d in corpus.documents])
        doc_emb = counts @ emb / counts.sum(axis=1, keepdims=True)
        tensorio.write_matrix(data / "doc_emb.tntm", doc_emb)

        init_dir = tmp_path / "init"
        assert _run([
            "init",
            "--vocab", str(data / "vocab.txt"),
            "--word-emb", str(data / "word_emb.tntm"),
            "--k", "3",
            "--encoder", "docvec",
            "--doc-emb", str(data / "doc_emb.tntm"),
            "--seed", "5",
            "--out", str(init_dir),
        ]) == 0

        train_dir = tmp_path / "train"
        assert _run([
            "train",
            "--vocab", str(data / "vocab.txt"),
            "--corpus", str(data / "corpus.jsonl"),
            "--word-emb", str(data / "word_emb.tntm"),
            "--doc-emb", str(data / "doc_emb.tntm"),
            "--ckpt", str(init_dir / "init.ckpt"),
            "--epochs", "2",
            "--batch-size", "16",
            "--seed", "5",
            "--out", str(train_dir),
        ]) == 0

        infer_dir = tmp_path / "infer"
        assert _run([
            "infer",
            "--ckpt", str(train_dir / "model.ckpt"),
            "--vocab", str(data / "vocab.txt"),
            "--corpus", str(data / "corpus.jsonl"),
            "--doc-emb", str(data / "doc_emb.tntm"),
            "--out", str(infer_dir),
        ]) == 0
        lines = (infer_dir / "theta.jsonl").read_text().strip().split("\n")
        assert len(lines) == len(corpus.documents)
        for line in lines:
            row = json.loads(line)
            assert abs(sum(row["theta"]) - 1.0) < 1e-9

    def test_train_docvec_without_doc_emb_fails(self, tmp_path, capsys):
        data = tmp_path / "data"
        assert _run(_synth_args(data, seed=63, m=40)) == 0
        from tntm import tensorio
        from tntm.corpus import read_vocab

        init_dir = tmp_path / "init"
        emb = tensorio.read_matrix(data / "word_emb.tntm").astype(float)
        tensorio.write_matrix(data / "doc_like.tntm", emb[:5, :])
        assert _run([
            "init",
            "--vocab", str(data / "vocab.txt"),
            "--word-emb", str(data / "word_emb.tntm"),
            "--k", "3",
            "--encoder", "docvec",
            "--doc-emb", str(data / "doc_like.tntm"),
            "--seed", "5",
            "--out", str(init_dir),
        ]) == 0
        code = _run([
            "train",
            "--vocab", str(data / "vocab.txt"),
            "--corpus", str(data / "corpus.jsonl"),
            "--word-emb", str(data / "word_emb.tntm"),
            "--ckpt", str(init_dir / "init.ckpt"),
            "--epochs", "1",
            "--out", str(tmp_path / "t"),
        ])
        assert code == 1
        assert "doc-emb" in capsys.readouterr().err
