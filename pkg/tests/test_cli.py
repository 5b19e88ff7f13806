import json
import subprocess
import sys

import pytest

from simdoc.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, run, sha256_file
from simdoc.embedding import build_topic_similarity_matrix, load_word_vectors
from simdoc.evaluation import PreparedCorpus, eval_triplets, make_scorer, read_triplets
from simdoc.lda import load_index, load_model
from simdoc.scoring import SimDocConfig
from simdoc.text import read_corpus


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Synthesize a small hard-mode corpus and train a model on it through the CLI."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data"
    assert run(["synth", "--out", str(data), "--mode", "hard", "--triplets", "20",
                "--seed", "3", "--quiet"]) == EXIT_OK
    model = root / "model.json"
    assert run(["train", "--corpus", str(data / "corpus.jsonl"), "--out", str(model),
                "--topics", "12", "--sweeps", "60", "--seed", "0", "--quiet"]) == EXIT_OK
    return root, data, model


def sentence_file(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestTrainAndIndex:
    def test_outputs(self, workspace):
        root, data, model = workspace
        assert load_model(model).num_topics == 12
        assert load_index(f"{model}.index.json").num_topics == 12
        manifest = json.loads((root / "model.json.manifest.json").read_text())
        assert manifest["command"] == "train"
        assert manifest["outputs"]["model"]["sha256"] == sha256_file(model)
        assert manifest["inputs"]["corpus"]["sha256"] == sha256_file(data / "corpus.jsonl")

    def test_manifest_reproduces_model(self, workspace, tmp_path):
        root, _, model = workspace
        manifest = root / "model.json.manifest.json"
        copy = tmp_path / "again.json"
        assert run(["train", "--config", str(manifest), "--out", str(copy), "--quiet"]) == EXIT_OK
        assert sha256_file(copy) == sha256_file(model)

    def test_index_command_writes_matrix(self, workspace, tmp_path):
        _, data, model = workspace
        out = tmp_path / "i.json"
        assert run(["index", "--model", str(model), "--out", str(out), "--embeddings",
                    str(data / "embeddings.txt"), "--quiet"]) == EXIT_OK
        assert out.is_file() and (tmp_path / "i.json.matrix.npz").is_file()

    def test_missing_corpus(self, tmp_path, capsys):
        code = run(["train", "--corpus", str(tmp_path / "none.jsonl"), "--out",
                    str(tmp_path / "m.json")])
        assert code == EXIT_DATA
        assert "none.jsonl" in capsys.readouterr().err

    def test_missing_required_option(self, capsys):
        assert run(["train", "--out", "m.json"]) == EXIT_USAGE
        assert "--corpus" in capsys.readouterr().err


class TestScore:
    def score(self, workspace, a, b, *extra):
        _, data, model = workspace
        return run(["score", str(a), str(b), "--model", str(model), "--embeddings",
                    str(data / "embeddings.txt"), "--quiet", *extra])

    def test_self_similarity_closed_form(self, workspace, tmp_path, capsys):
        _, data, _ = workspace
        text = read_corpus(data / "corpus.jsonl")[1]["text"]
        doc = sentence_file(tmp_path, "a.txt", text)
        capsys.readouterr()
        assert self.score(workspace, doc, doc, "--explain") == EXIT_OK
        out = capsys.readouterr().out
        value = float(out.splitlines()[0])
        detail = json.loads(out.split("\n", 1)[1])
        n = len(detail["segments_a"])
        assert value == pytest.approx(2 * 1.0 / (n + 1), abs=1e-9)
        assert len(detail["sentence_matrix"]) == n
        assert all(len(row) == n for row in detail["sentence_matrix"])

    def test_empty_document_scores_zero(self, workspace, tmp_path, capsys):
        a = sentence_file(tmp_path, "a.txt", "Some words here.")
        empty = sentence_file(tmp_path, "e.txt", "")
        capsys.readouterr()
        assert self.score(workspace, a, empty) == EXIT_OK
        assert float(capsys.readouterr().out.strip()) == 0.0

    def test_missing_model(self, tmp_path):
        a = sentence_file(tmp_path, "a.txt", "x")
        assert run(["score", str(a), str(a), "--model", str(tmp_path / "m.json"),
                    "--embeddings", str(a)]) == EXIT_DATA


class TestEval:
    def eval_args(self, workspace, report, *extra):
        _, data, model = workspace
        return ["eval", "--corpus", str(data / "corpus.jsonl"), "--triplets",
                str(data / "triplets.jsonl"), "--model", str(model), "--embeddings",
                str(data / "embeddings.txt"), "--out", str(report), "--quiet", *extra]

    def test_accuracy_matches_library(self, workspace, tmp_path):
        _, data, model = workspace
        report = tmp_path / "r.json"
        assert run(self.eval_args(workspace, report)) == EXIT_OK
        got = json.loads(report.read_text())

        m = load_model(model)
        store = load_word_vectors(data / "embeddings.txt")
        texts = {r["id"]: r["text"] for r in read_corpus(data / "corpus.jsonl")}
        corpus = PreparedCorpus.prepare(texts, load_index(f"{model}.index.json"))
        scorer = make_scorer("simdoc", corpus, SimDocConfig(),
                             build_topic_similarity_matrix(m, store, 10))
        expected = eval_triplets(read_triplets(data / "triplets.jsonl"), scorer)
        assert got["accuracy"] == expected.accuracy
        assert got["margins"] == expected.margins

    def test_jobs_do_not_change_report(self, workspace, tmp_path):
        one, four = tmp_path / "1.json", tmp_path / "4.json"
        assert run(self.eval_args(workspace, one, "--jobs", "1")) == EXIT_OK
        assert run(self.eval_args(workspace, four, "--jobs", "4")) == EXIT_OK
        assert one.read_bytes() == four.read_bytes()

    def test_unknown_variant(self, workspace, tmp_path, capsys):
        assert run(self.eval_args(workspace, tmp_path / "r.json", "--variant", "nope")) == \
            EXIT_USAGE
        assert "jaccard-bot" in capsys.readouterr().err

    def test_unknown_variant_from_config(self, workspace, tmp_path, capsys):
        cfg = sentence_file(tmp_path, "c.toml", 'variant = "nope"\n')
        assert run(self.eval_args(workspace, tmp_path / "r.json", "--config", str(cfg))) == \
            EXIT_USAGE
        assert "valid variants" in capsys.readouterr().err

    def test_config_precedence(self, workspace, tmp_path):
        cfg = sentence_file(tmp_path, "c.toml",
                            'variant = "mean"\n[eval]\nvariant = "jaccard-bot"\n')
        report = tmp_path / "r.json"
        assert run(self.eval_args(workspace, report, "--config", str(cfg))) == EXIT_OK
        assert json.loads(report.read_text())["variant"] == "jaccard-bot"
        assert run(self.eval_args(workspace, report, "--config", str(cfg),
                                  "--variant", "rmsd")) == EXIT_OK
        assert json.loads(report.read_text())["variant"] == "rmsd"

    def test_inline_parameters_from_toml(self, workspace, tmp_path):
        cfg = sentence_file(tmp_path, "c.toml", "[document]\nmatch_gain = 2.0\n")
        report = tmp_path / "r.json"
        assert run(self.eval_args(workspace, report, "--config", str(cfg))) == EXIT_OK
        assert json.loads(report.read_text())["config"]["document"]["match_gain"] == 2.0

    def test_ablation(self, workspace, tmp_path):
        report = tmp_path / "r.json"
        assert run(self.eval_args(workspace, report, "--ablation")) == EXIT_OK
        variants = json.loads(report.read_text())["variants"]
        assert list(variants) == ["alignment", "mean", "rmsd", "wordvec"]

    def test_clusters(self, tmp_path):
        data = tmp_path / "d"
        assert run(["synth", "--out", str(data), "--triplets", "2", "--clusters", "2",
                    "--cluster-size", "4", "--quiet"]) == EXIT_OK
        report = tmp_path / "r.json"
        assert run(["eval", "--clusters", str(data / "clusters.jsonl"), "--variant",
                    "jaccard-bow", "--out", str(report), "--quiet"]) == EXIT_OK
        assert "retrieval" in json.loads(report.read_text())


class TestTune:
    def test_writes_params_usable_by_eval(self, workspace, tmp_path):
        _, data, model = workspace
        params = tmp_path / "p.json"
        common = ["--corpus", str(data / "corpus.jsonl"), "--triplets",
                  str(data / "triplets.jsonl"), "--model", str(model), "--embeddings",
                  str(data / "embeddings.txt"), "--quiet"]
        assert run(["tune", *common, "--train-fraction", "0.5", "--max-evals", "30",
                    "--out", str(params)]) == EXIT_OK
        tuned = json.loads(params.read_text())
        report = tmp_path / "r.json"
        assert run(["eval", *common, "--params", str(params), "--out", str(report)]) == EXIT_OK
        assert json.loads(report.read_text())["config"]["sentence"] == tuned["sentence"]


class TestEntryPoint:
    def test_module_exit_codes(self, tmp_path):
        ok = subprocess.run([sys.executable, "-m", "simdoc.cli", "--version"],
                            capture_output=True, text=True)
        assert ok.returncode == 0 and "simdoc" in ok.stdout
        bad = subprocess.run([sys.executable, "-m", "simdoc.cli", "frobnicate"],
                             capture_output=True, text=True)
        assert bad.returncode == EXIT_USAGE and bad.stderr
