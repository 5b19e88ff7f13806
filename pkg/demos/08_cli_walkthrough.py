"""
The command-line tool end to end
================================

The same steps as the library demos, driven through ``simdoc``: generate a
planted corpus, train a model, build the index and topic table, score two
files, evaluate the triplets and tune the parameters. Each command writes a
manifest next to its output, and a manifest can be passed back with
``--config`` to repeat the run.
"""

import json
import tempfile
from pathlib import Path

from simdoc.cli import run

with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    data, model = root / "data", root / "model.json"
    run(["synth", "--out", str(data), "--mode", "hard", "--triplets", "40", "--seed", "1"])
    run(["train", "--corpus", str(data / "corpus.jsonl"), "--out", str(model),
         "--topics", "12", "--sweeps", "150", "--top-words", "5", "--quiet"])
    run(["index", "--model", str(model), "--out", str(root / "index.json"),
         "--embeddings", str(data / "embeddings.txt")])

    first = json.loads((data / "corpus.jsonl").read_text().splitlines()[0])["text"]
    (root / "a.txt").write_text(first)
    inputs = ["--model", str(model), "--embeddings", str(data / "embeddings.txt"),
              "--matrix", str(root / "index.json.matrix.npz")]
    print("self similarity:")
    run(["score", str(root / "a.txt"), str(root / "a.txt"), *inputs])

    corpus = ["--corpus", str(data / "corpus.jsonl"), "--triplets", str(data / "triplets.jsonl")]
    run(["eval", *corpus, *inputs, "--ablation", "--out", str(root / "ablation.json")])
    run(["tune", *corpus, *inputs, "--train-fraction", "0.3", "--out", str(root / "params.json"),
         "--quiet"])
    run(["eval", *corpus, *inputs, "--params", str(root / "params.json"),
         "--out", str(root / "report.json")])

    manifest = json.loads((root / "report.json.manifest.json").read_text())
    print("manifest records:", sorted(manifest["inputs"]))
