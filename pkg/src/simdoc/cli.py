"""Command-line interface: ``simdoc {synth,train,index,score,eval,tune}``.

Every option can also come from a TOML or JSON file passed with
``--config``. Top-level keys apply to every command and a table named after
the command overrides them; explicit flags win over both. A run manifest
written by an earlier run is itself a valid ``--config`` file, which is how
a run is reproduced.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .alignment import ALIGNMENT_MODES
from .embedding import (
    TopicSimilarityMatrix,
    build_topic_similarity_matrix,
    cache_key,
    load_word_vectors,
)
from .errors import ConfigurationError, DataError, FormatError
from .evaluation import (
    VARIANTS,
    PreparedCorpus,
    SimDocScorer,
    eval_clustering,
    eval_triplets,
    make_scorer,
    read_clusters,
    read_triplets,
    run_ablation_suite,
    split_triplets,
)
from .lda import (
    LdaConfig,
    build_topic_word_index,
    load_index,
    load_model,
    save_index,
    save_model,
    top_words,
    train_lda,
)
from .scoring import SimDocConfig, explain, to_topic_sequence_doc
from .text import PipelineConfig, load_stopwords, preprocess, read_corpus

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

log = logging.getLogger("simdoc")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
MANIFEST_FORMAT = "simdoc-run-manifest"

DEFAULTS = {
    "seed": 0,
    "jobs": None,  # resolved to the number of available cores
    # text pipeline
    "stopwords": None,
    "stemming": True,
    "voice_normalization": True,
    "min_token_length": 2,
    # LDA
    "topics": 100,
    "alpha": 0.1,
    "beta": 0.001,
    "sweeps": 200,
    "top_words": 10,
    # topic embedding and scoring
    "top_k": 10,
    "alignment_mode": "corner",
    "params": None,
    "index": None,
    "matrix": None,
    "embeddings": None,
    # eval
    "variant": "simdoc",
    "ablation": False,
    "report": "report.json",
    # tune
    "train_fraction": 0.05,
    "method": "random-restart",
    "max_evals": 500,
    # synth
    "mode": "easy",
    "triplets_count": 200,
    "clusters_count": 0,
    "cluster_size": 10,
    "synth_topics": 12,
}

# per-command defaults that differ from DEFAULTS; voice normalization is an
# inference-time rewrite and stays off while training the topic model
COMMAND_DEFAULTS = {"train": {"voice_normalization": False}}

# options that name input files; their contents are hashed into the manifest
INPUT_KEYS = ("corpus", "triplets", "clusters", "model", "index", "embeddings", "params",
              "stopwords", "doc_a", "doc_b", "matrix", "compare_embeddings")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML or JSON file of option values (or a run manifest)")
    p.add_argument("--seed", type=int, default=None, help="seed for every random choice")
    p.add_argument("--jobs", type=int, default=None, help="worker threads (default: all cores)")
    p.add_argument("--manifest", default=None, help="where to write the run manifest")
    p.add_argument("--quiet", action="store_true", help="suppress progress output")


def _pipeline(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("text pipeline")
    g.add_argument("--stopwords", default=None, help="stopword file, one word per line")
    g.add_argument("--stemming", action=argparse.BooleanOptionalAction, default=None)
    g.add_argument("--voice-normalization", action=argparse.BooleanOptionalAction, default=None)
    g.add_argument("--min-token-length", type=int, default=None)


def _model_inputs(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--model", default=None, help="LDA model file written by 'train'")
    g.add_argument("--index", default=None, help="topic-word index (default: built from model)")
    g.add_argument("--embeddings", default=None, help="word vectors, one 'word v1 ... vD' per line")
    g.add_argument("--top-k", type=int, default=None, help="top words per topic embedding")
    g.add_argument("--matrix", default=None,
                   help="topic similarity cache (.npz); built and written if missing")


def _scoring(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("alignment")
    g.add_argument("--params", default=None, help="JSON parameter block written by 'tune'")
    g.add_argument("--alignment-mode", choices=ALIGNMENT_MODES, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="simdoc", description="Topic-sequence alignment document similarity.")
    parser.add_argument("--version", action="version", version=f"simdoc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a planted corpus, triplets and word vectors")
    _common(p)
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--mode", choices=("easy", "hard"), default=None)
    p.add_argument("--triplets", dest="triplets_count", type=int, default=None)
    p.add_argument("--clusters", dest="clusters_count", type=int, default=None,
                   help="also write clusters.jsonl with this many clusters")
    p.add_argument("--cluster-size", type=int, default=None)
    p.add_argument("--topics", dest="synth_topics", type=int, default=None)

    p = sub.add_parser("train", help="train an LDA model and its topic-word index")
    _common(p)
    _pipeline(p)
    p.add_argument("--corpus", default=None, help="JSON-lines corpus with 'id' and 'text'")
    p.add_argument("--out", default=None, help="model file to write")
    p.add_argument("--index-out", default=None, help="index file (default: <out>.index.json)")
    p.add_argument("--topics", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--sweeps", type=int, default=None)
    p.add_argument("--top-words", type=int, default=None, help="words to print per topic")

    p = sub.add_parser("index", help="build the topic-word index and topic similarity cache")
    _common(p)
    p.add_argument("--model", default=None)
    p.add_argument("--out", default=None, help="index file to write")
    p.add_argument("--embeddings", default=None)
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--matrix-out", default=None, help="topic similarity cache to write")

    p = sub.add_parser("score", help="similarity of two text files")
    _common(p)
    _pipeline(p)
    _model_inputs(p)
    _scoring(p)
    p.add_argument("doc_a")
    p.add_argument("doc_b")
    p.add_argument("--explain", action="store_true", help="also print the sentence matrix")

    p = sub.add_parser("eval", help="triplet accuracy or cluster retrieval")
    _common(p)
    _pipeline(p)
    _model_inputs(p)
    _scoring(p)
    p.add_argument("--corpus", default=None)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--triplets", default=None)
    src.add_argument("--clusters", default=None, help="JSON lines with 'id', 'label', 'text'")
    p.add_argument("--variant", choices=VARIANTS, default=None)
    p.add_argument("--ablation", action="store_true", default=None,
                   help="score every aggregator instead of one variant")
    p.add_argument("--compare-embeddings", nargs="+", default=None, metavar="FILE",
                   help="with --ablation: also score with topic similarities from these files")
    p.add_argument("--out", dest="report", default=None, help="report JSON to write")

    p = sub.add_parser("tune", help="search the ten alignment parameters on a train split")
    _common(p)
    _pipeline(p)
    _model_inputs(p)
    _scoring(p)
    p.add_argument("--corpus", default=None)
    p.add_argument("--triplets", default=None)
    p.add_argument("--train-fraction", type=float, default=None)
    p.add_argument("--method", choices=("coordinate", "random-restart", "perturbation"),
                   default=None)
    p.add_argument("--max-evals", type=int, default=None)
    p.add_argument("--out", default=None, help="parameter block to write")
    return parser


# ---------------------------------------------------------------- config


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    raw = path.read_bytes()
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(raw.decode("utf-8"))
        else:
            data = json.loads(raw)
    except (ValueError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path}: cannot parse config file ({exc})") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}: config file must hold a table/object")
    if data.get("format") == MANIFEST_FORMAT:
        data = {data["command"]: data["config"]}
    return data


def _norm(table: dict) -> dict:
    return {k.replace("-", "_"): v for k, v in table.items()}


def resolve(args: argparse.Namespace, file_cfg: dict) -> dict:
    """Merge flags over the config file over DEFAULTS for one command."""
    command = args.command
    top = _norm({k: v for k, v in file_cfg.items() if not isinstance(v, dict)})
    section = _norm(file_cfg.get(command, {}) or {})
    resolved = {}
    for key, value in vars(args).items():
        if key in ("command", "config", "manifest", "quiet"):
            continue
        if value is None:
            default = COMMAND_DEFAULTS.get(command, {}).get(key, DEFAULTS.get(key))
            value = section.get(key, top.get(key, default))
        resolved[key] = value
    # inline [sentence] / [document] parameter tables, command table first
    inline = {}
    for level in ("sentence", "document"):
        block = section.get(level, file_cfg.get(level))
        if isinstance(block, dict):
            inline[level] = block
    if inline or section.get("params_inline"):
        resolved["params_inline"] = {**(section.get("params_inline") or {}), **inline}
    if resolved.get("jobs") is None:
        resolved["jobs"] = os.cpu_count() or 1
    return resolved


def _require(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if cfg.get(k) in (None, "")]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise UsageError(f"missing required option(s): {flags}")


def pipeline_config(cfg: dict) -> PipelineConfig:
    stop = load_stopwords(cfg["stopwords"]) if cfg.get("stopwords") else load_stopwords()
    return PipelineConfig(stop, bool(cfg["stemming"]), bool(cfg["voice_normalization"]),
                          int(cfg["min_token_length"]))


def simdoc_config(cfg: dict) -> SimDocConfig:
    block = dict(cfg.get("params_inline") or {})
    if cfg.get("params"):
        path = Path(cfg["params"])
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not a JSON parameter block ({exc})") from None
        if not isinstance(data, dict) or not ("sentence" in data or "document" in data):
            raise FormatError(f"{path}: expected 'sentence' and/or 'document' parameter tables")
        block.update({k: data[k] for k in ("sentence", "document") if k in data})
    block["top_k"] = int(cfg["top_k"])
    block["alignment_mode"] = cfg["alignment_mode"]
    try:
        return SimDocConfig.from_dict(block)
    except TypeError as exc:
        raise FormatError(f"bad parameter block: {exc}") from None


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path: str | Path, command: str, cfg: dict, outputs: dict) -> None:
    inputs = {}
    for key in INPUT_KEYS:
        value = cfg.get(key)
        paths = value if isinstance(value, list) else [value]
        entries = [{"path": p, "sha256": sha256_file(p)} for p in paths
                   if isinstance(p, str) and Path(p).is_file()]
        if entries:
            inputs[key] = entries if isinstance(value, list) else entries[0]
    manifest = {
        "format": MANIFEST_FORMAT,
        "tool": "simdoc",
        "version": __version__,
        "command": command,
        "seed": cfg.get("seed"),
        "config": {k: v for k, v in sorted(cfg.items()) if k != "jobs"},
        "inputs": inputs,
        "outputs": {name: {"path": str(p), "sha256": sha256_file(p)}
                    for name, p in outputs.items() if Path(p).is_file()},
    }
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n",
                          encoding="utf-8")


def _progress(quiet: bool, message: str) -> None:
    if not quiet:
        print(message, file=sys.stderr, flush=True)


# ---------------------------------------------------------------- shared loading


def _load_texts(path: str) -> dict[str, str]:
    records = read_corpus(path)
    texts = {}
    for rec in records:
        doc_id = str(rec["id"])
        if doc_id in texts:
            raise DataError(f"{path}: duplicate document id {doc_id!r}")
        texts[doc_id] = rec["text"]
    return texts


def _load_index(cfg: dict, model):
    if cfg.get("index"):
        return load_index(cfg["index"])
    return build_topic_word_index(model)


def _topic_matrix(cfg: dict, model, store) -> TopicSimilarityMatrix:
    k = int(cfg["top_k"])
    key = cache_key(model, store, k)
    path = cfg.get("matrix")
    if path and Path(path).is_file():
        try:
            return TopicSimilarityMatrix.load(path, key)
        except FormatError:
            log.warning("%s: stale topic similarity cache, rebuilding", path)
    matrix = build_topic_similarity_matrix(model, store, k)
    if path:
        with open(path, "wb") as fh:
            matrix.save(fh, key)
    return matrix


def _scoring_inputs(cfg: dict, need_matrix: bool, need_store: bool):
    _require(cfg, "model")
    model = load_model(cfg["model"])
    index = _load_index(cfg, model)
    store = matrix = None
    if need_matrix or need_store:
        if not cfg.get("embeddings"):
            raise UsageError("this variant needs --embeddings")
        store = load_word_vectors(cfg["embeddings"])
    if need_matrix:
        matrix = _topic_matrix(cfg, model, store)
    return model, index, store, matrix


# ---------------------------------------------------------------- commands


def cmd_synth(cfg: dict, quiet: bool) -> dict:
    from .synthetic import PlantedConfig, generate_planted_clusters, generate_planted_triplets
    from .text import write_corpus

    _require(cfg, "out")
    out = Path(cfg["out"])
    pc = PlantedConfig(num_topics=int(cfg["synth_topics"]), mode=cfg["mode"],
                       num_triplets=int(cfg["triplets_count"]))
    data = generate_planted_triplets(pc, seed=int(cfg["seed"]))
    paths = data.write(out)
    if int(cfg["clusters_count"]) > 0:
        records, _, _, _ = generate_planted_clusters(int(cfg["clusters_count"]),
                                                     int(cfg["cluster_size"]), pc,
                                                     seed=int(cfg["seed"]))
        paths["clusters"] = out / "clusters.jsonl"
        write_corpus(records, paths["clusters"])
    for name, path in paths.items():
        print(f"{name}: {path}")
    return {"outputs": paths, "manifest": out / "manifest.json"}


def cmd_train(cfg: dict, quiet: bool) -> dict:
    _require(cfg, "corpus", "out")
    texts = _load_texts(cfg["corpus"])
    pipeline = pipeline_config(cfg)
    docs = [preprocess(text, doc_id, pipeline) for doc_id, text in texts.items()]
    lda = LdaConfig(num_topics=int(cfg["topics"]), alpha=float(cfg["alpha"]),
                    beta=float(cfg["beta"]), gibbs_sweeps=int(cfg["sweeps"]),
                    rng_seed=int(cfg["seed"]))
    step = max(1, lda.gibbs_sweeps // 10)

    def progress(sweep, nkw, nk):
        if (sweep + 1) % step == 0 or sweep + 1 == lda.gibbs_sweeps:
            _progress(quiet, f"sweep {sweep + 1}/{lda.gibbs_sweeps}")

    model = train_lda(docs, lda, progress)
    save_model(model, cfg["out"])
    index_path = cfg.get("index_out") or f"{cfg['out']}.index.json"
    save_index(build_topic_word_index(model), index_path)
    n = int(cfg["top_words"])
    for t in range(model.num_topics):
        print(f"topic {t:>3}: " + " ".join(top_words(model, t, min(n, model.vocab_size))))
    return {"outputs": {"model": cfg["out"], "index": index_path},
            "manifest": f"{cfg['out']}.manifest.json"}


def cmd_index(cfg: dict, quiet: bool) -> dict:
    _require(cfg, "model", "out")
    model = load_model(cfg["model"])
    save_index(build_topic_word_index(model), cfg["out"])
    outputs = {"index": cfg["out"]}
    if cfg.get("embeddings"):
        store = load_word_vectors(cfg["embeddings"])
        k = int(cfg["top_k"])
        matrix = build_topic_similarity_matrix(model, store, k)
        matrix_path = cfg.get("matrix_out") or f"{cfg['out']}.matrix.npz"
        with open(matrix_path, "wb") as fh:
            matrix.save(fh, cache_key(model, store, k))
        outputs["matrix"] = matrix_path
        if matrix.unembeddable:
            log.warning("topics without any embedded top word: %s", sorted(matrix.unembeddable))
    for name, path in outputs.items():
        print(f"{name}: {path}")
    return {"outputs": outputs, "manifest": f"{cfg['out']}.manifest.json"}


def cmd_score(cfg: dict, quiet: bool) -> dict:
    _, index, _, matrix = _scoring_inputs(cfg, need_matrix=True, need_store=False)
    config = simdoc_config(cfg)
    pipeline = pipeline_config(cfg)
    docs = []
    for key in ("doc_a", "doc_b"):
        text = Path(cfg[key]).read_text(encoding="utf-8")
        docs.append(to_topic_sequence_doc(preprocess(text, cfg[key], pipeline), index))
    detail = explain(docs[0], docs[1], config, matrix)
    print(repr(float(detail["similarity"])))
    if cfg.get("explain"):
        print(json.dumps(detail, indent=2))
    return {"outputs": {}, "manifest": None}


def _make_corpus(cfg: dict, texts: dict, index) -> PreparedCorpus:
    return PreparedCorpus.prepare(texts, index, pipeline_config(cfg))


def cmd_eval(cfg: dict, quiet: bool) -> dict:
    if not cfg.get("triplets") and not cfg.get("clusters"):
        raise UsageError("one of --triplets or --clusters is required")
    variant = cfg["variant"]
    if variant not in VARIANTS:
        raise UsageError(f"unknown variant {variant!r}; valid variants: {', '.join(VARIANTS)}")
    ablation = bool(cfg.get("ablation"))
    bag_of_words_only = variant in ("jaccard-bow", "bm25-bow", "tfidf") and not ablation
    need_matrix = ablation or variant in ("simdoc", "mean", "rmsd")
    need_store = ablation or variant == "wordvec"
    if bag_of_words_only and not cfg.get("model"):
        index = None
        matrix = store = None
    else:
        _, index, store, matrix = _scoring_inputs(cfg, need_matrix, need_store)
    config = simdoc_config(cfg)
    jobs = int(cfg["jobs"])

    if cfg.get("clusters"):
        texts, labels = read_clusters(cfg["clusters"])
    else:
        _require(cfg, "corpus")
        texts = _load_texts(cfg["corpus"])
        triplets = read_triplets(cfg["triplets"])
    if index is None:
        from .lda import TopicWordIndex
        index = TopicWordIndex({}, 0)
    corpus = _make_corpus(cfg, texts, index)

    if ablation:
        if cfg.get("clusters"):
            raise UsageError("--ablation works on triplets only")
        model = load_model(cfg["model"])
        alternatives = {}
        for path in cfg.get("compare_embeddings") or []:
            alt_store = load_word_vectors(path)
            alternatives[Path(path).name] = build_topic_similarity_matrix(
                model, alt_store, int(cfg["top_k"]))
        result = run_ablation_suite(triplets, corpus, config, matrix, store, alternatives, jobs)
        result["config"] = config.to_dict()
        text = json.dumps(result, indent=2, sort_keys=True) + "\n"
        width = max(14, *(len(name) + 2 for name in result["variants"]))
        print(f"{'variant':<{width}}{'accuracy':>10}{'mean margin':>13}")
        for name, row in result["variants"].items():
            print(f"{name:<{width}}{row['accuracy']:>10.4f}{row['mean_margin']:>13.4f}")
    else:
        scorer = make_scorer(variant, corpus, config, matrix, store)
        if cfg.get("clusters"):
            report = eval_clustering(labels, scorer, jobs, variant=variant)
        else:
            report = eval_triplets(triplets, scorer, corpus.ids(), jobs, variant=variant)
        report.extra["config"] = config.to_dict()
        text = report.to_json()
        for line in report.summary_lines():
            print(line)
    Path(cfg["report"]).write_text(text, encoding="utf-8")
    return {"outputs": {"report": cfg["report"]}, "manifest": f"{cfg['report']}.manifest.json"}


def cmd_tune(cfg: dict, quiet: bool) -> dict:
    from .tuner import TuneConfig, from_config, initial_params, save_params, to_config, tune

    _require(cfg, "corpus", "triplets", "out")
    _, index, _, matrix = _scoring_inputs(cfg, need_matrix=True, need_store=False)
    base = simdoc_config(cfg)
    corpus = _make_corpus(cfg, _load_texts(cfg["corpus"]), index)
    triplets = read_triplets(cfg["triplets"])
    train, test = split_triplets(triplets, float(cfg["train_fraction"]))
    if not train:
        raise DataError("training split is empty")
    init = from_config(base) if (cfg.get("params") or cfg.get("params_inline")) else initial_params()
    cache: dict = {}

    def factory(config):
        return SimDocScorer(corpus, config, matrix, cache=cache)

    tc = TuneConfig(method=cfg["method"], max_evaluations=int(cfg["max_evals"]),
                    rng_seed=int(cfg["seed"]))
    result = tune(init, train, factory, tc, base)
    save_params(result.params, cfg["out"], result.accuracy)
    print(f"train triplets:   {len(train)}")
    print(f"evaluations:      {result.evaluations}")
    print(f"initial accuracy: {result.initial_accuracy:.4f}")
    print(f"tuned accuracy:   {result.accuracy:.4f}")
    if test:
        acc = eval_triplets(test, factory(to_config(result.params, base)), corpus.ids()).accuracy
        print(f"test accuracy:    {acc:.4f} ({len(test)} triplets)")
    return {"outputs": {"params": cfg["out"]}, "manifest": f"{cfg['out']}.manifest.json"}


COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "index": cmd_index,
    "score": cmd_score,
    "eval": cmd_eval,
    "tune": cmd_tune,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        file_cfg = load_config_file(args.config) if args.config else {}
        cfg = resolve(args, file_cfg)
        result = COMMANDS[args.command](cfg, args.quiet)
        manifest = args.manifest or result.get("manifest")
        if manifest:
            write_manifest(manifest, args.command, cfg, result.get("outputs", {}))
        return EXIT_OK
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigurationError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, FormatError, DataError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main(argv: list[str] | None = None) -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
