"""Text preprocessing: sentence splitting, voice normalization, token filtering."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Hashable, Iterable, Iterator

from .errors import FormatError

ABBREVIATIONS = frozenset({
    "al.", "approx.", "cf.", "dept.", "dr.", "e.g.", "eq.", "eqs.", "esp.",
    "etc.", "fig.", "figs.", "i.e.", "inc.", "jr.", "ltd.", "mr.", "mrs.",
    "ms.", "no.", "nos.", "prof.", "ref.", "refs.", "sec.", "sr.", "st.",
    "tab.", "vol.", "vs.",
})

BE_FORMS = frozenset({"am", "is", "are", "was", "were", "be", "been", "being"})

_BOUNDARY = re.compile(r"[.!?]+(?=\s|$)")
# an uppercase initial ("J.") or dotted letters ("e.g.", "U.S.")
_INITIALS = re.compile(r"^(?:[A-Z]\.|(?:[^\W\d_]\.){2,})$")
_WORD = re.compile(r"[^\W\d_]+")
_TRAILING_PUNCT = re.compile(r"[.!?]+$")
_LAST_WORD = re.compile(r"\S+$")


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a one-word-per-line stopword file; the bundled English list by default."""
    if path is None:
        text = resources.files("simdoc.data").joinpath("stopwords_en.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


@dataclass(frozen=True)
class PipelineConfig:
    stopwords: frozenset[str] = field(default_factory=load_stopwords)
    stemming_enabled: bool = True
    voice_normalization_enabled: bool = True
    min_token_length: int = 2

    def __post_init__(self):
        if self.min_token_length < 1:
            raise ValueError(f"min_token_length must be >= 1, got {self.min_token_length}")
        object.__setattr__(self, "stopwords", frozenset(w.lower() for w in self.stopwords))

    def to_dict(self) -> dict:
        return {
            "stopwords_count": len(self.stopwords),
            "stemming_enabled": self.stemming_enabled,
            "voice_normalization_enabled": self.voice_normalization_enabled,
            "min_token_length": self.min_token_length,
        }


@dataclass(frozen=True)
class PreprocessedDoc:
    sentences: tuple[tuple[str, ...], ...]
    source_id: Hashable = None

    @property
    def num_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def tokens(self) -> Iterator[str]:
        for sentence in self.sentences:
            yield from sentence


def _is_abbreviation(text: str, end: int) -> bool:
    # `end` is the index just past the punctuation run
    match = _LAST_WORD.search(text, max(0, end - 40), end)
    word = match.group() if match else ""
    return word.lower() in ABBREVIATIONS or bool(_INITIALS.match(word))


def segment_sentences(text: str) -> list[str]:
    """Split on ., ! or ? followed by whitespace or end of text.

    A period closing a known abbreviation ("fig.", "e.g.") or an uppercase
    initial ("J.") does not end the sentence.
    """
    sentences = []
    start = 0
    for match in _BOUNDARY.finditer(text):
        end = match.end()
        if match.group().endswith(".") and _is_abbreviation(text, end):
            continue
        chunk = text[start:end].strip()
        if chunk:
            sentences.append(chunk)
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _rewrite_passive_once(words: list[str]) -> list[str] | None:
    for i in range(1, len(words) - 3):
        if words[i].lower() in BE_FORMS and words[i + 2].lower() == "by":
            subject, verb, agent = words[:i], words[i + 1], words[i + 3:]
            return agent + [verb] + subject
    return None


def normalize_voice(sentence: str) -> str:
    """Rewrite "<subject> <be> <participle> by <agent>" as "<agent> <participle> <subject>".

    The participle is kept as-is (no re-conjugation). Rewriting repeats until
    no pattern remains, which makes the function idempotent; each pass drops
    one form of "be", so it terminates.
    """
    body = sentence.strip()
    punct_match = _TRAILING_PUNCT.search(body)
    punct = punct_match.group() if punct_match else ""
    words = body[:len(body) - len(punct)].split()
    changed = False
    while True:
        rewritten = _rewrite_passive_once(words)
        if rewritten is None:
            break
        words = rewritten
        changed = True
    if not changed:
        return sentence
    return " ".join(words) + punct


def stem(token: str, min_stem: int = 3) -> str:
    """Light suffix stripping: -ing, -ed, -es (after sibilants), -s."""
    if token.endswith("ing") and len(token) - 3 >= min_stem:
        return token[:-3]
    if token.endswith("ed") and len(token) - 2 >= min_stem:
        return token[:-2]
    if token.endswith("es") and len(token) - 2 >= min_stem and token[:-2].endswith(
            ("s", "x", "z", "ch", "sh")):
        return token[:-2]
    if token.endswith("s") and not token.endswith(("ss", "us", "is")) and len(token) - 1 >= min_stem:
        return token[:-1]
    return token


def tokenize_and_filter(sentence: str, config: PipelineConfig) -> list[str]:
    tokens = []
    for word in _WORD.findall(sentence.lower()):
        if word in config.stopwords or len(word) < config.min_token_length:
            continue
        if config.stemming_enabled:
            word = stem(word)
            # stemming may produce a stopword or shorten below the bound
            if word in config.stopwords or len(word) < config.min_token_length:
                continue
        tokens.append(word)
    return tokens


def preprocess(text: str, source_id: Hashable = None,
               config: PipelineConfig | None = None) -> PreprocessedDoc:
    config = config or PipelineConfig()
    sentences = []
    for sentence in segment_sentences(text):
        if config.voice_normalization_enabled:
            sentence = normalize_voice(sentence)
        tokens = tokenize_and_filter(sentence, config)
        if tokens:
            sentences.append(tuple(tokens))
    return PreprocessedDoc(tuple(sentences), source_id)


def read_corpus(path: str | Path) -> list[dict]:
    """Load line-delimited JSON records carrying at least ``id`` and ``text``."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON ({exc})") from None
            if not isinstance(record, dict) or "id" not in record or "text" not in record:
                raise FormatError(f"{path}:{lineno}: record needs 'id' and 'text' fields")
            record["id"] = str(record["id"])
            records.append(record)
    return records


def write_corpus(records: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
