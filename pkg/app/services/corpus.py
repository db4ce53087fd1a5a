"""Streaming reader for POS-tagged corpora.

Wire format: one sentence per line, whitespace-separated ``lemma_TAG`` tokens,
plain text or gzip. Source tags are collapsed to the coarse set {N, V, J, O}
through a `TagMap`.
"""
import gzip
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional

from tqdm import tqdm

from app.utils.config import read_key_value_file
from app.utils.enums import CONTENT_POS, CoarsePos
from app.utils.error_handling import ConfigurationError, CorpusReadError, MalformedTokenError
from app.utils.logger import logger, progress_enabled

GZIP_MAGIC = b"\x1f\x8b"

DEFAULT_TAG_PREFIXES: Dict[str, str] = {
    "NN": "N",   # Penn NN, NNS, NNP, NNPS
    "NP": "N",   # TreeTagger proper nouns
    "VB": "V",
    "VV": "V",   # TreeTagger lexical verbs
    "VH": "V",
    "VD": "V",
    "JJ": "J",
}


class Token(NamedTuple):
    lemma: str
    pos: str


Sentence = List[Token]


class TagMap:
    """Source tag → coarse tag, by longest matching prefix. Unmapped tags are O."""

    def __init__(self, prefixes: Optional[Dict[str, str]] = None):
        prefixes = dict(DEFAULT_TAG_PREFIXES if prefixes is None else prefixes)
        valid = {p.value for p in CoarsePos}
        for prefix, coarse in prefixes.items():
            if coarse not in valid:
                raise ConfigurationError(f"Tag map entry {prefix}={coarse}: target must be one of {sorted(valid)}")
        self._ordered = sorted(prefixes.items(), key=lambda kv: len(kv[0]), reverse=True)
        self._cache: Dict[str, str] = {}

    @classmethod
    def from_file(cls, path) -> "TagMap":
        return cls(read_key_value_file(path))

    def __call__(self, tag: str) -> str:
        coarse = self._cache.get(tag)
        if coarse is None:
            coarse = CoarsePos.OTHER.value
            for prefix, mapped in self._ordered:
                if tag.startswith(prefix):
                    coarse = mapped
                    break
            self._cache[tag] = coarse
        return coarse


DEFAULT_TAGMAP = TagMap()


@dataclass
class CorpusStats:
    sentences: int = 0
    tokens: int = 0
    malformed_tokens: int = 0

    def merge(self, other: "CorpusStats") -> "CorpusStats":
        return CorpusStats(
            self.sentences + other.sentences,
            self.tokens + other.tokens,
            self.malformed_tokens + other.malformed_tokens,
        )


def parse_token(raw: str, tagmap: TagMap = DEFAULT_TAGMAP) -> Token:
    lemma, sep, tag = raw.rpartition("_")
    if not sep or not lemma or not tag:
        raise MalformedTokenError(raw)
    lemma = lemma.lower()
    if not lemma or any(ch.isspace() for ch in lemma):
        raise MalformedTokenError(raw)
    return Token(lemma, tagmap(tag))


def _open_text(path: Path) -> io.TextIOBase:
    with open(path, "rb") as probe:
        magic = probe.read(2)
    if magic == GZIP_MAGIC:
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def stream_sentences(path, tagmap: TagMap = DEFAULT_TAGMAP, stats: Optional[CorpusStats] = None) -> Iterator[Sentence]:
    """Yield one sentence per line, lazily. Malformed tokens are skipped and counted."""
    path = Path(path)
    try:
        handle = _open_text(path)
    except OSError as exc:
        raise CorpusReadError(f"Cannot read corpus {path}: {exc}") from exc

    stats = stats if stats is not None else CorpusStats()
    with handle:
        try:
            for line in handle:
                sentence: Sentence = []
                for raw in line.split():
                    try:
                        sentence.append(parse_token(raw, tagmap))
                    except MalformedTokenError as exc:
                        stats.malformed_tokens += 1
                        logger.debug(str(exc))
                stats.sentences += 1
                stats.tokens += len(sentence)
                yield sentence
        except (OSError, EOFError, UnicodeDecodeError) as exc:
            raise CorpusReadError(f"Failed while reading {path}: {exc}") from exc
    if stats.malformed_tokens:
        logger.warning("%s: skipped %d malformed tokens", path, stats.malformed_tokens)


def stream_corpus(paths: Iterable, tagmap: TagMap = DEFAULT_TAGMAP, stats: Optional[CorpusStats] = None,
                  desc: str = "corpus") -> Iterator[Sentence]:
    """Chain several corpus files into one sentence stream, with a progress bar."""
    stats = stats if stats is not None else CorpusStats()
    for path in paths:
        sentences = stream_sentences(path, tagmap, stats)
        yield from tqdm(sentences, desc=f"{desc}: {Path(path).name}", unit=" sent",
                        disable=not progress_enabled(), leave=False)


def content_filter(sentence: Sentence) -> Sentence:
    return [token for token in sentence if token.pos in CONTENT_POS]
