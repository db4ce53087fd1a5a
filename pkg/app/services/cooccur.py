"""Vocabulary and sparse target × context co-occurrence counts.

Counting is two-pass: `build_vocab` over the stream, then
`count_cooccurrences` over a second stream. Pair increments are buffered and
flushed in chunks into sorted CSR runs that are summed into the running total,
so peak memory follows the number of distinct pairs, not the corpus length.
"""
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
from scipy import sparse

from app.services.corpus import (DEFAULT_TAGMAP, CorpusStats, Sentence, TagMap, Token,
                                 content_filter, stream_corpus)
from app.services.model_io import read_container, write_container
from app.utils.enums import CONTENT_POS, ModelKind, WindowOver
from app.utils.error_handling import ConfigurationError, ModelFormatError, OOVError
from app.utils.logger import logger

DEFAULT_MIN_CONTEXT_FREQ = 100
FLUSH_TOKENS = 2_000_000


class Vocabulary:
    """Bidirectional (lemma, pos) ↔ id map with exact corpus frequencies.

    Ids are dense and ordered by descending frequency, then lemma, then pos, so
    the same corpus always yields the same ids whatever its sentence order.
    """

    def __init__(self, words: Sequence[Tuple[str, str]], freq, min_context_freq: int = DEFAULT_MIN_CONTEXT_FREQ):
        if min_context_freq < 0:
            raise ConfigurationError("min_context_freq must be >= 0")
        self.words: List[Token] = [Token(*w) for w in words]
        self.freq = np.asarray(freq, dtype=np.int64).reshape(-1)
        if len(self.words) != len(self.freq):
            raise ValueError("words and freq differ in length")
        self.min_context_freq = int(min_context_freq)
        self.id_of: Dict[Token, int] = {w: i for i, w in enumerate(self.words)}
        if len(self.id_of) != len(self.words):
            raise ValueError("duplicate words in vocabulary")
        self.context_eligible = self.freq > self.min_context_freq
        self._by_lemma: Optional[Dict[str, Dict[str, int]]] = None

    @classmethod
    def from_counts(cls, counts: Mapping[Tuple[str, str], int], min_context_freq: int = DEFAULT_MIN_CONTEXT_FREQ) -> "Vocabulary":
        ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0][0], kv[0][1]))
        return cls([w for w, _ in ordered], [c for _, c in ordered], min_context_freq)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word) -> bool:
        return tuple(word) in self.id_of

    def get(self, word) -> Optional[int]:
        return self.id_of.get(tuple(word))

    def lookup(self, word) -> int:
        idx = self.id_of.get(tuple(word))
        if idx is None:
            raise OOVError(format_word(word))
        return idx

    def word_of(self, idx: int) -> Token:
        return self.words[idx]

    def frequency(self, word) -> int:
        return int(self.freq[self.lookup(word)])

    def context_ids(self) -> np.ndarray:
        return np.flatnonzero(self.context_eligible).astype(np.int64)

    def pos_ids(self, lemma: str) -> Dict[str, int]:
        """pos → id for every entry of `lemma`."""
        if self._by_lemma is None:
            index: Dict[str, Dict[str, int]] = defaultdict(dict)
            for i, (lem, pos) in enumerate(self.words):
                index[lem][pos] = i
            self._by_lemma = dict(index)
        return self._by_lemma.get(lemma, {})

    def to_arrays(self) -> Dict[str, np.ndarray]:
        lemmas = "\n".join(w.lemma for w in self.words).encode("utf-8")
        tags = "".join(w.pos for w in self.words).encode("ascii")
        return {
            "vocab_lemmas": np.frombuffer(lemmas, dtype=np.uint8),
            "vocab_pos": np.frombuffer(tags, dtype=np.uint8),
            "vocab_freq": self.freq,
        }

    @classmethod
    def from_arrays(cls, arrays: Mapping[str, np.ndarray], min_context_freq: int) -> "Vocabulary":
        freq = arrays["vocab_freq"]
        if len(freq) == 0:
            return cls([], freq, min_context_freq)
        lemmas = arrays["vocab_lemmas"].tobytes().decode("utf-8").split("\n")
        tags = arrays["vocab_pos"].tobytes().decode("ascii")
        if not len(lemmas) == len(tags) == len(freq):
            raise ModelFormatError("Vocabulary sections disagree in length", 0)
        return cls(list(zip(lemmas, tags)), freq, min_context_freq)


def format_word(word) -> str:
    lemma, pos = word
    return f"{lemma}/{pos}" if pos else str(lemma)


@dataclass(eq=False)
class CooccurrenceMatrix:
    vocab: Vocabulary
    row_ids: np.ndarray         # vocabulary id of each row (targets), ascending
    col_ids: np.ndarray         # vocabulary id of each column (contexts), ascending
    counts: sparse.csr_matrix   # int64, no explicit zeros
    window: int
    window_over: WindowOver = WindowOver.FILTERED
    corpus_tokens: int = 0
    meta: Dict = field(default_factory=dict)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.counts.shape

    @property
    def nnz(self) -> int:
        return self.counts.nnz

    @property
    def D(self) -> int:
        return int(self.counts.data.sum())

    @property
    def row_marginals(self) -> np.ndarray:
        return np.asarray(self.counts.sum(axis=1), dtype=np.int64).reshape(-1)

    @property
    def col_marginals(self) -> np.ndarray:
        return np.asarray(self.counts.sum(axis=0), dtype=np.int64).reshape(-1)

    def row_of(self, word) -> int:
        vid = self.vocab.lookup(word)
        pos = np.searchsorted(self.row_ids, vid)
        if pos >= len(self.row_ids) or self.row_ids[pos] != vid:
            raise OOVError(format_word(word))
        return int(pos)


# ────────────────────────────
# ░░ Vocabulary pass ░░
# ────────────────────────────
def count_content_words(corpus: Iterable[Sentence]) -> Counter:
    counts: Counter = Counter()
    for sentence in corpus:
        counts.update(content_filter(sentence))
    return counts


def build_vocab(corpus: Iterable[Sentence], min_context_freq: int = DEFAULT_MIN_CONTEXT_FREQ) -> Vocabulary:
    if min_context_freq < 0:
        raise ConfigurationError("min_context_freq must be >= 0")
    vocab = Vocabulary.from_counts(count_content_words(corpus), min_context_freq)
    logger.info("Vocabulary: %d content words, %d context-eligible (freq > %d)",
                len(vocab), int(vocab.context_eligible.sum()), min_context_freq)
    return vocab


# ────────────────────────────
# ░░ Counting pass ░░
# ────────────────────────────
class _PairAccumulator:
    def __init__(self, shape, row_index: np.ndarray, col_index: np.ndarray, window: int):
        self.shape = shape
        self.row_index = row_index
        self.col_index = col_index
        self.window = window
        self.total = sparse.csr_matrix(shape, dtype=np.int64)
        self._ids: List[int] = []
        self._sent: List[int] = []
        self._n_sent = 0

    def add(self, ids: List[int]) -> None:
        self._ids.extend(ids)
        self._sent.extend([self._n_sent] * len(ids))
        self._n_sent += 1
        if len(self._ids) >= FLUSH_TOKENS:
            self.flush()

    def flush(self) -> None:
        if not self._ids:
            return
        ids = np.asarray(self._ids, dtype=np.int64)
        sent = np.asarray(self._sent, dtype=np.int64)
        self._ids, self._sent = [], []

        rows_parts, cols_parts = [], []
        for d in range(1, self.window + 1):
            if d >= len(ids):
                break
            same = sent[:-d] == sent[d:]
            left, right = ids[:-d][same], ids[d:][same]
            for target, context in ((left, right), (right, left)):
                r = self.row_index[target]
                c = self.col_index[context]
                keep = (r >= 0) & (c >= 0)
                rows_parts.append(r[keep])
                cols_parts.append(c[keep])

        rows = np.concatenate(rows_parts) if rows_parts else np.empty(0, np.int64)
        cols = np.concatenate(cols_parts) if cols_parts else np.empty(0, np.int64)
        run = sparse.coo_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=self.shape).tocsr()
        self.total = self.total + run

    def finish(self) -> sparse.csr_matrix:
        self.flush()
        total = self.total.tocsr()
        total.sum_duplicates()
        total.eliminate_zeros()
        return total


def _resolve_rows(vocab: Vocabulary, targets: Optional[Iterable[int]]) -> np.ndarray:
    if targets is None:
        return np.arange(len(vocab), dtype=np.int64)
    row_ids = np.unique(np.fromiter((int(t) for t in targets), dtype=np.int64))
    if len(row_ids) and (row_ids[0] < 0 or row_ids[-1] >= len(vocab)):
        raise ConfigurationError("target id outside the vocabulary")
    return row_ids


def count_cooccurrences(
    corpus: Iterable[Sentence],
    vocab: Vocabulary,
    window: int,
    targets: Optional[Iterable[int]] = None,
    window_over: WindowOver = WindowOver.FILTERED,
) -> CooccurrenceMatrix:
    """Count each (target, context) pair within ±window positions, per sentence.

    With `window_over=FILTERED` non-content words are dropped before
    windowing; with SURFACE they keep their slot but never pair.
    """
    if window < 1:
        raise ConfigurationError(f"window must be >= 1, got {window}")
    window_over = WindowOver(window_over)

    row_ids = _resolve_rows(vocab, targets)
    col_ids = vocab.context_ids()
    sentinel = len(vocab)
    row_index = np.full(sentinel + 1, -1, dtype=np.int64)
    row_index[row_ids] = np.arange(len(row_ids))
    col_index = np.full(sentinel + 1, -1, dtype=np.int64)
    col_index[col_ids] = np.arange(len(col_ids))

    acc = _PairAccumulator((len(row_ids), len(col_ids)), row_index, col_index, window)
    id_of = vocab.id_of
    corpus_tokens = 0
    for sentence in corpus:
        corpus_tokens += len(sentence)
        if window_over is WindowOver.FILTERED:
            ids = [id_of.get(tok, sentinel) for tok in sentence if tok.pos in CONTENT_POS]
        else:
            ids = [id_of.get(tok, sentinel) if tok.pos in CONTENT_POS else sentinel for tok in sentence]
        if len(ids) > 1:
            acc.add(ids)

    matrix = CooccurrenceMatrix(vocab, row_ids, col_ids, acc.finish(), window, window_over, corpus_tokens)
    logger.info("Co-occurrence matrix %dx%d, nnz=%d, D=%d (window=%d, %s)",
                matrix.shape[0], matrix.shape[1], matrix.nnz, matrix.D, window, window_over.value)
    return matrix


def merge_matrices(a: CooccurrenceMatrix, b: CooccurrenceMatrix) -> CooccurrenceMatrix:
    """Sum two partial accumulations over the same vocabulary and settings."""
    if (len(a.vocab) != len(b.vocab) or a.window != b.window or a.window_over != b.window_over
            or not np.array_equal(a.row_ids, b.row_ids) or not np.array_equal(a.col_ids, b.col_ids)):
        raise ConfigurationError("Cannot merge matrices built with different vocabularies or settings")
    counts = (a.counts + b.counts).tocsr()
    counts.sum_duplicates()
    return CooccurrenceMatrix(a.vocab, a.row_ids, a.col_ids, counts, a.window, a.window_over,
                              a.corpus_tokens + b.corpus_tokens, dict(a.meta))


# ────────────────────────────
# ░░ Sharded file passes ░░
# ────────────────────────────
def _vocab_shard(path, tagmap: TagMap) -> Tuple[Counter, CorpusStats]:
    stats = CorpusStats()
    return count_content_words(stream_corpus([path], tagmap, stats, desc="vocab")), stats


def _count_shard(path, vocab, window, targets, window_over, tagmap) -> CooccurrenceMatrix:
    return count_cooccurrences(stream_corpus([path], tagmap, desc="count"), vocab, window, targets, window_over)


def build_vocab_files(paths: Sequence, min_context_freq: int = DEFAULT_MIN_CONTEXT_FREQ,
                      tagmap: TagMap = DEFAULT_TAGMAP, workers: int = 1) -> Tuple[Vocabulary, CorpusStats]:
    paths = list(paths)
    if workers > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(_vocab_shard, paths, [tagmap] * len(paths)))
    else:
        shards = [_vocab_shard(p, tagmap) for p in paths]
    counts: Counter = Counter()
    stats = CorpusStats()
    for shard_counts, shard_stats in shards:
        counts.update(shard_counts)
        stats = stats.merge(shard_stats)
    vocab = Vocabulary.from_counts(counts, min_context_freq)
    logger.info("Vocabulary: %d content words from %d sentences (%d tokens, %d malformed), %d context-eligible",
                len(vocab), stats.sentences, stats.tokens, stats.malformed_tokens, int(vocab.context_eligible.sum()))
    return vocab, stats


def count_corpus_files(paths: Sequence, vocab: Vocabulary, window: int, targets: Optional[Iterable[int]] = None,
                       window_over: WindowOver = WindowOver.FILTERED, tagmap: TagMap = DEFAULT_TAGMAP,
                       workers: int = 1) -> CooccurrenceMatrix:
    paths = list(paths)
    targets = None if targets is None else sorted(set(targets))
    if not paths:
        return count_cooccurrences([], vocab, window, targets, window_over)
    if workers > 1 and len(paths) > 1:
        n = len(paths)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(_count_shard, paths, [vocab] * n, [window] * n, [targets] * n,
                                   [window_over] * n, [tagmap] * n))
    else:
        shards = [_count_shard(p, vocab, window, targets, window_over, tagmap) for p in paths]
    return reduce(merge_matrices, shards)


def read_targets(path, vocab: Vocabulary) -> Set[int]:
    """Target word list: one `lemma_POS` (POS in N/V/J) or bare `lemma` per line."""
    ids: Set[int] = set()
    missing = 0
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            entry = line.strip()
            if not entry or entry.startswith("#"):
                continue
            lemma, sep, pos = entry.rpartition("_")
            if sep and pos in CONTENT_POS:
                found = vocab.get((lemma.lower(), pos))
                hits = [found] if found is not None else []
            else:
                hits = list(vocab.pos_ids(entry.lower()).values())
            if not hits:
                missing += 1
                logger.debug("Target %s not in vocabulary", entry)
            ids.update(hits)
    logger.info("Targets from %s: %d ids (%d entries not in vocabulary)", Path(path).name, len(ids), missing)
    return ids


# ────────────────────────────
# ░░ Persistence ░░
# ────────────────────────────
def save_matrix(m: CooccurrenceMatrix, path) -> None:
    meta = dict(m.meta)
    meta.update({
        "window": m.window,
        "window_over": WindowOver(m.window_over).value,
        "min_context_freq": m.vocab.min_context_freq,
        "corpus_tokens": int(m.corpus_tokens),
        "shape": list(m.shape),
        "D": m.D,
    })
    arrays = m.vocab.to_arrays()
    arrays.update({
        "row_ids": m.row_ids.astype(np.int64),
        "col_ids": m.col_ids.astype(np.int64),
        "indptr": m.counts.indptr.astype(np.int64),
        "indices": m.counts.indices.astype(np.int32),
        "data": m.counts.data.astype(np.int64),
        "row_marginals": m.row_marginals,
        "col_marginals": m.col_marginals,
    })
    write_container(path, ModelKind.COUNT, meta, arrays)


def csr_from_arrays(arrays: Mapping[str, np.ndarray], shape, dtype) -> sparse.csr_matrix:
    try:
        return sparse.csr_matrix((arrays["data"].astype(dtype), arrays["indices"], arrays["indptr"]), shape=tuple(shape))
    except (KeyError, ValueError) as exc:
        raise ModelFormatError(f"Corrupt sparse entry section: {exc}", 0) from exc


def load_matrix(path) -> CooccurrenceMatrix:
    _, meta, arrays = read_container(path, ModelKind.COUNT)
    stored_d = meta.pop("D", None)
    shape = meta.pop("shape")
    vocab = Vocabulary.from_arrays(arrays, meta.pop("min_context_freq"))
    counts = csr_from_arrays(arrays, shape, np.int64)
    m = CooccurrenceMatrix(
        vocab, arrays["row_ids"], arrays["col_ids"], counts,
        window=int(meta.pop("window")),
        window_over=WindowOver(meta.pop("window_over")),
        corpus_tokens=int(meta.pop("corpus_tokens")),
        meta=meta,
    )
    if (m.D != stored_d or not np.array_equal(m.row_marginals, arrays["row_marginals"])
            or not np.array_equal(m.col_marginals, arrays["col_marginals"])):
        raise ModelFormatError("Stored marginals disagree with entries", 0)
    return m
