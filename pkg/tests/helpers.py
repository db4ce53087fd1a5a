"""Shared builders for the test-suite: tiny corpora, hand-made models, a planted corpus."""
import gzip
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import sparse

from app.services.cooccur import CooccurrenceMatrix, Vocabulary
from app.services.weighting import WeightedMatrix
from app.utils.enums import Scheme


def write_corpus(path, lines: Sequence[str], compress: bool = False) -> Path:
    path = Path(path)
    text = "".join(line + "\n" for line in lines)
    if compress:
        with gzip.open(path, "wt", encoding="utf-8") as handle:
            handle.write(text)
    else:
        path.write_text(text, encoding="utf-8")
    return path


def toy_vocab(n: int, lemmas: Optional[Sequence[str]] = None, pos: str = "N", min_context_freq: int = 0) -> Vocabulary:
    lemmas = list(lemmas) if lemmas is not None else [f"w{i}" for i in range(n)]
    lemmas += [f"ctx{i}" for i in range(len(lemmas), n)]
    freq = np.arange(n, 0, -1) * 10
    return Vocabulary([(lemma, pos) for lemma in lemmas], freq, min_context_freq)


def counts_from_dense(values, lemmas: Optional[Sequence[str]] = None, window: int = 2) -> CooccurrenceMatrix:
    values = np.asarray(values, dtype=np.int64)
    n_rows, n_cols = values.shape
    vocab = toy_vocab(max(n_rows, n_cols), lemmas)
    return CooccurrenceMatrix(vocab, np.arange(n_rows, dtype=np.int64), np.arange(n_cols, dtype=np.int64),
                              sparse.csr_matrix(values), window)


def weighted_from_dense(values, lemmas: Optional[Sequence[str]] = None, scheme: Scheme = Scheme.PPMI) -> WeightedMatrix:
    values = np.asarray(values, dtype=np.float64)
    n_rows, n_cols = values.shape
    vocab = toy_vocab(max(n_rows, n_cols), lemmas)
    matrix = sparse.csr_matrix(values)
    matrix.eliminate_zeros()
    return WeightedMatrix(vocab, np.arange(n_rows, dtype=np.int64), np.arange(n_cols, dtype=np.int64),
                          matrix, scheme, window=2, D=0)


# ────────────────────────────
# ░░ Planted two-cluster corpus ░░
# ────────────────────────────
def planted_groups() -> Dict[str, List[str]]:
    """Targets t<cluster><subtopic><i>; 10 per subtopic, 2 subtopics per cluster."""
    return {f"{c}{s}": [f"t{c}{s}{i}" for i in range(10)] for c in range(2) for s in range(2)}


def write_planted_corpus(path, n_sentences: int = 100_000, seed: int = 0) -> Path:
    """Each sentence: one target, 3 subtopic contexts, 3 cluster contexts, 2 shared fillers and `the`."""
    rng = np.random.default_rng(seed)
    groups = planted_groups()
    sub_contexts = {key: [f"s{key}{j}_VV" for j in range(10)] for key in groups}
    cluster_contexts = {c: [f"k{c}{j}_JJ" for j in range(20)] for c in range(2)}
    fillers = [f"f{j}_NN" for j in range(20)]

    lines = []
    for _ in range(n_sentences):
        c, s = rng.integers(0, 2, size=2)
        key = f"{c}{s}"
        tokens = [groups[key][rng.integers(0, 10)] + "_NN"]
        tokens += [sub_contexts[key][j] for j in rng.choice(10, size=3, replace=False)]
        tokens += [cluster_contexts[c][j] for j in rng.choice(20, size=3, replace=False)]
        tokens += [fillers[j] for j in rng.choice(20, size=2, replace=False)]
        tokens.append("the_DT")
        lines.append(" ".join(tokens[i] for i in rng.permutation(len(tokens))))
    return write_corpus(path, lines)


def planted_gold():
    """(word1, word2, gold): 10 same subtopic, 5 same cluster, 0 across clusters."""
    groups = planted_groups()
    targets = [(key, word) for key, words in groups.items() for word in words]
    pairs = []
    for i, (key1, w1) in enumerate(targets):
        for key2, w2 in targets[i + 1:]:
            if key1 == key2:
                gold = 10.0
            elif key1[0] == key2[0]:
                gold = 5.0
            else:
                gold = 0.0
            pairs.append((w1, w2, gold))
    return pairs


def write_ws353(path, pairs) -> Path:
    path = Path(path)
    lines = ["Word 1\tWord 2\tHuman (mean)"] + [f"{w1}\t{w2}\t{gold}" for w1, w2, gold in pairs]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
