"""Vector Cosine and APSyn over a loaded semantic space.

APSyn(w1, w2) = Σ_{f ∈ top-N(w1) ∩ top-N(w2)} 1 / ((rank1(f) + rank2(f)) / 2)

Ranked context lists sort a row's positive weights descending, break ties by
ascending context id, and number positions 1..len.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from sklearn.preprocessing import normalize

from app.schemas.dsm_schemas import MeasureParams
from app.services.cooccur import CooccurrenceMatrix, Vocabulary, format_word, load_matrix
from app.services.model_io import peek_kind
from app.services.svd import DenseModel, load_dense
from app.services.weighting import WeightedMatrix, apply_raw, load_weighted
from app.utils.enums import Measure, ModelKind, Scheme
from app.utils.error_handling import ConfigurationError, OOVError, UndefinedSimilarityError
from app.utils.logger import logger

DEFAULT_APSYN_N = 500


@dataclass
class RankedContextList:
    target: int
    contexts: np.ndarray        # context ids, position i has rank i + 1
    n_max: int

    @property
    def entries(self) -> List[Tuple[int, int]]:
        return [(int(c), rank) for rank, c in enumerate(self.contexts, start=1)]

    def __len__(self) -> int:
        return len(self.contexts)


@dataclass(frozen=True)
class SimilarityScore:
    value: float
    measure: Measure


@dataclass(frozen=True)
class Neighbor:
    word: Tuple[str, str]
    score: float
    row: int


def cosine(v1, v2) -> float:
    a = np.asarray(v1, dtype=np.float64).ravel()
    b = np.asarray(v2, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ConfigurationError(f"Dimensionality mismatch: {a.shape[0]} vs {b.shape[0]}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise UndefinedSimilarityError("Cosine is undefined for a zero vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def _ordered_contexts(indices: np.ndarray, weights: np.ndarray) -> np.ndarray:
    keep = weights > 0
    indices, weights = indices[keep], weights[keep]
    order = np.lexsort((indices, -weights))
    return indices[order].astype(np.int64)


def build_ranked_list(row, n_max: int, target: int = -1) -> RankedContextList:
    """Ranked list of one sparse weighted row (1 × n sparse matrix)."""
    if n_max < 1:
        raise ConfigurationError("N_max must be >= 1")
    row = sparse.csr_matrix(row)
    row.sum_duplicates()
    contexts = _ordered_contexts(row.indices, row.data)[:n_max]
    return RankedContextList(target, contexts, n_max)


def apsyn(l1: RankedContextList, l2: RankedContextList, n: int) -> float:
    if n < 1:
        raise ConfigurationError("APSyn N must be >= 1")
    if n > l1.n_max or n > l2.n_max:
        raise ConfigurationError(f"APSyn N={n} exceeds a ranked list truncated at {min(l1.n_max, l2.n_max)}")
    _, idx1, idx2 = np.intersect1d(l1.contexts[:n], l2.contexts[:n], assume_unique=True, return_indices=True)
    if len(idx1) == 0:
        return 0.0
    # rank = index + 1, so the average rank is (idx1 + idx2 + 2) / 2
    return math.fsum(2.0 / (idx1 + idx2 + 2.0))


def rank_matrix(values: sparse.csr_matrix, n_max: int) -> sparse.csr_matrix:
    """All ranked lists of a weighted matrix at once: entry (row, ctx) = rank ≤ n_max."""
    values = values.tocsr()
    values.sum_duplicates()
    rows = np.repeat(np.arange(values.shape[0]), np.diff(values.indptr))
    keep = values.data > 0
    rows, cols, data = rows[keep], values.indices[keep], values.data[keep]
    order = np.lexsort((cols, -data, rows))
    rows, cols = rows[order], cols[order]
    starts = np.searchsorted(rows, np.arange(values.shape[0]))
    ranks = np.arange(len(rows)) - starts[rows] + 1
    top = ranks <= n_max
    return sparse.csr_matrix((ranks[top].astype(np.float64), (rows[top], cols[top])), shape=values.shape)


class SemanticSpace:
    """Read-only view over a count, weighted or dense model.

    Sparse spaces support cosine and (for PPMI/LMI) APSyn; dense SVD spaces
    support cosine only. Normalized rows and ranked lists are cached.
    """

    def __init__(self, vocab: Vocabulary, row_ids: np.ndarray, scheme: Scheme,
                 matrix: Optional[sparse.csr_matrix] = None, vectors: Optional[np.ndarray] = None,
                 meta: Optional[Dict] = None, kind: ModelKind = ModelKind.WEIGHTED):
        if (matrix is None) == (vectors is None):
            raise ValueError("exactly one of matrix / vectors is required")
        self.vocab = vocab
        self.row_ids = np.asarray(row_ids, dtype=np.int64)
        self.scheme = Scheme(scheme)
        self.matrix = matrix.tocsr() if matrix is not None else None
        self.vectors = vectors
        self.meta = dict(meta or {})
        self.kind = kind
        self._normalized = None
        self._norms: Optional[np.ndarray] = None
        self._rank_matrices: Dict[int, sparse.csr_matrix] = {}
        self._rank_csc: Dict[int, sparse.csc_matrix] = {}

    @classmethod
    def from_weighted(cls, w: WeightedMatrix) -> "SemanticSpace":
        return cls(w.vocab, w.row_ids, w.scheme, matrix=w.values, meta=w.meta, kind=ModelKind.WEIGHTED)

    @classmethod
    def from_counts(cls, m: CooccurrenceMatrix) -> "SemanticSpace":
        space = cls.from_weighted(apply_raw(m))
        space.kind = ModelKind.COUNT
        return space

    @classmethod
    def from_dense(cls, d: DenseModel) -> "SemanticSpace":
        return cls(d.vocab, d.row_ids, d.scheme, vectors=d.vectors, meta=d.meta, kind=ModelKind.DENSE)

    @property
    def is_dense(self) -> bool:
        return self.vectors is not None

    @property
    def n_rows(self) -> int:
        return len(self.row_ids)

    def __contains__(self, word) -> bool:
        try:
            self.row_of(word)
        except OOVError:
            return False
        return True

    def row_of(self, word) -> int:
        vid = self.vocab.lookup(word)
        pos = int(np.searchsorted(self.row_ids, vid))
        if pos >= len(self.row_ids) or self.row_ids[pos] != vid:
            raise OOVError(format_word(word))
        return pos

    def word_of_row(self, row: int) -> Tuple[str, str]:
        return self.vocab.word_of(int(self.row_ids[row]))

    def vector(self, row: int) -> np.ndarray:
        if self.is_dense:
            return self.vectors[row]
        return self.matrix[row].toarray().ravel()

    def norms(self) -> np.ndarray:
        if self._norms is None:
            if self.is_dense:
                self._norms = np.linalg.norm(self.vectors, axis=1)
            else:
                self._norms = np.sqrt(np.asarray(self.matrix.multiply(self.matrix).sum(axis=1)).ravel())
        return self._norms

    def normalized(self):
        if self._normalized is None:
            source = self.vectors if self.is_dense else self.matrix
            self._normalized = normalize(source, norm="l2", axis=1, copy=True)
        return self._normalized

    def _require_apsyn(self) -> None:
        if self.is_dense:
            raise ConfigurationError("APSyn is defined on sparse weighted spaces only, not on SVD output")
        if self.scheme not in (Scheme.PPMI, Scheme.LMI):
            raise ConfigurationError(f"APSyn needs a PPMI or LMI space, this one is {self.scheme.value}")

    def rank_matrix(self, n_max: int) -> sparse.csr_matrix:
        self._require_apsyn()
        if n_max not in self._rank_matrices:
            self._rank_matrices[n_max] = rank_matrix(self.matrix, n_max)
        return self._rank_matrices[n_max]

    def ranked_list(self, row: int, n_max: int) -> RankedContextList:
        ranks = self.rank_matrix(n_max)
        start, end = ranks.indptr[row], ranks.indptr[row + 1]
        order = np.argsort(ranks.data[start:end], kind="stable")
        return RankedContextList(row, ranks.indices[start:end][order].astype(np.int64), n_max)

    def rank_csc(self, n_max: int) -> sparse.csc_matrix:
        if n_max not in self._rank_csc:
            self._rank_csc[n_max] = self.rank_matrix(n_max).tocsc()
        return self._rank_csc[n_max]


def _params(params: Optional[MeasureParams]) -> MeasureParams:
    return params if params is not None else MeasureParams(apsyn_n=DEFAULT_APSYN_N)


def pair_similarity(space: SemanticSpace, w1, w2, measure: Measure = Measure.COSINE,
                    params: Optional[MeasureParams] = None) -> SimilarityScore:
    measure = Measure(measure)
    params = _params(params)
    r1, r2 = space.row_of(w1), space.row_of(w2)
    if measure is Measure.COSINE:
        return SimilarityScore(cosine(space.vector(r1), space.vector(r2)), measure)
    n = params.apsyn_n
    value = apsyn(space.ranked_list(r1, n), space.ranked_list(r2, n), n)
    return SimilarityScore(value, measure)


def _cosine_scores(space: SemanticSpace, row: int) -> np.ndarray:
    if space.norms()[row] == 0.0:
        raise UndefinedSimilarityError(f"Cosine is undefined for {format_word(space.word_of_row(row))}: zero vector")
    normalized = space.normalized()
    if space.is_dense:
        scores = normalized @ normalized[row]
    else:
        scores = np.asarray((normalized @ normalized[row].T).todense()).ravel()
    scores = np.clip(scores, -1.0, 1.0)
    scores[space.norms() == 0.0] = -np.inf
    return scores


def _apsyn_scores(space: SemanticSpace, row: int, n: int) -> np.ndarray:
    query = space.ranked_list(row, n)
    scores = np.zeros(space.n_rows, dtype=np.float64)
    if len(query) == 0:
        return scores
    block = space.rank_csc(n)[:, query.contexts]
    col_of_entry = np.repeat(np.arange(block.shape[1]), np.diff(block.indptr))
    query_rank = col_of_entry + 1.0
    contributions = 2.0 / (block.data + query_rank)
    np.add.at(scores, block.indices, contributions)
    return scores


def all_scores(space: SemanticSpace, word, measure: Measure = Measure.COSINE,
               params: Optional[MeasureParams] = None) -> Tuple[int, np.ndarray]:
    """Scores of one query word against every row; undefined rows are -inf."""
    measure = Measure(measure)
    row = space.row_of(word)
    if measure is Measure.COSINE:
        return row, _cosine_scores(space, row)
    space._require_apsyn()
    return row, _apsyn_scores(space, row, _params(params).apsyn_n)


def nearest_neighbors(space: SemanticSpace, word, top_k: int, measure: Measure = Measure.COSINE,
                      params: Optional[MeasureParams] = None) -> List[Neighbor]:
    """Exact brute-force top-k, descending score, ties by ascending word id, query excluded."""
    if top_k < 1:
        raise ConfigurationError("top_k must be >= 1")
    row, scores = all_scores(space, word, measure, params)
    candidates = np.flatnonzero(np.isfinite(scores))
    candidates = candidates[candidates != row]
    order = np.lexsort((space.row_ids[candidates], -scores[candidates]))[:top_k]
    picked = candidates[order]
    return [Neighbor(space.word_of_row(r), float(scores[r]), int(r)) for r in picked]


def load_space(path) -> SemanticSpace:
    kind = peek_kind(path)
    if kind is ModelKind.COUNT:
        space = SemanticSpace.from_counts(load_matrix(path))
    elif kind is ModelKind.WEIGHTED:
        space = SemanticSpace.from_weighted(load_weighted(path))
    else:
        space = SemanticSpace.from_dense(load_dense(path))
    logger.info("Loaded %s space from %s: %d rows (%s)", kind.name.lower(), path, space.n_rows, space.scheme.value)
    return space
