"""Association weighting of raw counts: RAW passthrough, PPMI and LMI.

PMI(w, c) = ln(|w,c| · D / (|w| · |c|)) with the marginals and D of the count
matrix. PPMI clips at zero and drops non-positive entries from storage; LMI is
count × PPMI.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
from scipy import sparse

from app.services.cooccur import (CooccurrenceMatrix, Vocabulary, csr_from_arrays, format_word)
from app.services.model_io import read_container, write_container
from app.utils.enums import ModelKind, Scheme, WindowOver
from app.utils.error_handling import ConfigurationError, ModelFormatError, OOVError
from app.utils.logger import logger

LOG_BASE = "e"


@dataclass(eq=False)
class WeightedMatrix:
    vocab: Vocabulary
    row_ids: np.ndarray
    col_ids: np.ndarray
    values: sparse.csr_matrix   # float64
    scheme: Scheme
    window: int
    window_over: WindowOver = WindowOver.FILTERED
    D: int = 0
    meta: Dict = field(default_factory=dict)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    @property
    def nnz(self) -> int:
        return self.values.nnz

    def row_of(self, word) -> int:
        vid = self.vocab.lookup(word)
        pos = np.searchsorted(self.row_ids, vid)
        if pos >= len(self.row_ids) or self.row_ids[pos] != vid:
            raise OOVError(format_word(word))
        return int(pos)


def pmi(count: int, row_marginal: int, col_marginal: int, D: int) -> float:
    if count <= 0:
        raise ValueError("PMI is undefined for unseen pairs (count must be >= 1)")
    if row_marginal < count or col_marginal < count or D < count:
        raise ValueError("marginals and D must be >= count")
    return math.log((count * D) / (row_marginal * col_marginal))


def _entry_pmi(m: CooccurrenceMatrix) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    counts = m.counts.tocsr()
    counts.sum_duplicates()
    rows = np.repeat(np.arange(counts.shape[0]), np.diff(counts.indptr))
    cols = counts.indices
    data = counts.data.astype(np.float64)
    if data.size == 0:
        return rows, cols, data, data
    row_m = m.row_marginals.astype(np.float64)
    col_m = m.col_marginals.astype(np.float64)
    ratio = (data * float(m.D)) / (row_m[rows] * col_m[cols])
    return rows, cols, data, np.log(ratio)


def _weighted(m: CooccurrenceMatrix, rows, cols, values, scheme: Scheme) -> WeightedMatrix:
    matrix = sparse.coo_matrix((values, (rows, cols)), shape=m.shape, dtype=np.float64).tocsr()
    matrix.sort_indices()
    weighted = WeightedMatrix(m.vocab, m.row_ids, m.col_ids, matrix, scheme, m.window, m.window_over, m.D, dict(m.meta))
    logger.info("%s weighting: %d of %d entries kept", scheme.value, weighted.nnz, m.nnz)
    return weighted


def apply_raw(m: CooccurrenceMatrix) -> WeightedMatrix:
    counts = m.counts.tocoo()
    keep = counts.data > 0
    return _weighted(m, counts.row[keep], counts.col[keep], counts.data[keep].astype(np.float64), Scheme.RAW)


def apply_ppmi(m: CooccurrenceMatrix) -> WeightedMatrix:
    rows, cols, _, values = _entry_pmi(m)
    keep = values > 0
    return _weighted(m, rows[keep], cols[keep], values[keep], Scheme.PPMI)


def apply_lmi(m: CooccurrenceMatrix) -> WeightedMatrix:
    rows, cols, counts, values = _entry_pmi(m)
    keep = values > 0
    return _weighted(m, rows[keep], cols[keep], counts[keep] * values[keep], Scheme.LMI)


def apply_scheme(m: CooccurrenceMatrix, scheme: Scheme) -> WeightedMatrix:
    scheme = Scheme(scheme)
    if scheme is Scheme.RAW:
        return apply_raw(m)
    if scheme is Scheme.PPMI:
        return apply_ppmi(m)
    if scheme is Scheme.LMI:
        return apply_lmi(m)
    raise ConfigurationError(f"Unknown weighting scheme {scheme}")


def save_weighted(w: WeightedMatrix, path) -> None:
    meta = dict(w.meta)
    meta.update({
        "scheme": w.scheme.value,
        "log_base": LOG_BASE,
        "window": w.window,
        "window_over": WindowOver(w.window_over).value,
        "min_context_freq": w.vocab.min_context_freq,
        "D": int(w.D),
        "shape": list(w.shape),
    })
    arrays = w.vocab.to_arrays()
    arrays.update({
        "row_ids": w.row_ids.astype(np.int64),
        "col_ids": w.col_ids.astype(np.int64),
        "indptr": w.values.indptr.astype(np.int64),
        "indices": w.values.indices.astype(np.int32),
        "data": w.values.data.astype(np.float64),
    })
    write_container(path, ModelKind.WEIGHTED, meta, arrays)


def load_weighted(path) -> WeightedMatrix:
    _, meta, arrays = read_container(path, ModelKind.WEIGHTED)
    try:
        scheme = Scheme(meta.pop("scheme"))
        meta.pop("log_base", None)
        shape = meta.pop("shape")
        vocab = Vocabulary.from_arrays(arrays, meta.pop("min_context_freq"))
        window = int(meta.pop("window"))
        window_over = WindowOver(meta.pop("window_over"))
        D = int(meta.pop("D"))
    except (KeyError, ValueError) as exc:
        raise ModelFormatError(f"Incomplete weighted-model metadata: {exc}", 0) from exc
    values = csr_from_arrays(arrays, shape, np.float64)
    return WeightedMatrix(vocab, arrays["row_ids"], arrays["col_ids"], values, scheme, window, window_over, D, meta)
