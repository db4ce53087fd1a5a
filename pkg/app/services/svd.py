"""Truncated SVD of a weighted matrix into dense k-dimensional row embeddings.

Small inputs (both sides within `dense_cutoff`) use an exact LAPACK SVD; larger
ones use sklearn's randomized range finder (10 oversamples, 4 power
iterations). Signs are fixed with `svd_flip` so the output is deterministic.
Row embeddings are U_k · Σ_k^p.
"""
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
import scipy.linalg
from scipy import sparse
from sklearn.utils.extmath import randomized_svd, svd_flip

from app.services.cooccur import Vocabulary, format_word
from app.services.model_io import read_container, write_container
from app.services.weighting import WeightedMatrix
from app.utils.enums import ModelKind, Scheme
from app.utils.error_handling import ConfigurationError, ModelFormatError, OOVError
from app.utils.logger import logger

DEFAULT_K = 300
DEFAULT_DENSE_CUTOFF = 1000
N_OVERSAMPLES = 10
N_POWER_ITER = 4
EIGEN_WEIGHTS = (0.0, 0.5, 1.0)


@dataclass(eq=False)
class DenseModel:
    vocab: Vocabulary
    row_ids: np.ndarray
    vectors: np.ndarray              # |rows| × k
    singular_values: np.ndarray      # k, descending
    k: int
    p: float = 1.0
    seed: int = 0
    scheme: Scheme = Scheme.PPMI
    components: Optional[np.ndarray] = None   # V_kᵀ, in memory only
    meta: Dict = field(default_factory=dict)

    def row_of(self, word) -> int:
        vid = self.vocab.lookup(word)
        pos = np.searchsorted(self.row_ids, vid)
        if pos >= len(self.row_ids) or self.row_ids[pos] != vid:
            raise OOVError(format_word(word))
        return int(pos)

    @property
    def left_vectors(self) -> np.ndarray:
        """U_k recovered from the stored U_k · Σ_k^p."""
        scale = self.singular_values ** self.p
        with np.errstate(divide="ignore", invalid="ignore"):
            u = self.vectors / scale
        u[:, scale == 0] = 0.0
        return u


def _exact_svd(values: sparse.csr_matrix, k: int):
    u, s, vt = scipy.linalg.svd(values.toarray(), full_matrices=False, lapack_driver="gesdd")
    u, vt = svd_flip(u, vt)
    return u[:, :k], s[:k], vt[:k]


def truncated_svd(m: WeightedMatrix, k: int = DEFAULT_K, seed: int = 0, p: float = 1.0,
                  dense_cutoff: int = DEFAULT_DENSE_CUTOFF) -> DenseModel:
    rows, cols = m.shape
    if rows == 0 or cols == 0 or m.nnz == 0:
        raise ConfigurationError("Cannot factorize an empty matrix")
    if not 1 <= k <= min(rows, cols):
        raise ConfigurationError(f"k={k} outside [1, {min(rows, cols)}] for a {rows}x{cols} matrix")
    if float(p) not in EIGEN_WEIGHTS:
        raise ConfigurationError(f"eigen weight p must be one of {EIGEN_WEIGHTS}")

    values = m.values.astype(np.float64)
    if rows <= dense_cutoff and cols <= dense_cutoff:
        logger.info("Exact SVD of %dx%d matrix, k=%d", rows, cols, k)
        u, s, vt = _exact_svd(values, k)
    else:
        logger.info("Randomized SVD of %dx%d matrix (nnz=%d), k=%d, seed=%d", rows, cols, m.nnz, k, seed)
        u, s, vt = randomized_svd(values, n_components=k, n_oversamples=N_OVERSAMPLES,
                                  n_iter=N_POWER_ITER, random_state=seed, flip_sign=True)
    s = np.clip(s, 0.0, None)
    vectors = u * (s ** float(p))
    logger.info("Singular values: max=%.4g min=%.4g", s[0], s[-1])
    return DenseModel(m.vocab, m.row_ids, vectors, s, k, float(p), seed, m.scheme, vt, dict(m.meta))


def reconstruction_error(m: WeightedMatrix, model: DenseModel) -> float:
    """‖M − U_k Σ_k V_kᵀ‖_F."""
    if model.components is None:
        raise ConfigurationError("Model has no right singular vectors (loaded from disk)")
    approx = (model.left_vectors * model.singular_values) @ model.components
    return float(np.linalg.norm(m.values.toarray() - approx))


def save_dense(model: DenseModel, path) -> None:
    meta = dict(model.meta)
    meta.update({
        "k": model.k,
        "p": model.p,
        "seed": model.seed,
        "scheme": model.scheme.value,
        "min_context_freq": model.vocab.min_context_freq,
    })
    arrays = model.vocab.to_arrays()
    arrays.update({
        "row_ids": model.row_ids.astype(np.int64),
        "vectors": model.vectors.astype(np.float64),
        "singular_values": model.singular_values.astype(np.float64),
    })
    write_container(path, ModelKind.DENSE, meta, arrays)


def load_dense(path) -> DenseModel:
    _, meta, arrays = read_container(path, ModelKind.DENSE)
    try:
        k = int(meta.pop("k"))
        p = float(meta.pop("p"))
        seed = int(meta.pop("seed"))
        scheme = Scheme(meta.pop("scheme"))
        vocab = Vocabulary.from_arrays(arrays, meta.pop("min_context_freq"))
    except (KeyError, ValueError) as exc:
        raise ModelFormatError(f"Incomplete dense-model metadata: {exc}", 0) from exc
    vectors = arrays["vectors"]
    if vectors.ndim != 2 or vectors.shape[1] != k or len(arrays["singular_values"]) != k:
        raise ModelFormatError("Dense vector block does not match k", 0)
    return DenseModel(vocab, arrays["row_ids"], vectors, arrays["singular_values"], k, p, seed, scheme, None, meta)
