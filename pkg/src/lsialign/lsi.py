"""Truncated SVD of the bilingual term-document matrix and document fold-in.

The factorization is a randomized range finder (Gaussian test matrix,
power iterations with re-orthonormalization) followed by an exact SVD of
the small projected matrix. A document with weighted count vector ``q``
is folded in as ``q^T T S^-1``.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus
from .vectorizer import IdfTable, SparseVector, TermDocMatrix, Vocabulary, columns_to_matrix, doc_to_column

log = logging.getLogger(__name__)

MAGIC = b"LSI1"
SCALINGS = ("none", "singular_values")


class RankError(ValueError):
    """Requested rank is invalid for the matrix, or singular values vanish."""


@dataclass(frozen=True)
class LsiModel:
    """Truncated term factors.

    Attributes:
        term_matrix: ``m x r`` with orthonormal columns.
        singular_values: ``r`` values in descending order.
        vocab_fingerprint: 32-byte digest of the vocabulary the rows follow.
        doc_matrix: ``n x r`` document factors of the training columns.
            Only available on freshly trained models; not serialized.
    """

    term_matrix: np.ndarray
    singular_values: np.ndarray
    vocab_fingerprint: bytes
    doc_matrix: np.ndarray | None = None

    @property
    def rank(self) -> int:
        return int(self.singular_values.size)

    @property
    def n_terms(self) -> int:
        return int(self.term_matrix.shape[0])

    def numerical_zero(self) -> float:
        s = self.singular_values
        if s.size == 0:
            return 0.0
        return float(s[0]) * max(self.term_matrix.shape[0], 1) * np.finfo(np.float64).eps

    def save(self, path: str | Path) -> None:
        m, r = self.term_matrix.shape
        if len(self.vocab_fingerprint) != 32:
            raise ValueError("vocab fingerprint must be 32 bytes")
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<II", m, r))
            fh.write(np.asarray(self.term_matrix, dtype="<f8").tobytes(order="F"))
            fh.write(np.asarray(self.singular_values, dtype="<f8").tobytes())
            fh.write(self.vocab_fingerprint)

    @classmethod
    def load(cls, path: str | Path) -> LsiModel:
        data = Path(path).read_bytes()
        if data[:4] != MAGIC:
            raise ValueError(f"{path}: not an LSI model file (bad magic)")
        m, r = struct.unpack_from("<II", data, 4)
        off = 12
        expected = off + 8 * m * r + 8 * r + 32
        if len(data) != expected:
            raise ValueError(f"{path}: truncated or oversized model file ({len(data)} != {expected} bytes)")
        t = np.frombuffer(data, dtype="<f8", count=m * r, offset=off).reshape((m, r), order="F")
        off += 8 * m * r
        s = np.frombuffer(data, dtype="<f8", count=r, offset=off)
        off += 8 * r
        return cls(t.astype(np.float64), s.astype(np.float64), bytes(data[off : off + 32]))


def _orthonormal_basis(a: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(a, mode="reduced")
    return q


def randomized_svd(
    matrix: sp.spmatrix | np.ndarray,
    rank: int,
    seed: int = 0,
    oversample: int = 20,
    power_iters: int = 2,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Top-``rank`` singular triplets ``(U, s, Vt)``.

    The sketch width is ``rank + oversample`` capped at ``min(m, n)``; when
    the cap is hit the range of the matrix is captured completely and the
    result equals the exact truncated SVD up to rounding.
    """
    m, n = matrix.shape
    width = min(rank + max(oversample, 0), m, n)
    rng = np.random.Generator(np.random.Philox(seed))
    omega = rng.standard_normal((n, width))
    q = _orthonormal_basis(np.asarray(matrix @ omega))
    for _ in range(power_iters):
        z = _orthonormal_basis(np.asarray(matrix.T @ q))
        q = _orthonormal_basis(np.asarray(matrix @ z))
    b = np.asarray(matrix.T @ q).T
    ub, s, vt = np.linalg.svd(b, full_matrices=False)
    u = q @ ub
    return u[:, :rank], s[:rank], vt[:rank]


def _normalize_signs(u: np.ndarray, vt: np.ndarray) -> None:
    pivots = np.argmax(np.abs(u), axis=0)
    flip = u[pivots, np.arange(u.shape[1])] < 0
    u[:, flip] *= -1
    vt[flip] *= -1


def train_lsi(
    tdm: TermDocMatrix | sp.spmatrix | np.ndarray,
    rank: int,
    seed: int = 0,
    oversample: int = 20,
    power_iters: int = 2,
    vocab_fingerprint: bytes = bytes(32),
) -> LsiModel:
    """Factorize the term-document matrix to ``rank`` dimensions.

    Raises:
        RankError: ``rank < 1`` or ``rank > min(m, n)``.
        ValueError: the matrix has no nonzero entry.
    """
    matrix = tdm.matrix if isinstance(tdm, TermDocMatrix) else tdm
    if sp.issparse(matrix):
        matrix = sp.csr_matrix(matrix, dtype=np.float64)
        nonzero = matrix.count_nonzero()
    else:
        matrix = np.asarray(matrix, dtype=np.float64)
        nonzero = np.count_nonzero(matrix)
    m, n = matrix.shape
    if rank < 1:
        raise RankError(f"rank must be >= 1, got {rank}")
    if rank > min(m, n):
        raise RankError(f"rank {rank} exceeds min(m, n) = {min(m, n)} for a {m} x {n} matrix")
    if nonzero == 0:
        raise ValueError("term-document matrix is all zeros")
    u, s, vt = randomized_svd(matrix, rank, seed=seed, oversample=oversample, power_iters=power_iters)
    _normalize_signs(u, vt)
    model = LsiModel(u, s, vocab_fingerprint, doc_matrix=vt.T.copy())
    if s[-1] <= model.numerical_zero():
        log.warning("rank %d exceeds the numerical rank of the matrix; fold-in will fail", rank)
    log.info("trained LSI model: %d x %d matrix, rank %d, top singular values %s",
             m, n, rank, np.array2string(s[:5], precision=4))
    return model


def _check_invertible(model: LsiModel) -> None:
    if np.any(model.singular_values <= model.numerical_zero()):
        k = int(np.sum(model.singular_values > model.numerical_zero()))
        raise RankError(
            f"model has vanishing singular values; retrain with rank <= {k}"
        )


def fold_in(q: SparseVector, model: LsiModel) -> np.ndarray:
    """Embed one weighted count vector: ``q^T T S^-1``."""
    if q.dim != model.n_terms:
        raise ValueError(f"vector dimension {q.dim} does not match model ({model.n_terms} terms)")
    _check_invertible(model)
    return (q.values @ model.term_matrix[q.indices]) / model.singular_values


def fold_in_matrix(columns: sp.spmatrix, model: LsiModel) -> np.ndarray:
    """Row ``i`` of the result is the fold-in of column ``i``."""
    if columns.shape[0] != model.n_terms:
        raise ValueError(f"matrix has {columns.shape[0]} rows, model has {model.n_terms} terms")
    _check_invertible(model)
    return np.asarray(sp.csc_matrix(columns).T @ model.term_matrix) / model.singular_values


def embed_corpus(
    corpus: Corpus,
    model: LsiModel,
    vocab: Vocabulary,
    idf: IdfTable,
    scaling: str = "singular_values",
) -> np.ndarray:
    """Fold every document into the latent space.

    Returns an array with one row per document id. With
    ``scaling="singular_values"`` rows are ``d_q * S`` (that is ``q^T T``),
    otherwise the plain fold-in ``d_q``.
    """
    if scaling not in SCALINGS:
        raise ValueError(f"unknown embedding scaling {scaling!r}; choose from {SCALINGS}")
    if vocab.fingerprint() != model.vocab_fingerprint:
        raise ValueError("vocabulary fingerprint does not match the model; rebuild the model from these documents")
    cols = [doc_to_column(doc, vocab, idf) for doc in corpus]
    emb = fold_in_matrix(columns_to_matrix(cols, len(vocab)), model)
    if scaling == "singular_values":
        emb = emb * model.singular_values
    if not np.all(np.isfinite(emb)):
        raise FloatingPointError("non-finite embedding values")
    return emb
