"""Bilingual vocabulary, per-domain idf and the weighted term-document matrix.

Weights are ``(1 + ln count) * idf`` with ``idf = ln(N / df)``, where N and
df are counted over the documents of a single web domain. Vocabulary rows
are keyed by ``(lang, term)`` so identical surface forms in the two
languages never share a row.
"""

from __future__ import annotations

import hashlib
import logging
import math
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus, Document, PairList, tokenize_text

log = logging.getLogger(__name__)

Term = tuple[str, str]

#: Pseudo-domain under which a collection-wide idf table is stored.
GLOBAL_DOMAIN = "*"


def document_terms(doc: Document) -> list[str]:
    """Matrix terms of a document: whitespace tokens, lowercased."""
    return [tok.lower() for tok in tokenize_text(doc.text)]


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[Term, ...]
    index: Mapping[Term, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})
        if len(self.index) != len(self.terms):
            raise ValueError("vocabulary terms must be unique")

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: Term) -> bool:
        return term in self.index

    def get(self, term: Term) -> int | None:
        return self.index.get(term)

    def fingerprint(self) -> bytes:
        """SHA-256 over the ordered term list; binds models to this vocabulary."""
        h = hashlib.sha256()
        for lang, tok in self.terms:
            h.update(lang.encode("utf-8"))
            h.update(b"\x1f")
            h.update(tok.encode("utf-8"))
            h.update(b"\x1e")
        return h.digest()


def build_vocabulary(corpus: Corpus) -> Vocabulary:
    if len(corpus) == 0:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    terms: set[Term] = set()
    for doc in corpus:
        terms.update((doc.lang, tok) for tok in document_terms(doc))
    return Vocabulary(tuple(sorted(terms)))


@dataclass(frozen=True)
class DomainIdf:
    doc_count: int
    idf: Mapping[Term, float]

    def __getitem__(self, term: Term) -> float:
        return self.idf[term]

    def get(self, term: Term, default: float = 0.0) -> float:
        return self.idf.get(term, default)


IdfTable = dict[str, DomainIdf]


def _idf_from_docs(docs: Iterable[Document]) -> DomainIdf:
    df: Counter[Term] = Counter()
    n = 0
    for doc in docs:
        n += 1
        df.update({(doc.lang, tok) for tok in document_terms(doc)})
    return DomainIdf(n, {t: math.log(n / c) for t, c in df.items()})


def compute_domain_idf(corpus: Corpus, domain: str) -> DomainIdf:
    """idf over the documents of ``domain`` only, both languages counted."""
    if domain not in corpus.by_domain:
        raise KeyError(f"unknown domain {domain!r}")
    return _idf_from_docs(corpus[i] for i in corpus.by_domain[domain])


def compute_idf_table(corpus: Corpus, scope: str = "domain") -> IdfTable:
    """Idf tables for every domain.

    ``scope="global"`` computes a single collection-wide table (ablation
    only); it is stored under :data:`GLOBAL_DOMAIN`.
    """
    if scope == "domain":
        return {d: compute_domain_idf(corpus, d) for d in corpus.domains}
    if scope == "global":
        return {GLOBAL_DOMAIN: _idf_from_docs(corpus)}
    raise ValueError(f"unknown idf scope {scope!r}")


def weight_term(count: int, idf: float) -> float:
    if count < 1:
        raise ValueError("term count must be >= 1; absent terms are not materialized")
    return (1.0 + math.log(count)) * idf


@dataclass(frozen=True)
class SparseVector:
    """Sorted-index sparse vector with no stored zeros."""

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices and values must be 1-d arrays of equal length")
        if idx.size and (np.any(np.diff(idx) <= 0) or idx[0] < 0 or idx[-1] >= self.dim):
            raise ValueError("indices must be strictly increasing and within [0, dim)")
        if np.any(val == 0):
            raise ValueError("explicit zeros are not stored")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def __add__(self, other: SparseVector) -> SparseVector:
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        acc: dict[int, float] = dict(zip(self.indices.tolist(), self.values.tolist()))
        for i, v in zip(other.indices.tolist(), other.values.tolist()):
            acc[i] = acc.get(i, 0.0) + v
        keys = sorted(k for k, v in acc.items() if v != 0.0)
        return SparseVector(np.array(keys, dtype=np.int64), np.array([acc[k] for k in keys]), self.dim)

    def __mul__(self, alpha: float) -> SparseVector:
        if alpha == 0:
            return SparseVector(np.empty(0, np.int64), np.empty(0), self.dim)
        return SparseVector(self.indices, self.values * alpha, self.dim)

    __rmul__ = __mul__


def _idf_for(doc: Document, idf: IdfTable) -> DomainIdf:
    table = idf.get(doc.domain)
    if table is None:
        table = idf.get(GLOBAL_DOMAIN)
    if table is None:
        raise KeyError(f"no idf table for domain {doc.domain!r}")
    return table


def doc_to_column(doc: Document, vocab: Vocabulary, idf: IdfTable) -> SparseVector:
    """Weighted count vector of one document, using its own domain's idf.

    Out-of-vocabulary tokens are skipped; zero-weight terms are dropped.
    """
    table = _idf_for(doc, idf)
    counts = Counter(document_terms(doc))
    entries: list[tuple[int, float]] = []
    for tok, c in counts.items():
        term = (doc.lang, tok)
        row = vocab.get(term)
        if row is None:
            continue
        w = weight_term(c, table.get(term, 0.0))
        if w > 0.0:
            entries.append((row, w))
    entries.sort()
    return SparseVector(
        np.array([r for r, _ in entries], dtype=np.int64),
        np.array([w for _, w in entries], dtype=np.float64),
        len(vocab),
    )


@dataclass(frozen=True)
class TermDocMatrix:
    """Sparse m x n matrix; column j is the pseudo-document of ``columns[j]``."""

    matrix: sp.csc_matrix
    columns: tuple[tuple[str, str], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    def column(self, j: int) -> SparseVector:
        lo, hi = self.matrix.indptr[j], self.matrix.indptr[j + 1]
        return SparseVector(self.matrix.indices[lo:hi], self.matrix.data[lo:hi], self.shape[0])

    def dump(self, path: str | Path) -> None:
        """Write ``m n nnz`` followed by one 0-based ``row col weight`` triple per line."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.row, coo.col))
        m, n = self.shape
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{m} {n} {coo.nnz}\n")
            for k in order:
                fh.write(f"{coo.row[k]} {coo.col[k]} {coo.data[k]:.17g}\n")


def load_matrix_dump(path: str | Path) -> sp.csc_matrix:
    with open(path, encoding="utf-8") as fh:
        m, n, nnz = (int(x) for x in fh.readline().split())
        rows, cols, vals = [], [], []
        for line in fh:
            r, c, v = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(v))
    if len(vals) != nnz:
        raise ValueError(f"matrix dump declares {nnz} entries but holds {len(vals)}")
    return sp.csc_matrix((vals, (rows, cols)), shape=(m, n))


def columns_to_matrix(cols: list[SparseVector], m: int) -> sp.csc_matrix:
    indptr = np.zeros(len(cols) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([c.nnz for c in cols])
    indices = np.concatenate([c.indices for c in cols]) if cols else np.empty(0, np.int64)
    data = np.concatenate([c.values for c in cols]) if cols else np.empty(0)
    return sp.csc_matrix((data, indices, indptr), shape=(m, len(cols)))


def build_term_doc_matrix(
    corpus: Corpus, train_pairs: PairList, vocab: Vocabulary, idf: IdfTable
) -> TermDocMatrix:
    """One column per training pair: source column plus target column."""
    if len(train_pairs) == 0:
        raise ValueError("no training pairs; the term-document matrix needs at least one column")
    cols: list[SparseVector] = []
    empty = 0
    for src_url, tgt_url in train_pairs:
        col = doc_to_column(corpus.lookup(src_url), vocab, idf) + doc_to_column(
            corpus.lookup(tgt_url), vocab, idf
        )
        empty += col.nnz == 0
        cols.append(col)
    if empty:
        log.warning("%d of %d training columns are empty (all terms have idf 0)", empty, len(cols))
    return TermDocMatrix(columns_to_matrix(cols, len(vocab)), tuple(train_pairs.pairs))
