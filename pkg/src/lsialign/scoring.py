"""Pairwise scores: cosine, domain-centred cosine and URL similarity.

URL similarity aligns the letter/digit token sequences of two URLs with a
Needleman-Wunsch recurrence (gap score 0) where each aligned token pair
earns a frequency-discounted match score.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Hashable, Iterable, Mapping, Sequence
from functools import lru_cache

import numpy as np

from .corpus import Corpus, UrlTokens, is_numeric_token, tokenize_url

#: Pseudo-domain used when URL token counts are collection-wide.
GLOBAL_DOMAIN = "*"


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between ``a`` and ``b``; NaN if either is zero."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return math.nan
    return max(-1.0, min(1.0, float(np.dot(a, b)) / (na * nb)))


def domain_mean(embeddings: np.ndarray | Sequence[np.ndarray]) -> np.ndarray:
    emb = np.asarray(embeddings, dtype=np.float64)
    if emb.ndim != 2 or emb.shape[0] == 0:
        raise ValueError("domain_mean needs a non-empty list of embeddings")
    return emb.mean(axis=0)


def local_cosine(a: np.ndarray, b: np.ndarray, mean: np.ndarray) -> float:
    return cosine(np.asarray(a) - mean, np.asarray(b) - mean)


def cosine_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All-pairs cosine between rows of ``a`` and rows of ``b`` (NaN for zero rows)."""
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (a @ b.T) / np.outer(na, nb)
    out[(na == 0)[:, None] | (nb == 0)[None, :]] = np.nan
    return np.clip(out, -1.0, 1.0)


def lcss_len(x: Sequence[Hashable], y: Sequence[Hashable]) -> int:
    """Length of the longest common subsequence of two sequences.

    Bit-parallel formulation: one machine word per 64 positions of ``y``,
    so long token sequences stay cheap.
    """
    if len(x) < len(y):
        x, y = y, x
    n = len(y)
    if n == 0:
        return 0
    masks: dict[Hashable, int] = {}
    for j, sym in enumerate(y):
        masks[sym] = masks.get(sym, 0) | (1 << j)
    full = (1 << n) - 1
    v = full
    for sym in x:
        m = masks.get(sym)
        if m is None:
            continue
        u = v & m
        v = ((v + u) | (v - u)) & full
    return n - bin(v).count("1")


# -- URL similarity -----------------------------------------------------------

UrlCounts = Mapping[str, Counter]


def url_token_counts(corpus: Corpus, scope: str = "domain") -> dict[str, Counter]:
    """Position-independent token counts over all URLs of each domain.

    ``scope="global"`` pools all URLs under :data:`GLOBAL_DOMAIN`.
    """
    if scope not in ("domain", "global"):
        raise ValueError(f"unknown url count scope {scope!r}")
    out: dict[str, Counter] = {}
    for doc in corpus:
        key = doc.domain if scope == "domain" else GLOBAL_DOMAIN
        out.setdefault(key, Counter()).update(tokenize_url(doc.url).tokens)
    return out


def counts_for(stats: UrlCounts, domain: str) -> Counter:
    if domain in stats:
        return stats[domain]
    if GLOBAL_DOMAIN in stats:
        return stats[GLOBAL_DOMAIN]
    raise KeyError(f"no URL token counts for domain {domain!r}")


def _cnt(token: str, cnt: Mapping[str, int]) -> int:
    try:
        c = cnt[token]
    except KeyError:
        raise KeyError(f"token {token!r} missing from URL token counts") from None
    if c < 1:
        raise KeyError(f"token {token!r} has count {c}; counts must be >= 1")
    return c


def url_token_match_score(t1: str, t2: str, cnt: Mapping[str, int]) -> float:
    """Match score of two URL tokens.

    Equal tokens score ``1/cnt^2``; unequal tokens score 0 if either is
    numeric; two letter tokens score their character-level lcss Dice
    ratio divided by ``cnt(t1) * cnt(t2)``.
    """
    c1 = _cnt(t1, cnt)
    c2 = _cnt(t2, cnt)
    if t1 == t2:
        return 1.0 / (c1 * c1)
    if is_numeric_token(t1) or is_numeric_token(t2):
        return 0.0
    return (2.0 * lcss_len(t1, t2) / (len(t1) + len(t2))) / (c1 * c2)


def _tokens(u: UrlTokens | Sequence[str]) -> Sequence[str]:
    return u.tokens if isinstance(u, UrlTokens) else u


def url_similarity(u1: UrlTokens | Sequence[str], u2: UrlTokens | Sequence[str], cnt: Mapping[str, int]) -> float:
    """Maximum total match score over monotone token alignments (gaps free)."""
    return align_score(_tokens(u1), _tokens(u2), lambda a, b: url_token_match_score(a, b, cnt))


def align_score(a: Sequence, b: Sequence, score) -> float:
    """Needleman-Wunsch with zero gap score and nonnegative pair scores."""
    if not a or not b:
        return 0.0
    prev = [0.0] * (len(b) + 1)
    for x in a:
        cur = [0.0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            diag = prev[j - 1] + score(x, y)
            best = prev[j] if prev[j] >= cur[j - 1] else cur[j - 1]
            cur[j] = diag if diag > best else best
        prev = cur
    return prev[-1]


class UrlScorer:
    """URL similarity with per-domain token counts and cached token-pair scores."""

    def __init__(self, corpus: Corpus, scope: str = "domain"):
        self.corpus = corpus
        self.stats = url_token_counts(corpus, scope)
        self._tokens = [tokenize_url(doc.url).tokens for doc in corpus]
        self._pair_cache: dict[str, callable] = {}

    def _pair_fn(self, domain: str):
        fn = self._pair_cache.get(domain)
        if fn is None:
            cnt = counts_for(self.stats, domain)

            @lru_cache(maxsize=None)
            def fn(a: str, b: str) -> float:
                return url_token_match_score(a, b, cnt)

            self._pair_cache[domain] = fn
        return fn

    def tokens(self, doc_id: int) -> tuple[str, ...]:
        return self._tokens[doc_id]

    def score(self, src: int, tgt: int) -> float:
        fn = self._pair_fn(self.corpus[src].domain)
        return align_score(self._tokens[src], self._tokens[tgt], fn)

    def score_matrix(self, srcs: Iterable[int], tgts: Iterable[int]) -> np.ndarray:
        srcs, tgts = list(srcs), list(tgts)
        out = np.zeros((len(srcs), len(tgts)))
        for i, s in enumerate(srcs):
            for j, t in enumerate(tgts):
                out[i, j] = self.score(s, t)
        return out
