"""Candidate generation, score combination and competitive linking."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .corpus import Corpus
from .scoring import UrlScorer, cosine_matrix

SCORERS = ("cos", "lcos", "url")
NORMALIZATIONS = ("minmax", "none")

# stands in for an undefined cosine (zero embedding): the lowest possible score
UNDEFINED_SCORE = -1.0


@dataclass(frozen=True)
class Hypothesis:
    """A scored (source, target) candidate. Scores are None when not computed,
    NaN when undefined (zero embedding)."""

    src: int
    tgt: int
    src_url: str
    tgt_url: str
    cos: float | None = None
    lcos: float | None = None
    url: float | None = None
    combined: float = 0.0

    def score(self, name: str) -> float | None:
        return getattr(self, name)

    @property
    def rank_key(self) -> tuple[float, str, str]:
        return (-self.combined, self.src_url, self.tgt_url)


@dataclass(frozen=True)
class WeightConfig:
    weights: Mapping[str, float] = field(default_factory=lambda: {"cos": 1.0, "lcos": 1.0, "url": 1.0})
    normalize: str = "minmax"

    def __post_init__(self) -> None:
        w = {name: float(self.weights.get(name, 0.0)) for name in SCORERS}
        unknown = set(self.weights) - set(SCORERS)
        if unknown:
            raise ValueError(f"unknown scorer(s) {sorted(unknown)}; expected {SCORERS}")
        if any(v < 0 or not math.isfinite(v) for v in w.values()):
            raise ValueError("scorer weights must be finite and >= 0")
        if not any(v > 0 for v in w.values()):
            raise ValueError("at least one scorer weight must be positive")
        if self.normalize not in NORMALIZATIONS:
            raise ValueError(f"normalize must be one of {NORMALIZATIONS}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def parse(cls, text: str, normalize: str = "minmax") -> WeightConfig:
        """Parse a ``cos,lcos,url`` comma list such as ``"1,1,0"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != len(SCORERS):
            raise ValueError(f"expected {len(SCORERS)} comma-separated weights (cos,lcos,url), got {text!r}")
        return cls(dict(zip(SCORERS, (float(p) for p in parts))), normalize)

    @classmethod
    def only(cls, *names: str, normalize: str = "minmax") -> WeightConfig:
        return cls({n: 1.0 for n in names}, normalize)

    @property
    def enabled(self) -> tuple[str, ...]:
        return tuple(n for n in SCORERS if self.weights[n] > 0)


def generate_hypotheses(
    domain: str,
    corpus: Corpus,
    embeddings: np.ndarray,
    url_scorer: UrlScorer | None,
    config: WeightConfig,
    src_lang: str,
    tgt_lang: str,
    top_k: int = 0,
) -> list[Hypothesis]:
    """All cross-lingual pairs within ``domain``, scored by every enabled scorer.

    With ``top_k > 0`` a pair is kept only if either side ranks the other
    among its ``top_k`` nearest neighbours by cosine.
    """
    srcs = corpus.domain_docs(domain, src_lang)
    tgts = corpus.domain_docs(domain, tgt_lang)
    if not srcs or not tgts:
        return []
    enabled = config.enabled
    need_cos = "cos" in enabled or top_k > 0
    cos = cosine_matrix(embeddings[srcs], embeddings[tgts]) if need_cos else None
    lcos = None
    if "lcos" in enabled:
        mean = embeddings[corpus.domain_docs(domain)].mean(axis=0)
        lcos = cosine_matrix(embeddings[srcs] - mean, embeddings[tgts] - mean)

    keep = np.ones((len(srcs), len(tgts)), dtype=bool)
    if 0 < top_k < max(len(srcs), len(tgts)):
        ranked = np.where(np.isnan(cos), -np.inf, cos)
        keep[:] = False
        k_t = min(top_k, len(tgts))
        k_s = min(top_k, len(srcs))
        rows = np.argsort(-ranked, axis=1, kind="stable")[:, :k_t]
        keep[np.arange(len(srcs))[:, None], rows] = True
        cols = np.argsort(-ranked, axis=0, kind="stable")[:k_s, :]
        keep[cols, np.arange(len(tgts))[None, :]] = True

    hyps = []
    for i, s in enumerate(srcs):
        for j, t in enumerate(tgts):
            if not keep[i, j]:
                continue
            hyps.append(
                Hypothesis(
                    s,
                    t,
                    corpus[s].url,
                    corpus[t].url,
                    cos=float(cos[i, j]) if "cos" in enabled else None,
                    lcos=float(lcos[i, j]) if lcos is not None else None,
                    url=url_scorer.score(s, t) if "url" in enabled and url_scorer is not None else None,
                )
            )
    if "url" in enabled and url_scorer is None:
        raise ValueError("url scorer enabled but no UrlScorer supplied")
    return hyps


def _normalized(values: np.ndarray, mode: str) -> np.ndarray:
    values = np.where(np.isnan(values), UNDEFINED_SCORE, values)
    if mode == "none":
        return values
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.full_like(values, 0.5)
    return (values - lo) / (hi - lo)


def combine_scores(hyps: Sequence[Hypothesis], config: WeightConfig) -> list[Hypothesis]:
    """Weighted mean of the enabled scorers, each min-max normalized over ``hyps``.

    Normalization is over the list passed in, so call this once per domain.
    Undefined cosines count as the lowest possible score.
    """
    if not hyps:
        return []
    total = np.zeros(len(hyps))
    wsum = 0.0
    for name in config.enabled:
        raw = [h.score(name) for h in hyps]
        if any(v is None for v in raw):
            raise ValueError(f"scorer {name!r} is enabled but missing on some hypotheses")
        w = config.weights[name]
        total += w * _normalized(np.array(raw, dtype=np.float64), config.normalize)
        wsum += w
    combined = total / wsum
    return [replace(h, combined=float(c)) for h, c in zip(hyps, combined)]


def rank(hyps: Iterable[Hypothesis]) -> list[Hypothesis]:
    """Descending combined score; ties broken by (src url, tgt url)."""
    return sorted(hyps, key=lambda h: h.rank_key)


def competitive_link(hyps: Iterable[Hypothesis]) -> list[Hypothesis]:
    """Greedy 1:1 alignment: accept in rank order unless a side is taken."""
    used_src: set[int] = set()
    used_tgt: set[int] = set()
    kept = []
    for h in rank(hyps):
        if h.src in used_src or h.tgt in used_tgt:
            continue
        used_src.add(h.src)
        used_tgt.add(h.tgt)
        kept.append(h)
    return kept


def emit_ranked_list(hyps: Iterable[Hypothesis], path: str | Path) -> None:
    """Write ``combined<TAB>src_url<TAB>tgt_url`` lines in rank order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for h in rank(hyps):
            fh.write(f"{h.combined:.6f}\t{h.src_url}\t{h.tgt_url}\n")


def load_alignment(path: str | Path) -> list[tuple[float, str, str]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"{path}:{lineno}: expected score, src_url, tgt_url")
            out.append((float(fields[0]), fields[1], fields[2]))
    return out


def align_domain(
    domain: str,
    corpus: Corpus,
    embeddings: np.ndarray,
    url_scorer: UrlScorer | None,
    config: WeightConfig,
    src_lang: str,
    tgt_lang: str,
    top_k: int = 0,
) -> list[Hypothesis]:
    hyps = generate_hypotheses(domain, corpus, embeddings, url_scorer, config, src_lang, tgt_lang, top_k)
    return competitive_link(combine_scores(hyps, config))


def align_corpus(
    corpus: Corpus,
    embeddings: np.ndarray,
    url_scorer: UrlScorer | None,
    config: WeightConfig,
    src_lang: str,
    tgt_lang: str,
    domains: Iterable[str] | None = None,
    top_k: int = 0,
    workers: int = 1,
) -> list[Hypothesis]:
    """Link every domain independently and merge the results in rank order."""
    names = sorted(domains) if domains is not None else corpus.domains

    def run(d: str) -> list[Hypothesis]:
        return align_domain(d, corpus, embeddings, url_scorer, config, src_lang, tgt_lang, top_k)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, names))
    else:
        parts = [run(d) for d in names]
    return rank(h for part in parts for h in part)
