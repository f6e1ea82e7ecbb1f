"""End-to-end train / align / evaluate helpers shared by the CLI and tests."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, PairList
from .evaluation import DEFAULT_THRESHOLDS, EvalReport, evaluate
from .linking import Hypothesis, WeightConfig, combine_scores, competitive_link, generate_hypotheses, rank
from .lsi import LsiModel, embed_corpus, train_lsi
from .scoring import UrlScorer
from .vectorizer import IdfTable, Vocabulary, build_term_doc_matrix, build_vocabulary, compute_idf_table

log = logging.getLogger(__name__)

EXCLUSIONS = ("none", "heldout", "loo")
ALL_SCORERS = WeightConfig({"cos": 1.0, "lcos": 1.0, "url": 1.0})


@dataclass(frozen=True)
class LsiParams:
    rank: int = 1000
    seed: int = 0
    oversample: int = 20
    power_iters: int = 2
    scaling: str = "singular_values"


class Aligner:
    """Holds the corpus-level state (vocabulary, idf, URL statistics)."""

    def __init__(
        self,
        corpus: Corpus,
        src_lang: str = "en",
        tgt_lang: str = "fr",
        idf_scope: str = "domain",
        url_scope: str = "domain",
    ):
        if src_lang == tgt_lang:
            raise ValueError("source and target languages must differ")
        corpus.check_languages((src_lang, tgt_lang))
        self.corpus = corpus
        self.src_lang = src_lang
        self.tgt_lang = tgt_lang
        self.vocab: Vocabulary = build_vocabulary(corpus)
        self.idf: IdfTable = compute_idf_table(corpus, idf_scope)
        self.url_scorer = UrlScorer(corpus, url_scope)

    def train(self, pairs: PairList, params: LsiParams) -> LsiModel:
        tdm = build_term_doc_matrix(self.corpus, pairs, self.vocab, self.idf)
        log.info("term-document matrix: %d terms x %d pairs, %d nonzeros", *tdm.shape, tdm.nnz)
        return train_lsi(
            tdm,
            params.rank,
            seed=params.seed,
            oversample=params.oversample,
            power_iters=params.power_iters,
            vocab_fingerprint=self.vocab.fingerprint(),
        )

    def embed(self, model: LsiModel, scaling: str = "singular_values") -> np.ndarray:
        return embed_corpus(self.corpus, model, self.vocab, self.idf, scaling)

    def score(
        self,
        embeddings: np.ndarray,
        domains: Iterable[str] | None = None,
        config: WeightConfig = ALL_SCORERS,
        top_k: int = 0,
    ) -> dict[str, list[Hypothesis]]:
        """Scored (not yet combined) hypotheses per domain."""
        names = sorted(domains) if domains is not None else self.corpus.domains
        return {
            d: generate_hypotheses(
                d, self.corpus, embeddings, self.url_scorer, config, self.src_lang, self.tgt_lang, top_k
            )
            for d in names
        }


def link(scored: dict[str, list[Hypothesis]], config: WeightConfig) -> list[Hypothesis]:
    """Combine and competitively link each domain; merge in rank order."""
    out: list[Hypothesis] = []
    for domain in sorted(scored):
        out.extend(competitive_link(combine_scores(scored[domain], config)))
    return rank(out)


def as_pairs(hyps: Iterable[Hypothesis]) -> list[tuple[str, str]]:
    return [(h.src_url, h.tgt_url) for h in hyps]


def gold_domains(corpus: Corpus, gold: PairList) -> list[str]:
    return sorted(gold.by_domain(corpus))


def excluded_training(
    corpus: Corpus, train_pairs: PairList, gold: PairList, exclusion: str
) -> list[tuple[list[str], PairList]]:
    """Training sets per regime as ``[(evaluation domains, training pairs), ...]``.

    ``none`` trains once on everything; ``heldout`` trains once without any
    evaluation-domain pair; ``loo`` trains once per evaluation domain
    without that domain's pairs.
    """
    domains = gold_domains(corpus, gold)
    if exclusion == "none":
        return [(domains, train_pairs)]
    if exclusion == "heldout":
        return [(domains, train_pairs.restrict(corpus, drop=domains))]
    if exclusion == "loo":
        if len(set(train_pairs.by_domain(corpus)) | set(domains)) < 2:
            raise ValueError("leave-one-domain-out needs known pairs from at least two domains")
        return [([d], train_pairs.restrict(corpus, drop=[d])) for d in domains]
    raise ValueError(f"unknown exclusion mode {exclusion!r}; expected one of {EXCLUSIONS}")


def run_regime(
    aligner: Aligner,
    train_pairs: PairList,
    gold: PairList,
    exclusion: str,
    params: LsiParams,
    configs: Sequence[WeightConfig],
    top_k: int = 0,
    workers: int = 1,
) -> list[list[Hypothesis]]:
    """Align the gold domains under a training regime, once per weight config."""
    plan = excluded_training(aligner.corpus, train_pairs, gold, exclusion)
    for domains, pairs in plan:
        leaked = set(pairs.by_domain(aligner.corpus)) & set(domains) if exclusion != "none" else set()
        log.info(
            "regime %s: evaluating %d domain(s) with %d training pairs (%d from evaluation domains)",
            exclusion, len(domains), len(pairs), len(leaked),
        )
        if leaked:
            raise AssertionError(f"evaluation domains leaked into training: {sorted(leaked)}")
        if len(pairs) == 0:
            raise ValueError(f"no training pairs left for {domains} under exclusion {exclusion!r}")

    def job(item: tuple[list[str], PairList]) -> dict[str, list[Hypothesis]]:
        domains, pairs = item
        model = aligner.train(pairs, params)
        emb = aligner.embed(model, params.scaling)
        return aligner.score(emb, domains, _union(configs), top_k)

    if workers > 1 and len(plan) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, plan))
    else:
        parts = [job(item) for item in plan]
    scored: dict[str, list[Hypothesis]] = {}
    for part in parts:
        scored.update(part)
    return [link(scored, cfg) for cfg in configs]


def _union(configs: Sequence[WeightConfig]) -> WeightConfig:
    names = {n for cfg in configs for n in cfg.enabled}
    return WeightConfig({n: 1.0 for n in names})


def evaluate_hyps(
    hyps: Iterable[Hypothesis],
    gold: PairList,
    corpus: Corpus,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    mode: str = "either",
) -> EvalReport:
    return evaluate(as_pairs(hyps), gold, corpus, thresholds, mode=mode)
