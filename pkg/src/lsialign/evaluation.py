"""Strict and content-based (soft) recall of predicted document pairs."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, CorpusError, PairList, tokenize_text
from .scoring import lcss_len

DEFAULT_THRESHOLDS = (1.00, 0.99, 0.95, 0.90)
SOFT_MODES = ("either", "both")

Pair = tuple[str, str]


def strict_recall(predicted: Iterable[Pair], gold: PairList | Sequence[Pair]) -> float:
    gold = list(gold)
    if not gold:
        raise ValueError("gold pair list is empty")
    pred = set(predicted)
    return sum(p in pred for p in gold) / len(gold)


def soft_doc_similarity(text1: str, text2: str) -> float:
    """Dice-style LCS ratio over whitespace tokens: ``2*lcss / (len1 + len2)``."""
    a = tokenize_text(text1)
    b = tokenize_text(text2)
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    if a == b:
        return 1.0
    return 2.0 * lcss_len(a, b) / (len(a) + len(b))


class SoftMatcher:
    """Decides soft recovery of gold pairs against a fixed prediction set."""

    def __init__(self, predicted: Iterable[Pair], corpus: Corpus, mode: str = "either"):
        if mode not in SOFT_MODES:
            raise ValueError(f"soft mode must be one of {SOFT_MODES}")
        self.corpus = corpus
        self.mode = mode
        self.by_src: dict[str, list[str]] = {}
        self.by_tgt: dict[str, list[str]] = {}
        for s, t in predicted:
            corpus.doc_id(s)
            corpus.doc_id(t)
            self.by_src.setdefault(s, []).append(t)
            self.by_tgt.setdefault(t, []).append(s)
        self._sims: dict[tuple[str, str], float] = {}

    def similarity(self, url1: str, url2: str) -> float:
        if url1 == url2:
            return 1.0
        key = (url1, url2) if url1 <= url2 else (url2, url1)
        sim = self._sims.get(key)
        if sim is None:
            sim = soft_doc_similarity(self.corpus.lookup(url1).text, self.corpus.lookup(url2).text)
            self._sims[key] = sim
        return sim

    def best_target(self, src: str, tgt: str) -> float:
        """Highest similarity between ``tgt`` and any target predicted for ``src``."""
        return max((self.similarity(t, tgt) for t in self.by_src.get(src, ())), default=0.0)

    def best_source(self, src: str, tgt: str) -> float:
        return max((self.similarity(s, src) for s in self.by_tgt.get(tgt, ())), default=0.0)

    def recovered(self, src: str, tgt: str, threshold: float) -> bool:
        self.corpus.doc_id(src)
        self.corpus.doc_id(tgt)
        fwd = self.best_target(src, tgt) >= threshold
        if self.mode == "either" and fwd:
            return True
        bwd = self.best_source(src, tgt) >= threshold
        return (fwd and bwd) if self.mode == "both" else bwd


def soft_recall(
    predicted: Iterable[Pair],
    gold: PairList | Sequence[Pair],
    corpus: Corpus,
    threshold: float,
    mode: str = "either",
) -> float:
    """Fraction of gold pairs recovered up to content similarity ``threshold``.

    A gold pair (s, t) is recovered if s is predicted with some t' whose
    text is at least ``threshold`` similar to t, or t is predicted with
    some s' similar to s (``mode="both"`` requires both directions).
    """
    gold = list(gold)
    if not gold:
        raise ValueError("gold pair list is empty")
    matcher = SoftMatcher(predicted, corpus, mode)
    return sum(matcher.recovered(s, t, threshold) for s, t in gold) / len(gold)


def miss_report(
    predicted: Iterable[Pair],
    gold: PairList | Sequence[Pair],
    corpus: Corpus,
    threshold: float = 0.95,
    mode: str = "either",
) -> dict[str, int]:
    """Per-domain count of gold pairs not recovered at ``threshold``."""
    matcher = SoftMatcher(predicted, corpus, mode)
    misses: Counter[str] = Counter()
    for s, t in gold:
        if not matcher.recovered(s, t, threshold):
            misses[corpus.lookup(s).domain] += 1
    return dict(misses)


def render_misses(misses: dict[str, int], aggregate_singletons: bool = True) -> str:
    """Two-column table of misses per domain, largest first.

    Domains with a single miss are folded into an ``other`` row.
    """
    rows = sorted(misses.items(), key=lambda kv: (-kv[1], kv[0]))
    other = 0
    lines = [f"{'domain':<40} missed pairs"]
    for domain, n in rows:
        if aggregate_singletons and n == 1:
            other += n
            continue
        lines.append(f"{domain:<40} {n:>12d}")
    if other:
        lines.append(f"{'other':<40} {other:>12d}")
    return "\n".join(lines) + "\n"


@dataclass
class EvalReport:
    strict_recall: float
    soft_recall: dict[float, float]
    per_domain_misses: dict[str, int]
    total_gold: int
    miss_threshold: float = 0.95
    extra: dict[str, float] = field(default_factory=dict)

    def columns(self) -> list[tuple[str, float]]:
        cols = [("strict", self.strict_recall)]
        for th in sorted(self.soft_recall, reverse=True):
            cols.append((f"{th:.2f}", self.soft_recall[th]))
        return cols

    def render_table(self, label: str = "") -> str:
        cols = self.columns()
        header = f"{'':<24}" + "".join(f"{name:>8}" for name, _ in cols)
        row = f"{label:<24}" + "".join(f"{100 * v:>8.1f}" for _, v in cols)
        return header + "\n" + row + "\n"

    def to_kv(self) -> str:
        lines = [f"total_gold\t{self.total_gold}", f"strict_recall\t{self.strict_recall:.6f}"]
        for th in sorted(self.soft_recall, reverse=True):
            lines.append(f"soft_recall@{th:.2f}\t{self.soft_recall[th]:.6f}")
        for k, v in sorted(self.extra.items()):
            lines.append(f"{k}\t{v}")
        for domain, n in sorted(self.per_domain_misses.items(), key=lambda kv: (-kv[1], kv[0])):
            lines.append(f"misses@{self.miss_threshold:.2f}:{domain}\t{n}")
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path, label: str = "") -> None:
        """Write the key-value file to ``path`` and the table to ``path.txt``."""
        Path(path).write_text(self.to_kv(), encoding="utf-8")
        Path(str(path) + ".txt").write_text(
            self.render_table(label) + "\n" + render_misses(self.per_domain_misses), encoding="utf-8"
        )


def evaluate(
    predicted: Iterable[Pair],
    gold: PairList | Sequence[Pair],
    corpus: Corpus,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    miss_threshold: float = 0.95,
    mode: str = "either",
) -> EvalReport:
    gold = list(gold)
    predicted = list(predicted)
    if not gold:
        raise ValueError("gold pair list is empty")
    for th in thresholds:
        if not 0.0 < th <= 1.0:
            raise ValueError(f"threshold {th} outside (0, 1]")
    for s, t in gold:
        try:
            corpus.doc_id(s)
            corpus.doc_id(t)
        except CorpusError as exc:
            raise CorpusError(f"gold pair cannot be resolved: {exc}") from None
    matcher = SoftMatcher(predicted, corpus, mode)
    soft = {th: sum(matcher.recovered(s, t, th) for s, t in gold) / len(gold) for th in thresholds}
    misses: Counter[str] = Counter()
    for s, t in gold:
        if not matcher.recovered(s, t, miss_threshold):
            misses[corpus.lookup(s).domain] += 1
    return EvalReport(strict_recall(predicted, gold), soft, dict(misses), len(gold), miss_threshold)
