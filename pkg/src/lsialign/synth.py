"""Synthetic bilingual web-site fixtures with planted ground truth.

Each domain is a small web site. Its pseudo-English pages start with a
fixed boilerplate block, followed by payload drawn from a per-page mixture
of global topics and site-local jargon topics, plus a few page-specific
names. A fraction of pages are templated variants of earlier pages.
Pseudo-French counterparts are word-by-word images under a bijective
dictionary (names map to themselves, about half the words are cognates),
with a fraction ``noise`` of tokens replaced at random.

URLs follow one of three per-site styles: numeric id, title slug, or
slug plus id. The French page shares the English page id unless
``url_noise`` gives it its own numbering.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus, Document, PairList, dump_corpus, dump_pairs

_EN_ONSETS = ["b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "br", "st", "tr", "pl"]
_EN_VOWELS = ["a", "e", "i", "o", "u", "ea", "ou"]
_FR_ONSETS = ["b", "ch", "d", "f", "g", "j", "l", "m", "n", "p", "qu", "r", "s", "t", "v", "gr", "fl", "pr"]
_FR_VOWELS = ["a", "e", "é", "è", "i", "o", "u", "au", "oi", "eu"]
_TLDS = ["com", "org", "fr", "ca", "net"]
_URL_STYLES = ("id", "slug", "slug-id")


@dataclass(frozen=True)
class SynthConfig:
    domains: int = 20
    docs_per_lang: int = 30
    vocab_size: int = 3000
    topics: int = 40
    topics_per_domain: int = 6
    topic_size: int = 120
    jargon_size: int = 150
    doc_len: int = 60
    boilerplate: float = 0.3
    jargon_rate: float = 0.75
    local_topics: int = 5
    names_per_doc: int = 3
    name_rate: float = 0.05
    noise: float = 0.1
    cognates: float = 0.5
    url_noise: float = 0.3
    duplicates: float = 0.0
    distractors: int = 0
    dirichlet_alpha: float = 0.3
    near_duplicates: float = 0.4
    variant_change: float = 0.2
    url_style: str = "mixed"
    heldout_domains: int = 0
    seed: int = 0
    src_lang: str = "en"
    tgt_lang: str = "fr"


@dataclass
class SynthFixture:
    corpus: Corpus
    pairs: PairList
    heldout: PairList
    manifest: dict

    def write(self, outdir: str | Path) -> dict[str, Path]:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "docs": out / "docs.tsv",
            "pairs": out / "pairs.tsv",
            "manifest": out / "manifest.json",
        }
        dump_corpus(self.corpus, paths["docs"])
        dump_pairs(self.pairs, paths["pairs"])
        if len(self.heldout):
            paths["heldout"] = out / "gold_heldout.tsv"
            dump_pairs(self.heldout, paths["heldout"])
        paths["manifest"].write_text(json.dumps(self.manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return paths


class _Lexicon:
    """Unique pseudo-words for one language."""

    def __init__(self, rng: np.random.Generator, onsets: list[str], vowels: list[str]):
        self.rng = rng
        self.onsets = onsets
        self.vowels = vowels
        self.seen: set[str] = set()

    def word(self, min_syl: int = 2, max_syl: int = 4) -> str:
        while True:
            n = int(self.rng.integers(min_syl, max_syl + 1))
            w = "".join(
                self.onsets[self.rng.integers(len(self.onsets))] + self.vowels[self.rng.integers(len(self.vowels))]
                for _ in range(n)
            )
            if w not in self.seen:
                self.seen.add(w)
                return w

    def words(self, n: int, **kw) -> list[str]:
        return [self.word(**kw) for _ in range(n)]


def _zipf(n: int, rng: np.random.Generator) -> np.ndarray:
    p = 1.0 / np.arange(1, n + 1)
    rng.shuffle(p)
    return p / p.sum()


def generate(cfg: SynthConfig) -> SynthFixture:
    rng = np.random.default_rng(cfg.seed)
    en = _Lexicon(rng, _EN_ONSETS, _EN_VOWELS)
    fr = _Lexicon(rng, _FR_ONSETS, _FR_VOWELS)

    def fr_word(w: str) -> str:
        # cognate: keep the stem, swap the ending
        if rng.random() < cfg.cognates:
            for _ in range(8):
                c = w[: max(len(w) - 1, 2)] + _FR_VOWELS[rng.integers(len(_FR_VOWELS))] + ("" if rng.random() < 0.5 else "s")
                if c not in fr.seen:
                    fr.seen.add(c)
                    return c
        return fr.word()

    def fr_words(ws: list[str]) -> list[str]:
        return [fr_word(w) for w in ws]

    en_vocab = en.words(cfg.vocab_size)
    fr_vocab = fr_words(en_vocab)
    dictionary = dict(zip(en_vocab, fr_vocab))

    topics = []
    for _ in range(cfg.topics):
        members = rng.choice(cfg.vocab_size, size=min(cfg.topic_size, cfg.vocab_size), replace=False)
        topics.append((members, _zipf(members.size, rng)))

    docs: list[Document] = []
    pairs: list[tuple[str, str]] = []
    duplicates: list[list[str]] = []
    distractors: list[str] = []
    domain_names: list[str] = []
    styles: dict[str, str] = {}
    taken: set[str] = set()

    def translate(tokens: list[str]) -> list[str]:
        flips = rng.random(len(tokens)) < cfg.noise
        return [
            fr_vocab[rng.integers(cfg.vocab_size)] if flip else dictionary[tok]
            for tok, flip in zip(tokens, flips)
        ]

    for d in range(cfg.domains):
        domain = f"www.{en.word(2, 3)}{d:02d}.{_TLDS[d % len(_TLDS)]}"
        domain_names.append(domain)
        jargon_en = en.words(cfg.jargon_size)
        for w, f in zip(jargon_en, fr_words(jargon_en)):
            dictionary[w] = f
        local_topics = []
        for _ in range(max(cfg.local_topics, 1)):
            members = rng.choice(cfg.jargon_size, size=max(cfg.jargon_size // 2, 1), replace=False)
            local_topics.append((members, _zipf(members.size, rng)))
        menu_len = int(round(cfg.boilerplate * cfg.doc_len))
        menu_en = en.words(max(menu_len // 2, 1)) if menu_len else []
        for w, f in zip(menu_en, fr_words(menu_en)):
            dictionary[w] = f
        menu = [menu_en[rng.integers(len(menu_en))] for _ in range(menu_len)] if menu_len else []
        sections = [en.word(2, 3) for _ in range(4)]
        for w in sections:
            dictionary[w] = fr_word(w)
        dom_topics = rng.choice(cfg.topics, size=min(cfg.topics_per_domain, cfg.topics), replace=False)
        payload_len = max(cfg.doc_len - menu_len, 1)
        page_ids = rng.permutation(np.arange(100, 100 + 10 * (cfg.docs_per_lang + 2 * cfg.distractors) + 10))
        next_id = iter(page_ids.tolist())
        fr_ids = iter(rng.permutation(np.arange(5000, 5000 + 10 * (cfg.docs_per_lang + cfg.distractors) + 10)).tolist())

        style = _URL_STYLES[int(rng.integers(len(_URL_STYLES)))] if cfg.url_style == "mixed" else cfg.url_style
        styles[domain] = style

        def draw_payload(n: int, theta: np.ndarray, page_names: list[str]) -> list[str]:
            theta, phi = theta[: dom_topics.size], theta[dom_topics.size :]
            u = rng.random(n)
            name_pick = rng.integers(max(len(page_names), 1), size=n)
            y = rng.choice(len(local_topics), size=n, p=phi)
            local_pick = [m[rng.choice(m.size, size=n, p=p)] for m, p in local_topics]
            z = rng.choice(dom_topics.size, size=n, p=theta)
            topic_pick = [members[rng.choice(members.size, size=n, p=p)] for members, p in (topics[t] for t in dom_topics)]
            toks = []
            for i in range(n):
                if u[i] < cfg.name_rate and page_names:
                    toks.append(page_names[name_pick[i]])
                elif u[i] < cfg.name_rate + cfg.jargon_rate:
                    toks.append(jargon_en[local_pick[y[i]][i]])
                else:
                    toks.append(en_vocab[topic_pick[z[i]][i]])
            return toks

        pages: list[tuple[list[str], list[str], np.ndarray]] = []

        def page() -> tuple[list[str], str]:
            if pages and rng.random() < cfg.near_duplicates:
                # templated variant of an earlier page (calendar, listing, ...)
                base, page_names, theta = pages[int(rng.integers(len(pages)))]
                toks = list(base)
                fresh = draw_payload(len(toks), theta, page_names)
                for i in np.flatnonzero(rng.random(len(toks)) < cfg.variant_change):
                    toks[i] = fresh[i]
            else:
                theta = np.concatenate([
                    rng.dirichlet([cfg.dirichlet_alpha] * dom_topics.size),
                    rng.dirichlet([cfg.dirichlet_alpha] * len(local_topics)),
                ])
                page_names = [en.word(2, 3).capitalize() for _ in range(cfg.names_per_doc)]
                dictionary.update((n, n) for n in page_names)
                toks = draw_payload(max(1, int(rng.poisson(payload_len))), theta, page_names)
            pages.append((toks, page_names, theta))
            return toks, sections[rng.integers(len(sections))]

        def url(lang: str, section: str, toks: list[str], pid: int) -> str:
            slug = "-".join(toks[:2])
            if style == "id":
                return f"http://{domain}/{lang}/{section}/article.php?id={pid}"
            if style == "slug":
                return f"http://{domain}/{lang}/{section}/{slug}.html"
            return f"http://{domain}/{lang}/{section}/{slug}-{pid}.html"

        def text(body: list[str], lang: str) -> str:
            head = menu if lang == cfg.src_lang else [dictionary[w] for w in menu]
            return " ".join(head + body)

        for _ in range(cfg.docs_per_lang):
            toks, section = page()
            pid = next(next_id)
            fr_toks = translate(toks)
            fid = next(fr_ids) if rng.random() < cfg.url_noise else pid
            en_url = url(cfg.src_lang, section, toks, pid)
            fr_url = url(cfg.tgt_lang, dictionary[section], fr_toks, fid)
            if en_url in taken or fr_url in taken:
                en_url += f"?v={pid}"
                fr_url += f"?v={fid}"
            taken.update((en_url, fr_url))
            docs.append(Document(domain, cfg.src_lang, en_url, text(toks, cfg.src_lang)))
            docs.append(Document(domain, cfg.tgt_lang, fr_url, text(fr_toks, cfg.tgt_lang)))
            gold_tgt = fr_url
            if cfg.duplicates > 0 and rng.random() < cfg.duplicates:
                alias = f"http://{domain}/index.php?page={fid}&lang={cfg.tgt_lang}"
                docs.append(Document(domain, cfg.tgt_lang, alias, text(fr_toks, cfg.tgt_lang)))
                if rng.random() < 0.5:
                    gold_tgt = alias
                duplicates.append([fr_url, alias])
            pairs.append((en_url, gold_tgt))

        for _ in range(cfg.distractors):
            for lang in (cfg.src_lang, cfg.tgt_lang):
                toks, section = page()
                if lang == cfg.tgt_lang:
                    toks = translate(toks)
                    section = dictionary[section]
                u = url(lang, section, toks, next(next_id))
                if u in taken:
                    u += f"?d={len(distractors)}"
                taken.add(u)
                docs.append(Document(domain, lang, u, text(toks, lang)))
                distractors.append(u)

    corpus = Corpus(tuple(docs))
    pair_list = PairList(tuple(pairs))
    held = set(sorted(domain_names)[: cfg.heldout_domains])
    heldout = pair_list.restrict(corpus, keep=held) if held else PairList()
    manifest = {
        "config": asdict(cfg),
        "domains": domain_names,
        "heldout_domains": sorted(held),
        "n_documents": len(corpus),
        "n_pairs": len(pair_list),
        "duplicates": duplicates,
        "distractors": distractors,
        "url_styles": styles,
    }
    return SynthFixture(corpus, pair_list, heldout, manifest)
