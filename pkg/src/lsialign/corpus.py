"""Document collections, gold pair lists and tokenizers.

Documents are stored one per line in a four-column TSV file::

    domain <TAB> lang <TAB> url <TAB> base64(utf-8 text)

Pair files hold two tab-separated URLs per line (source, target).
"""

from __future__ import annotations

import base64
import binascii
import itertools
import unicodedata
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping


class CorpusError(ValueError):
    """Raised for malformed or inconsistent corpus and pair files."""

    def __init__(self, message: str, path: str | Path | None = None, lineno: int | None = None):
        self.path = str(path) if path is not None else None
        self.lineno = lineno
        where = ""
        if path is not None:
            where = f"{path}:"
            if lineno is not None:
                where += f"{lineno}:"
            where += " "
        elif lineno is not None:
            where = f"line {lineno}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class Document:
    domain: str
    lang: str
    url: str
    text: str


@dataclass(frozen=True)
class Corpus:
    """An immutable, indexed collection of documents.

    Document ids are positions in ``documents``.
    """

    documents: tuple[Document, ...] = ()
    by_domain: Mapping[str, tuple[int, ...]] = field(init=False, repr=False, compare=False)
    by_url: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        docs = tuple(self.documents)
        object.__setattr__(self, "documents", docs)
        by_url: dict[str, int] = {}
        by_domain: dict[str, list[int]] = {}
        for i, doc in enumerate(docs):
            if not doc.url:
                raise CorpusError(f"document {i} has an empty url")
            if not doc.domain:
                raise CorpusError(f"document {doc.url!r} has an empty domain")
            if doc.url in by_url:
                raise CorpusError(f"duplicate url {doc.url!r}")
            by_url[doc.url] = i
            by_domain.setdefault(doc.domain, []).append(i)
        object.__setattr__(self, "by_url", MappingProxyType(by_url))
        object.__setattr__(
            self, "by_domain", MappingProxyType({d: tuple(ids) for d, ids in by_domain.items()})
        )

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def __getitem__(self, doc_id: int) -> Document:
        return self.documents[doc_id]

    @property
    def domains(self) -> list[str]:
        return sorted(self.by_domain)

    @property
    def languages(self) -> list[str]:
        return sorted({d.lang for d in self.documents})

    def doc_id(self, url: str) -> int:
        try:
            return self.by_url[url]
        except KeyError:
            raise CorpusError(f"url {url!r} not found in corpus") from None

    def lookup(self, url: str) -> Document:
        return self.documents[self.doc_id(url)]

    def domain_docs(self, domain: str, lang: str | None = None) -> list[int]:
        ids = self.by_domain.get(domain, ())
        if lang is None:
            return list(ids)
        return [i for i in ids if self.documents[i].lang == lang]

    def check_languages(self, languages: Iterable[str]) -> None:
        """Raise if any document carries a language outside ``languages``."""
        allowed = set(languages)
        for doc in self.documents:
            if doc.lang not in allowed:
                raise CorpusError(
                    f"document {doc.url!r} has language {doc.lang!r}, expected one of {sorted(allowed)}"
                )


@dataclass(frozen=True)
class PairList:
    """An ordered 1:1 list of (source_url, target_url) pairs."""

    pairs: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        pairs = tuple((str(s), str(t)) for s, t in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        seen_src: set[str] = set()
        seen_tgt: set[str] = set()
        for s, t in pairs:
            if s in seen_src:
                raise CorpusError(f"repeated source url {s!r}; gold alignment must be 1:1")
            if t in seen_tgt:
                raise CorpusError(f"repeated target url {t!r}; gold alignment must be 1:1")
            seen_src.add(s)
            seen_tgt.add(t)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[str, str]]:
        return iter(self.pairs)

    def resolve(self, corpus: Corpus) -> list[tuple[int, int]]:
        """Map every pair to document ids, raising on unknown URLs."""
        return [(corpus.doc_id(s), corpus.doc_id(t)) for s, t in self.pairs]

    def by_domain(self, corpus: Corpus) -> dict[str, list[tuple[str, str]]]:
        """Group pairs by the domain of their source document."""
        out: dict[str, list[tuple[str, str]]] = {}
        for s, t in self.pairs:
            out.setdefault(corpus.lookup(s).domain, []).append((s, t))
        return out

    def restrict(self, corpus: Corpus, keep: Iterable[str] = (), drop: Iterable[str] = ()) -> PairList:
        """Return the sub-list whose source domain is in ``keep`` (if given) and not in ``drop``."""
        keep, drop = set(keep), set(drop)
        out = []
        for s, t in self.pairs:
            domain = corpus.lookup(s).domain
            if (keep and domain not in keep) or domain in drop:
                continue
            out.append((s, t))
        return PairList(tuple(out))


def _lines(path: str | Path) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8", newline="\n") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if line:
                yield lineno, line


def load_corpus(path: str | Path) -> Corpus:
    """Read a document TSV file.

    Raises:
        CorpusError: on a malformed line (with its line number) or a
            duplicate URL.
    """
    docs: list[Document] = []
    seen: dict[str, int] = {}
    for lineno, line in _lines(path):
        fields = line.split("\t")
        if len(fields) != 4:
            raise CorpusError(f"expected 4 tab-separated fields, got {len(fields)}", path, lineno)
        domain, lang, url, payload = fields
        try:
            raw = base64.b64decode(payload, validate=True)
        except (binascii.Error, ValueError) as exc:
            raise CorpusError(f"invalid base64 text field ({exc})", path, lineno) from None
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorpusError(f"text is not valid UTF-8 ({exc.reason})", path, lineno) from None
        if not domain or not lang or not url:
            raise CorpusError("domain, lang and url must be non-empty", path, lineno)
        if url in seen:
            raise CorpusError(f"duplicate url {url!r} (first seen on line {seen[url]})", path, lineno)
        seen[url] = lineno
        docs.append(Document(domain, lang, url, text))
    return Corpus(tuple(docs))


def dump_corpus(corpus: Corpus | Iterable[Document], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in corpus:
            payload = base64.b64encode(doc.text.encode("utf-8")).decode("ascii")
            fh.write(f"{doc.domain}\t{doc.lang}\t{doc.url}\t{payload}\n")


def load_pairs(path: str | Path) -> PairList:
    """Read a pair TSV file, preserving order.

    Raises:
        CorpusError: on a wrong field count or a repeated source/target URL.
    """
    pairs: list[tuple[str, str]] = []
    src_seen: dict[str, int] = {}
    tgt_seen: dict[str, int] = {}
    for lineno, line in _lines(path):
        fields = line.split("\t")
        if len(fields) != 2:
            raise CorpusError(f"expected 2 tab-separated urls, got {len(fields)} fields", path, lineno)
        s, t = fields
        if s in src_seen:
            raise CorpusError(f"repeated source url {s!r} (line {src_seen[s]})", path, lineno)
        if t in tgt_seen:
            raise CorpusError(f"repeated target url {t!r} (line {tgt_seen[t]})", path, lineno)
        src_seen[s] = tgt_seen[t] = lineno
        pairs.append((s, t))
    return PairList(tuple(pairs))


def dump_pairs(pairs: Iterable[tuple[str, str]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s, t in pairs:
            fh.write(f"{s}\t{t}\n")


def tokenize_text(text: str) -> list[str]:
    """Split on runs of whitespace. No case folding, punctuation is kept."""
    return text.split()


def _char_class(ch: str) -> str | None:
    cat = unicodedata.category(ch)
    if cat[0] == "L":
        return "L"
    if cat == "Nd":
        return "N"
    return None


@dataclass(frozen=True)
class UrlTokens:
    url: str
    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)


def tokenize_url(url: str) -> UrlTokens:
    """Split a URL into maximal runs of letters and maximal runs of digits.

    Letters are Unicode categories L*, digits are Nd; everything else,
    including underscore, separates tokens and is dropped.

    >>> tokenize_url("page123.html").tokens
    ('page', '123', 'html')
    """
    tokens = tuple(
        "".join(chars)
        for cls, chars in itertools.groupby(url, key=_char_class)
        if cls is not None
    )
    return UrlTokens(url, tokens)


def is_numeric_token(token: str) -> bool:
    return bool(token) and _char_class(token[0]) == "N"
