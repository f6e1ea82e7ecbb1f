from __future__ import annotations

import pytest

from lsialign.corpus import Corpus, Document, PairList

ACCEPTANCE_LINES: list[str] = []


def record(name: str, passed: bool | None, detail: str = "") -> bool:
    """Log one criterion; ``passed=None`` marks it as skipped."""
    status = "SKIP" if passed is None else "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"{status}  {name}" + (f"  ({detail})" if detail else ""))
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def toy_corpus() -> Corpus:
    """Two domains, two pages per language each."""
    return Corpus(
        (
            Document("a.com", "en", "http://a.com/en/1", "dog cat"),
            Document("a.com", "en", "http://a.com/en/2", "dog bird"),
            Document("a.com", "fr", "http://a.com/fr/1", "chien chat"),
            Document("a.com", "fr", "http://a.com/fr/2", "chien oiseau"),
            Document("b.org", "en", "http://b.org/en/1", "sun sun moon"),
            Document("b.org", "en", "http://b.org/en/2", "star"),
            Document("b.org", "fr", "http://b.org/fr/1", "soleil soleil lune"),
            Document("b.org", "fr", "http://b.org/fr/2", "étoile"),
        )
    )


@pytest.fixture
def toy_pairs() -> PairList:
    return PairList((("http://a.com/en/1", "http://a.com/fr/1"), ("http://b.org/en/1", "http://b.org/fr/1")))
