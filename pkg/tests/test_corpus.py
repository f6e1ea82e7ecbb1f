import base64

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsialign.corpus import (
    Corpus,
    CorpusError,
    Document,
    PairList,
    dump_corpus,
    load_corpus,
    load_pairs,
    tokenize_text,
    tokenize_url,
)


def _b64(text: str) -> str:
    return base64.b64encode(text.encode("utf-8")).decode("ascii")


def write(tmp_path, name, content):
    p = tmp_path / name
    p.write_text(content, encoding="utf-8")
    return p


class TestLoadCorpus:
    def test_single_line(self, tmp_path):
        p = write(tmp_path, "docs.tsv", "ex.com\ten\thttp://ex.com/a\taGVsbG8=\n")
        corpus = load_corpus(p)
        assert list(corpus) == [Document("ex.com", "en", "http://ex.com/a", "hello")]
        assert corpus.by_url["http://ex.com/a"] == 0
        assert corpus.by_domain["ex.com"] == (0,)

    def test_empty_file(self, tmp_path):
        corpus = load_corpus(write(tmp_path, "docs.tsv", ""))
        assert len(corpus) == 0
        assert dict(corpus.by_domain) == {}

    def test_duplicate_url(self, tmp_path):
        line = "ex.com\ten\thttp://ex.com/a\taGVsbG8=\n"
        with pytest.raises(CorpusError, match="duplicate url 'http://ex.com/a'") as exc:
            load_corpus(write(tmp_path, "docs.tsv", line + line))
        assert exc.value.lineno == 2

    @pytest.mark.parametrize(
        "line, message",
        [
            ("ex.com\ten\thttp://ex.com/a\n", "4 tab-separated fields"),
            ("ex.com\ten\thttp://ex.com/a\t***\n", "base64"),
            ("ex.com\ten\thttp://ex.com/a\t" + base64.b64encode(b"\xff\xfe").decode() + "\n", "UTF-8"),
        ],
    )
    def test_malformed_line_reports_line_number(self, tmp_path, line, message):
        good = f"ex.com\ten\thttp://ex.com/ok\t{_b64('fine')}\n"
        with pytest.raises(CorpusError, match=message) as exc:
            load_corpus(write(tmp_path, "docs.tsv", good + line))
        assert exc.value.lineno == 2
        assert ":2:" in str(exc.value)

    def test_empty_text_kept(self, tmp_path):
        corpus = load_corpus(write(tmp_path, "docs.tsv", "ex.com\tfr\thttp://ex.com/b\t\n"))
        assert corpus[0].text == ""

    def test_language_check(self, toy_corpus):
        toy_corpus.check_languages(["en", "fr"])
        with pytest.raises(CorpusError, match="language 'fr'"):
            toy_corpus.check_languages(["en", "de"])

    def test_indexes_consistent(self, toy_corpus):
        for i, doc in enumerate(toy_corpus):
            assert toy_corpus.by_url[doc.url] == i
            assert i in toy_corpus.by_domain[doc.domain]
        assert sum(len(v) for v in toy_corpus.by_domain.values()) == len(toy_corpus)


_field = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc", "Zl", "Zp"), blacklist_characters="\t\n\r"),
    min_size=1,
    max_size=12,
)


@given(
    st.lists(
        st.tuples(_field, st.sampled_from(["en", "fr"]), _field, st.text(max_size=40)),
        max_size=8,
        unique_by=lambda d: d[2],
    )
)
def test_round_trip(tmp_path_factory, rows):
    corpus = Corpus(tuple(Document(*r) for r in rows))
    path = tmp_path_factory.mktemp("rt") / "docs.tsv"
    dump_corpus(corpus, path)
    assert load_corpus(path) == corpus


class TestLoadPairs:
    def test_one_pair(self, tmp_path):
        assert load_pairs(write(tmp_path, "p.tsv", "u1\tv1\n")).pairs == (("u1", "v1"),)

    def test_order_preserved(self, tmp_path):
        assert load_pairs(write(tmp_path, "p.tsv", "u2\tv2\nu1\tv1\n")).pairs == (("u2", "v2"), ("u1", "v1"))

    def test_repeated_source(self, tmp_path):
        with pytest.raises(CorpusError, match="repeated source url 'u1'"):
            load_pairs(write(tmp_path, "p.tsv", "u1\tv1\nu1\tv2\n"))

    def test_repeated_target(self, tmp_path):
        with pytest.raises(CorpusError, match="repeated target url 'v1'"):
            load_pairs(write(tmp_path, "p.tsv", "u1\tv1\nu2\tv1\n"))

    def test_field_count(self, tmp_path):
        with pytest.raises(CorpusError) as exc:
            load_pairs(write(tmp_path, "p.tsv", "u1\tv1\nu2\n"))
        assert exc.value.lineno == 2

    def test_empty(self, tmp_path):
        assert len(load_pairs(write(tmp_path, "p.tsv", ""))) == 0

    def test_constructor_enforces_one_to_one(self):
        with pytest.raises(CorpusError):
            PairList((("a", "b"), ("a", "c")))

    def test_restrict_by_domain(self, toy_corpus, toy_pairs):
        assert toy_pairs.restrict(toy_corpus, drop=["a.com"]).pairs == (toy_pairs.pairs[1],)
        assert toy_pairs.restrict(toy_corpus, keep=["a.com"]).pairs == (toy_pairs.pairs[0],)

    def test_resolve_unknown(self, toy_corpus):
        with pytest.raises(CorpusError, match="not found"):
            PairList((("http://nowhere", "http://a.com/fr/1"),)).resolve(toy_corpus)


class TestTokenizeText:
    def test_punctuation_kept(self):
        assert tokenize_text("Hello,  world") == ["Hello,", "world"]

    def test_empty(self):
        assert tokenize_text("") == []

    def test_repeats(self):
        assert tokenize_text("a b a") == ["a", "b", "a"]

    @given(st.text(min_size=1), st.text(min_size=1))
    def test_concatenation(self, t1, t2):
        assert tokenize_text(t1 + " " + t2) == tokenize_text(t1) + tokenize_text(t2)


class TestTokenizeUrl:
    def test_duplicate_url_example(self):
        assert tokenize_url("www.domain.com/index.html").tokens == ("www", "domain", "com", "index", "html")

    def test_letter_digit_split(self):
        assert tokenize_url("page123.html").tokens == ("page", "123", "html")

    def test_full_url(self):
        assert tokenize_url("http://ex.com/2016/05/article-42").tokens == (
            "http", "ex", "com", "2016", "05", "article", "42",
        )

    def test_underscore_and_unicode(self):
        assert tokenize_url("/fr/été_2016/noël").tokens == ("fr", "été", "2016", "noël")

    def test_non_decimal_numbers_are_separators(self):
        # superscript two is category No, not Nd
        assert tokenize_url("x²y").tokens == ("x", "y")

    @given(st.text())
    def test_token_shape(self, url):
        for tok in tokenize_url(url).tokens:
            assert tok
            assert tok.isalpha() or all(c.isdecimal() for c in tok)

    @given(st.text())
    def test_rejoin_idempotent(self, url):
        tokens = tokenize_url(url).tokens
        assert tokenize_url(" ".join(tokens)).tokens == tokens
