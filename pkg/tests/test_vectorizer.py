import math

import numpy as np
import pytest

from lsialign.corpus import Corpus, Document, PairList
from lsialign.vectorizer import (
    GLOBAL_DOMAIN,
    DomainIdf,
    SparseVector,
    build_term_doc_matrix,
    build_vocabulary,
    compute_domain_idf,
    compute_idf_table,
    doc_to_column,
    load_matrix_dump,
    weight_term,
)


def docs(*rows):
    return Corpus(tuple(Document(d, l, f"http://{d}/{i}", t) for i, (d, l, t) in enumerate(rows)))


class TestVocabulary:
    def test_languages_partitioned(self):
        vocab = build_vocabulary(docs(("x", "en", "dog"), ("x", "fr", "dog")))
        assert len(vocab) == 2
        assert vocab.get(("en", "dog")) != vocab.get(("fr", "dog"))

    def test_repeats_collapse(self):
        vocab = build_vocabulary(docs(("x", "en", "a a b")))
        assert vocab.terms == (("en", "a"), ("en", "b"))

    def test_empty_corpus(self):
        with pytest.raises(ValueError):
            build_vocabulary(Corpus())

    def test_dense_sorted_indices(self, toy_corpus):
        vocab = build_vocabulary(toy_corpus)
        assert sorted(vocab.index.values()) == list(range(len(vocab)))
        assert list(vocab.terms) == sorted(vocab.terms)

    def test_case_folded(self):
        assert build_vocabulary(docs(("x", "en", "Dog DOG dog"))).terms == (("en", "dog"),)

    def test_fingerprint_tracks_terms(self, toy_corpus):
        a = build_vocabulary(toy_corpus)
        b = build_vocabulary(docs(("x", "en", "dog")))
        assert len(a.fingerprint()) == 32
        assert a.fingerprint() == build_vocabulary(toy_corpus).fingerprint()
        assert a.fingerprint() != b.fingerprint()


class TestIdf:
    def test_half_the_documents(self):
        c = docs(("x", "en", "t u"), ("x", "en", "t"), ("x", "en", "u"), ("x", "en", "v"))
        assert compute_domain_idf(c, "x")[("en", "t")] == pytest.approx(math.log(2), abs=1e-12)
        assert compute_domain_idf(c, "x")[("en", "t")] == pytest.approx(0.6931, abs=1e-4)

    def test_in_every_document(self):
        c = docs(("x", "en", "t a"), ("x", "en", "t b"), ("x", "en", "t"))
        assert compute_domain_idf(c, "x")[("en", "t")] == 0.0

    def test_one_of_ten(self):
        c = docs(*([("x", "en", "rare")] + [("x", "en", f"w{i}") for i in range(9)]))
        assert compute_domain_idf(c, "x")[("en", "rare")] == pytest.approx(2.3026, abs=1e-4)

    def test_counts_both_languages(self):
        c = docs(("x", "en", "t"), ("x", "fr", "s"))
        entry = compute_domain_idf(c, "x")
        assert entry.doc_count == 2
        assert entry[("en", "t")] == pytest.approx(math.log(2))

    def test_unknown_domain(self, toy_corpus):
        with pytest.raises(KeyError):
            compute_domain_idf(toy_corpus, "nowhere.net")

    def test_domains_independent(self):
        base = [("a", "en", "x y"), ("a", "en", "x"), ("b", "en", "x z"), ("b", "en", "q")]
        before = compute_idf_table(docs(*base))["b"]
        after = compute_idf_table(docs(*base, ("a", "en", "x w"), ("a", "en", "z")))["b"]
        assert before == after

    def test_global_scope(self, toy_corpus):
        table = compute_idf_table(toy_corpus, "global")
        assert set(table) == {GLOBAL_DOMAIN}
        assert table[GLOBAL_DOMAIN].doc_count == len(toy_corpus)


class TestWeightTerm:
    def test_single_count(self):
        assert weight_term(1, 0.6931) == 0.6931

    def test_ten_counts(self):
        assert weight_term(10, 1.0) == pytest.approx(3.3026, abs=1e-4)
        assert weight_term(10, 1.0) == pytest.approx(1 + math.log(10), rel=1e-15)

    def test_zero_idf(self):
        assert weight_term(1, 0.0) == 0.0

    def test_zero_count(self):
        with pytest.raises(ValueError):
            weight_term(0, 1.0)


class TestDocToColumn:
    def setup_method(self):
        self.doc = Document("x", "en", "u", "a a b")
        self.vocab = build_vocabulary(Corpus((self.doc,)))
        self.idf = {"x": DomainIdf(2, {("en", "a"): 0.0, ("en", "b"): 1.0})}

    def test_zero_idf_dropped(self):
        col = doc_to_column(self.doc, self.vocab, self.idf)
        assert col.indices.tolist() == [self.vocab.get(("en", "b"))]
        assert col.values.tolist() == [1.0]

    def test_all_oov(self):
        col = doc_to_column(Document("x", "en", "v", "zzz qqq"), self.vocab, self.idf)
        assert col.nnz == 0

    def test_empty_text(self):
        assert doc_to_column(Document("x", "en", "v", ""), self.vocab, self.idf).nnz == 0

    def test_missing_domain(self):
        with pytest.raises(KeyError):
            doc_to_column(Document("y", "en", "v", "a"), self.vocab, self.idf)


class TestSparseVector:
    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            SparseVector(np.array([2, 1]), np.array([1.0, 1.0]), 3)

    def test_rejects_zeros(self):
        with pytest.raises(ValueError):
            SparseVector(np.array([0]), np.array([0.0]), 3)

    def test_add_and_scale(self):
        a = SparseVector(np.array([0, 2]), np.array([1.0, 2.0]), 4)
        b = SparseVector(np.array([1, 2]), np.array([3.0, -2.0]), 4)
        assert (a + b).to_dense().tolist() == [1.0, 3.0, 0.0, 0.0]
        assert (a + b).nnz == 2
        assert (2 * a).to_dense().tolist() == [2.0, 0.0, 4.0, 0.0]


def hand_matrix() -> np.ndarray:
    """Expected weights of the toy fixture, evaluated term by term.

    Rows (sorted by lang, token): en bird cat dog moon star sun,
    fr chat chien lune oiseau soleil étoile. Every domain has N = 4 pages.
    """
    ln2, ln4 = math.log(2), math.log(4)
    m = np.zeros((12, 2))
    # pair 0: "dog cat" / "chien chat"; dog and chien occur in 2 of 4 pages
    m[1, 0] = ln4  # cat
    m[2, 0] = ln2  # dog
    m[6, 0] = ln4  # chat
    m[7, 0] = ln2  # chien
    # pair 1: "sun sun moon" / "soleil soleil lune"; all df = 1
    m[3, 1] = ln4  # moon
    m[5, 1] = (1 + ln2) * ln4  # sun, count 2
    m[8, 1] = ln4  # lune
    m[10, 1] = (1 + ln2) * ln4  # soleil, count 2
    return m


class TestTermDocMatrix:
    def test_hand_computed(self, toy_corpus, toy_pairs):
        vocab = build_vocabulary(toy_corpus)
        assert [t for _, t in vocab.terms] == [
            "bird", "cat", "dog", "moon", "star", "sun", "chat", "chien", "lune", "oiseau", "soleil", "étoile",
        ]
        tdm = build_term_doc_matrix(toy_corpus, toy_pairs, vocab, compute_idf_table(toy_corpus))
        assert tdm.shape == (12, 2)
        np.testing.assert_allclose(tdm.matrix.toarray(), hand_matrix(), rtol=1e-15, atol=0)
        assert tdm.columns == toy_pairs.pairs

    def test_column_is_sum_of_sides(self, toy_corpus, toy_pairs):
        vocab = build_vocabulary(toy_corpus)
        idf = compute_idf_table(toy_corpus)
        tdm = build_term_doc_matrix(toy_corpus, toy_pairs, vocab, idf)
        for j, (s, t) in enumerate(toy_pairs):
            expected = (
                doc_to_column(toy_corpus.lookup(s), vocab, idf).to_dense()
                + doc_to_column(toy_corpus.lookup(t), vocab, idf).to_dense()
            )
            np.testing.assert_array_equal(tdm.matrix[:, j].toarray().ravel(), expected)

    def test_weights_positive(self, toy_corpus, toy_pairs):
        tdm = build_term_doc_matrix(toy_corpus, toy_pairs, build_vocabulary(toy_corpus), compute_idf_table(toy_corpus))
        assert np.all(tdm.matrix.data > 0)

    def test_single_doc_domains_degenerate(self, caplog):
        c = docs(("x", "en", "dog"), ("y", "fr", "chien"))
        pairs = PairList(((c[0].url, c[1].url),))
        tdm = build_term_doc_matrix(c, pairs, build_vocabulary(c), compute_idf_table(c))
        assert tdm.nnz == 0
        assert tdm.shape == (2, 1)
        assert "empty" in caplog.text

    def test_empty_pairs(self, toy_corpus):
        with pytest.raises(ValueError):
            build_term_doc_matrix(toy_corpus, PairList(), build_vocabulary(toy_corpus), compute_idf_table(toy_corpus))

    def test_unresolvable_url(self, toy_corpus):
        with pytest.raises(ValueError, match="nowhere"):
            build_term_doc_matrix(
                toy_corpus,
                PairList((("http://nowhere", "http://a.com/fr/1"),)),
                build_vocabulary(toy_corpus),
                compute_idf_table(toy_corpus),
            )

    def test_deterministic(self, toy_corpus, toy_pairs):
        def build():
            return build_term_doc_matrix(
                toy_corpus, toy_pairs, build_vocabulary(toy_corpus), compute_idf_table(toy_corpus)
            ).matrix

        a, b = build(), build()
        assert a.data.tobytes() == b.data.tobytes()
        assert a.indices.tobytes() == b.indices.tobytes()

    def test_dump_round_trip(self, tmp_path, toy_corpus, toy_pairs):
        tdm = build_term_doc_matrix(toy_corpus, toy_pairs, build_vocabulary(toy_corpus), compute_idf_table(toy_corpus))
        path = tmp_path / "m.txt"
        tdm.dump(path)
        assert path.read_text().splitlines()[0] == "12 2 8"
        back = load_matrix_dump(path)
        np.testing.assert_array_equal(back.toarray(), tdm.matrix.toarray())
