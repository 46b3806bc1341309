"""Vocabulary and binary document-term matrix tests."""

import inspect
import random

import numpy as np
import pytest

from memtopics.dtm import (
    BinaryTermVectorizer,
    build_matrix,
    build_vocab,
    read_matrix_sidecar,
    write_matrix_csv,
    write_matrix_sidecar,
)
from memtopics.errors import DataError
from memtopics.textprep import TokenizedDoc


def doc(doc_id, *tokens):
    return TokenizedDoc(doc_id=doc_id, tokens=tuple(tokens))


class TestBuildVocab:
    def test_doc_frequency_is_presence_percentage(self):
        docs = [
            doc("d1", "data", "data", "law"),
            doc("d2", "data"),
            doc("d3", "user"),
            doc("d4", "law"),
        ]
        vocab = build_vocab(docs, top_n=10)
        df = dict(zip(vocab.terms, vocab.doc_frequency))
        assert df["data"] == pytest.approx(50.0)
        assert df["law"] == pytest.approx(50.0)
        assert df["user"] == pytest.approx(25.0)

    def test_top_n_with_term_tie_break(self):
        docs = [
            doc("d1", "a", "b"),
            doc("d2", "a", "c"),
            doc("d3", "a", "b", "c"),
            doc("d4", "a"),
        ]
        vocab = build_vocab(docs, top_n=2)
        assert vocab.terms == ("a", "b")

    def test_sorted_by_frequency_then_term(self):
        docs = [doc("d1", "z", "m"), doc("d2", "z", "a"), doc("d3", "m", "a")]
        vocab = build_vocab(docs, top_n=10)
        assert vocab.terms == ("a", "m", "z")
        assert vocab.doc_frequency == pytest.approx((200 / 3,) * 3)

    def test_default_top_n_is_300(self):
        signature = inspect.signature(build_vocab)
        assert signature.parameters["top_n"].default == 300

    def test_all_empty_docs_rejected(self):
        with pytest.raises(DataError):
            build_vocab([doc("d1"), doc("d2")], top_n=5)

    def test_empty_doc_counts_in_denominator(self):
        docs = [doc("d1", "data"), doc("d2")]
        vocab = build_vocab(docs, top_n=5)
        assert vocab.doc_frequency == pytest.approx((50.0,))


class TestBuildMatrix:
    def test_presence_is_binary(self):
        docs = [doc("d1", "data", "data", "user")]
        vocab = build_vocab(
            [doc("x", "data", "user", "law"), doc("y", "data")], top_n=3
        )
        assert vocab.terms == ("data", "law", "user")
        matrix = build_matrix(docs, vocab, min_terms=1)
        assert matrix.cells.toarray().tolist() == [[1, 0, 1]]

    def test_doc_without_vocab_terms_dropped(self):
        vocab = build_vocab([doc("x", "data")], top_n=1)
        docs = [doc("d1", "data"), doc("d2", "unrelated")]
        matrix = build_matrix(docs, vocab, min_terms=1)
        assert matrix.doc_ids == ("d1",)
        assert matrix.dropped_docs == 1

    def test_min_terms_zero_keeps_empty_rows(self):
        vocab = build_vocab([doc("x", "data")], top_n=1)
        docs = [doc("d1", "data"), doc("d2", "unrelated")]
        matrix = build_matrix(docs, vocab, min_terms=0)
        assert matrix.doc_ids == ("d1", "d2")
        assert matrix.cells.toarray().tolist() == [[1], [0]]

    def test_zero_survivors_rejected(self):
        vocab = build_vocab([doc("x", "data")], top_n=1)
        with pytest.raises(DataError):
            build_matrix([doc("d1", "unrelated")], vocab, min_terms=1)

    def test_empty_vocab_rejected(self):
        vocab = build_vocab([doc("x", "data")], top_n=1)
        object.__setattr__(vocab, "terms", ())
        with pytest.raises(ValueError):
            build_matrix([doc("d1", "data")], vocab, min_terms=1)

    def test_column_sums_match_recomputed_frequency(self):
        rng = random.Random(44)
        pool = [f"w{i}" for i in range(12)]
        docs = [
            doc(f"d{i}", *rng.sample(pool, rng.randint(0, 6))) for i in range(40)
        ]
        vocab = build_vocab(docs, top_n=8)
        matrix = build_matrix(docs, vocab, min_terms=1)
        dense = matrix.cells.toarray()
        retained = {d.doc_id for d in docs} & set(matrix.doc_ids)
        retained_docs = [d for d in docs if d.doc_id in retained]
        for j, term in enumerate(matrix.vocabulary.terms):
            share = 100.0 * dense[:, j].sum() / len(retained_docs)
            recomputed = 100.0 * sum(
                term in d.tokens for d in retained_docs
            ) / len(retained_docs)
            assert share == pytest.approx(recomputed)

    def test_row_permutation_equivariance(self):
        rng = random.Random(9)
        pool = [f"w{i}" for i in range(10)]
        docs = [doc(f"d{i}", *rng.sample(pool, rng.randint(1, 5))) for i in range(25)]
        vocab = build_vocab(docs, top_n=6)
        base = build_matrix(docs, vocab, min_terms=0)
        shuffled = docs[:]
        rng.shuffle(shuffled)
        other = build_matrix(shuffled, vocab, min_terms=0)
        lookup = {doc_id: row for doc_id, row in zip(base.doc_ids, base.cells.toarray())}
        for doc_id, row in zip(other.doc_ids, other.cells.toarray()):
            assert np.array_equal(lookup[doc_id], row)

    def test_sparsity_equals_distinct_vocab_hits(self):
        docs = [
            doc("d1", "a", "a", "b"),
            doc("d2", "b", "c", "zzz"),
            doc("d3", "a"),
        ]
        vocab = build_vocab(docs, top_n=3)
        matrix = build_matrix(docs, vocab, min_terms=1)
        wanted = set(vocab.terms)
        expected = sum(len(set(d.tokens) & wanted) for d in docs)
        assert matrix.cells.nnz == expected


class TestSerialization:
    def build(self):
        docs = [
            doc("d1", "data", "law"),
            doc("d2", "data"),
            doc("d3", "user", "law"),
        ]
        vocab = build_vocab(docs, top_n=3)
        return build_matrix(docs, vocab, min_terms=1)

    def test_csv_shape(self, tmp_path):
        matrix = self.build()
        path = tmp_path / "dtm.csv"
        write_matrix_csv(matrix, path)
        text = path.read_text(encoding="utf-8")
        lines = text.split("\n")
        assert lines[0] == "doc_id,data,law,user"
        assert lines[1] == "d1,1,1,0"
        assert lines[2] == "d2,1,0,0"
        assert lines[3] == "d3,0,1,1"
        assert text.endswith("\n") and "\r" not in text

    def test_sidecar_round_trip(self, tmp_path):
        matrix = self.build()
        path = tmp_path / "dtm.bin"
        write_matrix_sidecar(matrix, path)
        loaded = read_matrix_sidecar(path)
        assert loaded.doc_ids == matrix.doc_ids
        assert loaded.vocabulary.terms == matrix.vocabulary.terms
        assert loaded.vocabulary.doc_frequency == pytest.approx(
            matrix.vocabulary.doc_frequency
        )
        assert np.array_equal(loaded.cells.toarray(), matrix.cells.toarray())

    def test_sidecar_bytes_are_stable(self, tmp_path):
        matrix = self.build()
        first = tmp_path / "a.bin"
        second = tmp_path / "b.bin"
        write_matrix_sidecar(matrix, first)
        write_matrix_sidecar(matrix, second)
        assert first.read_bytes() == second.read_bytes()

    def test_sidecar_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"not a sidecar")
        with pytest.raises(DataError):
            read_matrix_sidecar(path)


class TestBinaryTermVectorizer:
    def test_fit_transform_keeps_all_rows(self):
        docs = [
            doc("d1", "data", "law"),
            doc("d2", "nothing-known"),
            doc("d3", "data"),
        ]
        vectorizer = BinaryTermVectorizer(top_n=2)
        X = vectorizer.fit_transform(docs)
        assert X.shape == (3, 2)
        assert X.toarray()[1].tolist() == [0, 0]
        assert list(vectorizer.get_feature_names_out()) == ["data", "law"]

    def test_transform_before_fit_raises(self):
        with pytest.raises(Exception):
            BinaryTermVectorizer().transform([doc("d1", "data")])

    def test_params(self):
        vectorizer = BinaryTermVectorizer(top_n=50, min_terms=2)
        assert vectorizer.get_params() == {"top_n": 50, "min_terms": 2}
