"""Top-N vocabulary and sparse binary document-term matrix.

Document frequency counts distinct presence (a term occurring five times in
one tweet counts once) as a percentage of all documents passed in. The
matrix stores 0/1 presence, docs by terms, in CSR form.

Serialization: a CSV (doc_id column, one 0/1 column per term) for
interoperability, and a compact binary sidecar whose byte layout is fully
deterministic so identical matrices produce identical files.
"""

from __future__ import annotations

import csv
import json
import struct
from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.sparse
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import DataError
from .textprep import TokenizedDoc

_SIDECAR_MAGIC = b"BDTM\x01"


@dataclass(frozen=True)
class Vocabulary:
    """Terms sorted by document frequency descending, ties by term."""

    terms: tuple[str, ...]
    doc_frequency: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.terms)

    def index(self) -> dict[str, int]:
        return {term: i for i, term in enumerate(self.terms)}


@dataclass(frozen=True)
class DocTermMatrix:
    doc_ids: tuple[str, ...]
    vocabulary: Vocabulary
    cells: scipy.sparse.csr_matrix
    dropped_docs: int = 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape


def build_vocab(docs: list[TokenizedDoc], top_n: int = 300) -> Vocabulary:
    """Top-N terms by document frequency with deterministic tie-break."""
    if not isinstance(top_n, int) or isinstance(top_n, bool) or top_n < 1:
        raise ValueError(f"top_n must be a positive integer, got {top_n!r}")
    if not docs:
        raise DataError("no documents to build a vocabulary from")
    counts: Counter[str] = Counter()
    for document in docs:
        counts.update(set(document.tokens))
    if not counts:
        raise DataError("all documents are empty after normalization")
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:top_n]
    n_docs = len(docs)
    return Vocabulary(
        terms=tuple(term for term, _ in ranked),
        doc_frequency=tuple(100.0 * count / n_docs for _, count in ranked),
    )


def build_matrix(
    docs: list[TokenizedDoc], vocab: Vocabulary, min_terms: int = 1
) -> DocTermMatrix:
    """Binary presence matrix over a frozen vocabulary.

    Documents with fewer than min_terms distinct vocabulary terms are
    dropped and counted in dropped_docs.
    """
    if len(vocab) == 0:
        raise ValueError("vocabulary is empty")
    if not isinstance(min_terms, int) or isinstance(min_terms, bool) or min_terms < 0:
        raise ValueError(f"min_terms must be a non-negative integer, got {min_terms!r}")
    index = vocab.index()
    doc_ids: list[str] = []
    indptr = [0]
    indices: list[int] = []
    dropped = 0
    for document in docs:
        hits = sorted({index[t] for t in document.tokens if t in index})
        if len(hits) < min_terms:
            dropped += 1
            continue
        doc_ids.append(document.doc_id)
        indices.extend(hits)
        indptr.append(len(indices))
    if not doc_ids:
        raise DataError(
            f"no documents contain at least {min_terms} vocabulary terms"
        )
    cells = scipy.sparse.csr_matrix(
        (
            np.ones(len(indices), dtype=np.int8),
            np.asarray(indices, dtype=np.int32),
            np.asarray(indptr, dtype=np.int64),
        ),
        shape=(len(doc_ids), len(vocab)),
    )
    return DocTermMatrix(
        doc_ids=tuple(doc_ids),
        vocabulary=vocab,
        cells=cells,
        dropped_docs=dropped,
    )


def write_matrix_csv(matrix: DocTermMatrix, path) -> None:
    """doc_id column then one 0/1 column per term; UTF-8, LF endings."""
    dense = matrix.cells.toarray()
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["doc_id", *matrix.vocabulary.terms])
        for doc_id, row in zip(matrix.doc_ids, dense):
            writer.writerow([doc_id, *(int(v) for v in row)])


def write_matrix_sidecar(matrix: DocTermMatrix, path) -> None:
    """Compact binary form: magic, counts, CSR structure, JSON trailer.

    All integers little-endian; the trailer holds doc_ids, terms,
    doc_frequency, and dropped_docs. Byte output depends only on content.
    """
    cells = matrix.cells
    indptr = np.asarray(cells.indptr, dtype="<u8")
    indices = np.asarray(cells.indices, dtype="<u4")
    trailer = json.dumps(
        {
            "doc_ids": list(matrix.doc_ids),
            "terms": list(matrix.vocabulary.terms),
            "doc_frequency": list(matrix.vocabulary.doc_frequency),
            "dropped_docs": matrix.dropped_docs,
        },
        ensure_ascii=False,
        separators=(",", ":"),
        sort_keys=True,
    ).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(_SIDECAR_MAGIC)
        handle.write(struct.pack("<QQQ", cells.shape[0], cells.shape[1], cells.nnz))
        handle.write(indptr.tobytes())
        handle.write(indices.tobytes())
        handle.write(struct.pack("<Q", len(trailer)))
        handle.write(trailer)


def read_matrix_sidecar(path) -> DocTermMatrix:
    try:
        with open(path, "rb") as handle:
            blob = handle.read()
    except OSError as exc:
        raise DataError(f"cannot read matrix sidecar {path}: {exc.strerror or exc}") from exc
    try:
        if blob[: len(_SIDECAR_MAGIC)] != _SIDECAR_MAGIC:
            raise ValueError("bad magic")
        offset = len(_SIDECAR_MAGIC)
        n_docs, n_terms, nnz = struct.unpack_from("<QQQ", blob, offset)
        offset += 24
        indptr = np.frombuffer(blob, dtype="<u8", count=n_docs + 1, offset=offset)
        offset += indptr.nbytes
        indices = np.frombuffer(blob, dtype="<u4", count=nnz, offset=offset)
        offset += indices.nbytes
        (trailer_len,) = struct.unpack_from("<Q", blob, offset)
        offset += 8
        trailer = json.loads(blob[offset : offset + trailer_len].decode("utf-8"))
        cells = scipy.sparse.csr_matrix(
            (
                np.ones(nnz, dtype=np.int8),
                indices.astype(np.int32),
                indptr.astype(np.int64),
            ),
            shape=(n_docs, n_terms),
        )
        vocab = Vocabulary(
            terms=tuple(trailer["terms"]),
            doc_frequency=tuple(trailer["doc_frequency"]),
        )
        return DocTermMatrix(
            doc_ids=tuple(trailer["doc_ids"]),
            vocabulary=vocab,
            cells=cells,
            dropped_docs=int(trailer["dropped_docs"]),
        )
    except (ValueError, KeyError, struct.error, json.JSONDecodeError) as exc:
        raise DataError(f"matrix sidecar {path} is corrupt: {exc}") from None


class BinaryTermVectorizer(TransformerMixin, BaseEstimator):
    """Vectorizer over TokenizedDoc lists.

    Unlike build_matrix, transform never drops rows (estimator outputs stay
    aligned with their inputs); pipeline-level row dropping goes through
    build_matrix with min_terms.
    """

    def __init__(self, top_n: int = 300, min_terms: int = 1):
        self.top_n = top_n
        self.min_terms = min_terms

    def fit(self, X, y=None):
        self.vocabulary_ = build_vocab(list(X), top_n=self.top_n)
        return self

    def transform(self, X) -> scipy.sparse.csr_matrix:
        check_is_fitted(self, "vocabulary_")
        docs = list(X)
        index = self.vocabulary_.index()
        indptr = [0]
        indices: list[int] = []
        for document in docs:
            hits = sorted({index[t] for t in document.tokens if t in index})
            indices.extend(hits)
            indptr.append(len(indices))
        return scipy.sparse.csr_matrix(
            (
                np.ones(len(indices), dtype=np.int8),
                np.asarray(indices, dtype=np.int32),
                np.asarray(indptr, dtype=np.int64),
            ),
            shape=(len(docs), len(self.vocabulary_)),
        )

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        check_is_fitted(self, "vocabulary_")
        return np.asarray(self.vocabulary_.terms, dtype=object)
