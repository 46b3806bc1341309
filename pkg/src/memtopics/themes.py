"""Component reports: representative documents and cross-corpus tables.

A document's relatedness to a component is the sum of the component's
positive loadings over the terms the document contains (binary dot product
with negatively-loaded terms clamped to zero). This scoring rule is an
artifact convention; it is the simplest rule consistent with binary
presence data.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int
from .dtm import DocTermMatrix
from .factor import FactorModel, select_terms

_PREFIXES = {"es": "S", "en": "E"}
_PREVIEW_TERMS = 7


@dataclass(frozen=True)
class ComponentReport:
    """One rotated component: labeled terms plus representative documents."""

    component_id: str
    pe: float
    terms: tuple[tuple[str, float], ...]
    negative_terms: tuple[tuple[str, float], ...]
    top_docs: tuple[tuple[str, float, str], ...]


@dataclass(frozen=True)
class ComparisonRow:
    rank: int
    left_id: str
    left_terms: tuple[str, ...]
    right_id: str
    right_terms: tuple[str, ...]


def component_prefix(language: str) -> str:
    """Label prefix for component ids (Spanish S1.., English E1..)."""
    return _PREFIXES.get(language, language[:1].upper())


def score_documents(matrix: DocTermMatrix, loadings_column) -> np.ndarray:
    """Per-document component score: sum of positive loadings present."""
    column = np.asarray(loadings_column, dtype=np.float64)
    if column.ndim != 1 or column.size != len(matrix.vocabulary):
        raise ValueError(
            f"loadings column of length {column.size} does not match "
            f"{len(matrix.vocabulary)} vocabulary terms"
        )
    positive = np.clip(column, 0.0, None)
    return np.asarray(matrix.cells @ positive, dtype=np.float64).ravel()


def top_documents(doc_ids, scores, top_k: int = 30) -> list[tuple[str, float]]:
    """Highest-scoring documents; ties break by doc_id ascending.

    Documents scoring exactly zero never appear (nothing relates them to
    the component).
    """
    top_k = check_positive_int(top_k, name="top_k")
    scored = [
        (doc_id, float(score))
        for doc_id, score in zip(doc_ids, scores)
        if score > 0.0
    ]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:top_k]


def build_reports(
    matrix: DocTermMatrix,
    model: FactorModel,
    texts: dict[str, str],
    prefix: str,
    threshold: float = 0.1,
    top_k: int = 30,
) -> list[ComponentReport]:
    """One report per component, in the model's pe-descending order."""
    selections = select_terms(model.loadings, matrix.vocabulary.terms, threshold)
    reports = []
    for j in range(model.k):
        scores = score_documents(matrix, model.loadings[:, j])
        ranked = top_documents(matrix.doc_ids, scores, top_k=top_k)
        reports.append(
            ComponentReport(
                component_id=f"{prefix}{j + 1}",
                pe=float(model.pe[j]),
                terms=selections[j].positive,
                negative_terms=selections[j].negative,
                top_docs=tuple(
                    (doc_id, score, texts.get(doc_id, "")) for doc_id, score in ranked
                ),
            )
        )
    return reports


def comparison_table(
    reports_a: list[ComponentReport], reports_b: list[ComponentReport]
) -> list[ComparisonRow]:
    """Pair components by rank; the shorter side pads with blanks.

    The pairing is positional only; deciding whether S3 and E5 discuss the
    same thing is analyst work.
    """
    if not reports_a or not reports_b:
        raise ValueError("both report lists must be non-empty")
    rows = []
    for i in range(max(len(reports_a), len(reports_b))):
        left = reports_a[i] if i < len(reports_a) else None
        right = reports_b[i] if i < len(reports_b) else None
        rows.append(
            ComparisonRow(
                rank=i + 1,
                left_id=left.component_id if left else "",
                left_terms=tuple(
                    t for t, _ in (left.terms if left else ())[:_PREVIEW_TERMS]
                ),
                right_id=right.component_id if right else "",
                right_terms=tuple(
                    t for t, _ in (right.terms if right else ())[:_PREVIEW_TERMS]
                ),
            )
        )
    return rows


def render_comparison_text(rows: list[ComparisonRow]) -> str:
    """Two aligned columns separated by a vertical bar."""
    left_cells = [f"{r.left_id} {' '.join(r.left_terms)}".strip() for r in rows]
    right_cells = [f"{r.right_id} {' '.join(r.right_terms)}".strip() for r in rows]
    width = max((len(c) for c in left_cells), default=0)
    lines = [f"{left.ljust(width)} | {right}".rstrip() for left, right in zip(left_cells, right_cells)]
    return "\n".join(lines) + "\n"


def write_comparison_csv(rows: list[ComparisonRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["rank", "id_a", "terms_a", "id_b", "terms_b"])
        for row in rows:
            writer.writerow(
                [
                    row.rank,
                    row.left_id,
                    " ".join(row.left_terms),
                    row.right_id,
                    " ".join(row.right_terms),
                ]
            )


def write_comparison_text(rows: list[ComparisonRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(render_comparison_text(rows))


def write_components_csv(reports: list[ComponentReport], path) -> None:
    """Table of the top terms per component: id, pe, word1..word7."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["id", "pe_pct", *(f"word{i + 1}" for i in range(_PREVIEW_TERMS))]
        )
        for report in reports:
            words = [t for t, _ in report.terms[:_PREVIEW_TERMS]]
            words += [""] * (_PREVIEW_TERMS - len(words))
            writer.writerow([report.component_id, f"{report.pe:.1f}", *words])


def write_components_json(
    reports: list[ComponentReport], path, *, language: str, prefix: str
) -> None:
    """Full report payload: every term with its loading, plus top documents."""
    payload = {
        "language": language,
        "prefix": prefix,
        "components": [
            {
                "id": r.component_id,
                "pe": r.pe,
                "terms": [[t, v] for t, v in r.terms],
                "negative_terms": [[t, v] for t, v in r.negative_terms],
                "top_docs": [[d, s, text] for d, s, text in r.top_docs],
            }
            for r in reports
        ],
    }
    with open(path, "w", encoding="utf-8", newline="") as handle:
        json.dump(payload, handle, ensure_ascii=False, sort_keys=True, indent=2)
        handle.write("\n")
