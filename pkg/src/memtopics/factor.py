"""Principal-component factor analysis of a binary document-term matrix.

Pipeline: phi (Pearson) correlations between binary term columns, an
eigendecomposition whose top-k eigenvectors scaled by sqrt(eigenvalue) give
the unrotated loadings, then a varimax rotation with Kaiser row
normalization. Components are re-sorted by proportion explained and signed
so each column's largest-magnitude loading is positive, making outputs
deterministic and comparable across runs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_2d_float_array, check_positive_int
from .errors import DataError


@dataclass(frozen=True)
class VarimaxResult:
    """Rotation output: loadings = input @ rotation exactly."""

    loadings: np.ndarray
    rotation: np.ndarray
    iterations: int
    converged: bool
    criterion_path: tuple[float, ...]


@dataclass(frozen=True)
class TermSelection:
    """Per-component term lists split by loading sign.

    positive holds (term, loading) with loading > threshold, descending;
    negative holds loading < -threshold, most negative first.
    """

    positive: tuple[tuple[str, float], ...]
    negative: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class FactorModel:
    """Rotated factor solution.

    loadings columns are ordered by pe descending; eigenvalues keep the
    pre-rotation descending order (rotation redistributes variance, so the
    two orderings describe different bases).
    """

    loadings: np.ndarray
    rotation: np.ndarray
    eigenvalues: np.ndarray
    pe: np.ndarray
    fit: float
    k: int
    dim: int
    variance_share: float
    iterations: int
    converged: bool


def _as_dense(matrix) -> np.ndarray:
    if hasattr(matrix, "cells"):  # DocTermMatrix
        cells = matrix.cells
        return np.asarray(
            cells.toarray() if scipy.sparse.issparse(cells) else cells, dtype=np.float64
        )
    if scipy.sparse.issparse(matrix):
        return matrix.toarray().astype(np.float64)
    return as_2d_float_array(matrix, name="matrix")


def _matrix_terms(matrix) -> list[str] | None:
    vocab = getattr(matrix, "vocabulary", None)
    if vocab is not None:
        return list(vocab.terms)
    return None


def correlation_matrix(matrix, *, terms=None) -> np.ndarray:
    """Pearson correlations between binary columns (the phi coefficient).

    Exact unit diagonal, exactly symmetric. A constant column has no
    variance and is reported by term name when one is known.
    """
    X = _as_dense(matrix)
    if terms is None:
        terms = _matrix_terms(matrix)
    n_docs, n_terms = X.shape
    if n_docs < 2:
        raise DataError("correlation needs at least 2 documents")
    centered = X - X.mean(axis=0)
    ssq = (centered**2).sum(axis=0)
    dead = np.flatnonzero(ssq == 0)
    if dead.size:
        j = int(dead[0])
        label = repr(terms[j]) if terms is not None else f"column {j}"
        raise DataError(
            f"term {label} is constant across documents; "
            "raise the minimum document frequency or drop the term"
        )
    scale = np.sqrt(ssq)
    corr = (centered.T @ centered) / np.outer(scale, scale)
    corr = np.clip((corr + corr.T) / 2, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr


def _check_square_symmetric(corr) -> np.ndarray:
    arr = as_2d_float_array(corr, name="corr")
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"corr must be square, got shape {arr.shape}")
    if not np.allclose(arr, arr.T, atol=1e-10):
        raise ValueError("corr must be symmetric")
    return arr


def extract_components(corr, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Top-k eigenpairs of a symmetric PSD matrix as scaled loadings.

    Loading column j is eigenvector j times sqrt(eigenvalue j), eigenvalues
    descending. Sign convention: the largest-magnitude entry of each column
    is positive. Tiny negative eigenvalues (PSD roundoff) clamp to zero.
    """
    arr = _check_square_symmetric(corr)
    dim = arr.shape[0]
    k = check_positive_int(k, name="k")
    if k > dim:
        raise ValueError(f"k={k} exceeds matrix dimension {dim}")
    eigenvalues, eigenvectors = np.linalg.eigh(arr)
    eigenvalues = np.clip(eigenvalues[::-1][:k], 0.0, None)
    eigenvectors = eigenvectors[:, ::-1][:, :k]
    loadings = eigenvectors * np.sqrt(eigenvalues)[None, :]
    return _fix_signs(loadings), eigenvalues


def _fix_signs(loadings: np.ndarray) -> np.ndarray:
    out = loadings.copy()
    for j in range(out.shape[1]):
        column = out[:, j]
        anchor = column[np.argmax(np.abs(column))]
        if anchor < 0:
            out[:, j] = -column
    return out


def varimax_criterion(loadings) -> float:
    """Sum over components of the variance of squared loadings."""
    arr = as_2d_float_array(loadings, name="loadings")
    squared = arr**2
    return float((squared.var(axis=0)).sum())


def varimax(loadings, tol: float = 1e-10, max_iter: int = 1000) -> VarimaxResult:
    """Varimax rotation by pairwise planar rotations (Kaiser-normalized).

    Rows are scaled to unit communality before optimizing and restored
    after; the criterion path is evaluated on the normalized matrix and is
    nondecreasing. Converged means the per-sweep gain fell below tol before
    max_iter sweeps.
    """
    A = as_2d_float_array(loadings, name="loadings")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    max_iter = check_positive_int(max_iter, name="max_iter")
    p, k = A.shape
    if k == 1:
        crit = varimax_criterion(A)
        return VarimaxResult(
            loadings=A.copy(),
            rotation=np.eye(1),
            iterations=0,
            converged=True,
            criterion_path=(crit,),
        )

    h = np.sqrt((A**2).sum(axis=1))
    h[h == 0] = 1.0  # all-zero rows stay put
    B = A / h[:, None]
    R = np.eye(k)
    path = [varimax_criterion(B)]
    converged = False
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        for i in range(k - 1):
            for j in range(i + 1, k):
                x = B[:, i]
                y = B[:, j]
                u = x * x - y * y
                v = 2.0 * x * y
                su = u.sum()
                sv = v.sum()
                num = 2.0 * (u @ v) - 2.0 * su * sv / p
                den = (u @ u - v @ v) - (su * su - sv * sv) / p
                theta = math.atan2(num, den) / 4.0
                if abs(theta) < 1e-15:
                    continue
                c = math.cos(theta)
                s = math.sin(theta)
                gx = c * x + s * y
                gy = -s * x + c * y
                B[:, i] = gx
                B[:, j] = gy
                ri = R[:, i].copy()
                rj = R[:, j].copy()
                R[:, i] = c * ri + s * rj
                R[:, j] = -s * ri + c * rj
        crit = varimax_criterion(B)
        gain = crit - path[-1]
        path.append(crit)
        if gain < tol:
            converged = True
            break

    return VarimaxResult(
        loadings=B * h[:, None],
        rotation=R,
        iterations=iterations,
        converged=converged,
        criterion_path=tuple(path),
    )


def proportion_explained(loadings) -> np.ndarray:
    """Per-component share (percent) of the variance the model explains.

    Aligned with the input columns; model assembly re-sorts descending.
    """
    arr = as_2d_float_array(loadings, name="loadings")
    ss = (arr**2).sum(axis=0)
    total = ss.sum()
    if total == 0:
        raise ValueError("all loadings are zero; no variance to apportion")
    return 100.0 * ss / total


def total_variance_share(eigenvalues, dim: int) -> float:
    """Percent of total variance carried by the retained eigenvalues."""
    arr = np.asarray(eigenvalues, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("eigenvalues must be a non-empty 1-D sequence")
    dim = check_positive_int(dim, name="dim")
    if arr.size > dim:
        raise ValueError(f"retained {arr.size} eigenvalues exceed dimension {dim}")
    return float(100.0 * arr.sum() / dim)


def fit_statistic(corr, loadings) -> float:
    """Off-diagonal goodness of fit of the loading reconstruction.

    1 - sum(residual^2) / sum(corr^2) over off-diagonal entries, where
    residual = corr - loadings @ loadings.T. Clamped to [0, 1]; an empty
    loading matrix scores exactly 0.
    """
    arr = _check_square_symmetric(corr)
    L = np.asarray(loadings, dtype=np.float64)
    if L.ndim != 2 or L.shape[0] != arr.shape[0]:
        raise ValueError(
            f"loadings shape {L.shape} does not match corr dimension {arr.shape[0]}"
        )
    off = ~np.eye(arr.shape[0], dtype=bool)
    denom = float((arr[off] ** 2).sum())
    if denom == 0.0:
        raise ValueError("corr has no off-diagonal mass; fit is undefined")
    if L.shape[1] == 0:
        return 0.0
    residual = arr - L @ L.T
    value = 1.0 - float((residual[off] ** 2).sum()) / denom
    return min(max(value, 0.0), 1.0)


def select_terms(loadings, terms, threshold: float = 0.1) -> list[TermSelection]:
    """Per-component term lists above the loading threshold.

    Positive terms sorted by loading descending; terms loading below
    -threshold reported separately, most negative first. Ties break by
    term ascending.
    """
    arr = as_2d_float_array(loadings, name="loadings")
    terms = list(terms)
    if len(terms) != arr.shape[0]:
        raise ValueError(
            f"{len(terms)} terms do not match {arr.shape[0]} loading rows"
        )
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    selections = []
    for j in range(arr.shape[1]):
        column = arr[:, j]
        positive = sorted(
            ((terms[i], float(column[i])) for i in np.flatnonzero(column > threshold)),
            key=lambda pair: (-pair[1], pair[0]),
        )
        negative = sorted(
            ((terms[i], float(column[i])) for i in np.flatnonzero(column < -threshold)),
            key=lambda pair: (pair[1], pair[0]),
        )
        selections.append(
            TermSelection(positive=tuple(positive), negative=tuple(negative))
        )
    return selections


def fit_factor_model(
    corr, k: int, *, tol: float = 1e-10, max_iter: int = 1000
) -> FactorModel:
    """Extract k components, rotate, and assemble the deterministic model."""
    arr = _check_square_symmetric(corr)
    unrotated, eigenvalues = extract_components(arr, k)
    rotated_result = varimax(unrotated, tol=tol, max_iter=max_iter)
    loadings = rotated_result.loadings.copy()
    rotation = rotated_result.rotation.copy()

    for j in range(k):
        column = loadings[:, j]
        if column[np.argmax(np.abs(column))] < 0:
            loadings[:, j] = -column
            rotation[:, j] = -rotation[:, j]

    pe = proportion_explained(loadings)
    order = np.argsort(-pe, kind="stable")
    loadings = loadings[:, order]
    rotation = rotation[:, order]
    pe = pe[order]

    return FactorModel(
        loadings=loadings,
        rotation=rotation,
        eigenvalues=eigenvalues,
        pe=pe,
        fit=fit_statistic(arr, loadings),
        k=k,
        dim=arr.shape[0],
        variance_share=total_variance_share(eigenvalues, arr.shape[0]),
        iterations=rotated_result.iterations,
        converged=rotated_result.converged,
    )


def write_loadings_csv(model: FactorModel, terms, labels, path) -> None:
    """One row per term, six-decimal loadings, one column per component."""
    if len(terms) != model.dim:
        raise ValueError(f"expected {model.dim} terms, got {len(terms)}")
    if len(labels) != model.k:
        raise ValueError(f"expected {model.k} labels, got {len(labels)}")
    lines = ["term," + ",".join(labels)]
    for i, term in enumerate(terms):
        row = ",".join(f"{value:.6f}" for value in model.loadings[i])
        lines.append(f"{term},{row}")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(lines) + "\n")


def write_factor_metadata(model: FactorModel, path) -> None:
    payload = {
        "converged": model.converged,
        "dim": model.dim,
        "eigenvalues": [float(value) for value in model.eigenvalues],
        "fit": float(model.fit),
        "iterations": model.iterations,
        "k": model.k,
        "pe": [float(value) for value in model.pe],
        "variance_share_pct": float(model.variance_share),
    }
    with open(path, "w", encoding="utf-8", newline="") as handle:
        json.dump(payload, handle, ensure_ascii=False, indent=2, sort_keys=True)
        handle.write("\n")


class MeaningExtractor(TransformerMixin, BaseEstimator):
    """Estimator facade over the factor pipeline.

    fit computes phi correlations of the binary input matrix and the
    rotated factor model; transform scores documents as the binary dot
    product with positively-clamped loadings.
    """

    def __init__(
        self,
        k: int = 11,
        loading_threshold: float = 0.1,
        tol: float = 1e-10,
        max_iter: int = 1000,
    ):
        self.k = k
        self.loading_threshold = loading_threshold
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        matrix = _as_dense(X)
        corr = correlation_matrix(matrix, terms=_matrix_terms(X))
        model = fit_factor_model(corr, self.k, tol=self.tol, max_iter=self.max_iter)
        self.model_ = model
        self.correlation_ = corr
        self.loadings_ = model.loadings
        self.components_ = model.loadings.T
        self.rotation_ = model.rotation
        self.eigenvalues_ = model.eigenvalues
        self.pe_ = model.pe
        self.fit_ = model.fit
        self.n_features_in_ = matrix.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "loadings_")
        matrix = _as_dense(X)
        if matrix.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {matrix.shape[1]} columns, expected {self.n_features_in_}"
            )
        return matrix @ np.clip(self.loadings_, 0.0, None)
