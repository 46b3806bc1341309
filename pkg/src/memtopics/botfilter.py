"""Bot filtering: exact 1-D k-means over bot scores and threshold derivation.

ckmeans_1d solves univariate k-means to optimality with the classic
dynamic program over sorted values (clusters are contiguous intervals in
sorted order). The human/bot cutoff is the largest score in the third of
five clusters; anything strictly above it counts as a bot.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_1d_float_array, check_positive_int
from .corpus import Corpus, _rebuild


@dataclass(frozen=True)
class ClusterResult:
    """Optimal k-clustering of a score list.

    assignments are 1-based and aligned with the input order; sorting the
    scores makes the assignment sequence nondecreasing. centers ascend.
    scores keeps the clustered values so thresholds can be read off later.
    """

    k: int
    scores: tuple[float, ...]
    assignments: tuple[int, ...]
    centers: tuple[float, ...]
    wcss: float

    def cluster_values(self, cluster: int) -> tuple[float, ...]:
        """All scores assigned to ``cluster`` (1-based), in input order."""
        if not 1 <= cluster <= self.k:
            raise ValueError(f"cluster must be in 1..{self.k}, got {cluster}")
        return tuple(s for s, a in zip(self.scores, self.assignments) if a == cluster)


@dataclass(frozen=True)
class BotThreshold:
    """Score cutoff: strictly greater than ``value`` means bot."""

    value: float
    human_clusters: frozenset[int] = field(default=frozenset({1, 2, 3}))
    bot_clusters: frozenset[int] = field(default=frozenset({4, 5}))


def ckmeans_1d(scores, k: int) -> ClusterResult:
    """Globally optimal 1-D k-means (minimum within-cluster sum of squares).

    O(k * n^2) dynamic program. When several partitions tie, the one whose
    later clusters start earliest is returned; the wcss is optimal either
    way.
    """
    values = as_1d_float_array(scores, name="scores")
    k = check_positive_int(k, name="k")
    n = values.size
    if k > n:
        raise ValueError(f"k={k} exceeds the number of scores ({n})")

    order = np.argsort(values, kind="stable")
    x = values[order]
    # Shifting by the mean costs nothing (interval SSE is shift-invariant)
    # and keeps the prefix sums small.
    shifted = x - x.mean()
    s1 = np.concatenate(([0.0], np.cumsum(shifted)))
    s2 = np.concatenate(([0.0], np.cumsum(shifted * shifted)))

    def segment_cost(i, j):
        """SSE of x[i..j] inclusive; i may be an array for fixed scalar j."""
        count = (j + 1) - i
        total = s1[j + 1] - s1[i]
        cost = (s2[j + 1] - s2[i]) - total * total / count
        return np.maximum(cost, 0.0)

    dp = segment_cost(np.zeros(n, dtype=np.intp), np.arange(n))  # one cluster
    back: list[np.ndarray] = []
    for q in range(2, k + 1):
        new_dp = np.full(n, np.inf)
        back_q = np.zeros(n, dtype=np.intp)
        for i in range(q - 1, n):
            j = np.arange(q - 1, i + 1)
            candidates = dp[j - 1] + segment_cost(j, i)
            t = int(np.argmin(candidates))
            new_dp[i] = candidates[t]
            back_q[i] = j[t]
        dp = new_dp
        back.append(back_q)

    # Recover segment boundaries (start index of each cluster, ascending).
    bounds = [0] * k
    i = n - 1
    for q in range(k, 1, -1):
        j = int(back[q - 2][i])
        bounds[q - 1] = j
        i = j - 1

    labels_sorted = np.zeros(n, dtype=np.intp)
    centers = []
    wcss = 0.0
    for cluster in range(k):
        lo = bounds[cluster]
        hi = bounds[cluster + 1] if cluster + 1 < k else n
        segment = x[lo:hi]
        labels_sorted[lo:hi] = cluster + 1
        if segment[0] == segment[-1]:
            # Constant segment: the mean is the value itself, exactly.
            center = float(segment[0])
        else:
            center = float(segment.mean())
        centers.append(center)
        wcss += float(((segment - center) ** 2).sum())

    assignments = np.empty(n, dtype=np.intp)
    assignments[order] = labels_sorted
    return ClusterResult(
        k=k,
        scores=tuple(float(v) for v in values),
        assignments=tuple(int(a) for a in assignments),
        centers=tuple(centers),
        wcss=wcss,
    )


def derive_bot_threshold(clusters: ClusterResult) -> BotThreshold:
    """Cutoff between clusters 3 and 4 of a 5-way score clustering."""
    if clusters.k != 5:
        raise ValueError(f"bot threshold needs k=5 clusters, got k={clusters.k}")
    third = clusters.cluster_values(3)
    return BotThreshold(value=max(third))


def filter_bots(corpus: Corpus, threshold: BotThreshold) -> Corpus:
    """Drop users scoring above the threshold, along with all their tweets.

    Users without a bot score were never classified and stay in.
    """
    bots = {
        uid
        for uid, profile in corpus.users.items()
        if profile.bot_score is not None and profile.bot_score > threshold.value
    }
    if not bots:
        return corpus
    kept = [t for t in corpus.tweets if t.author_id not in bots]
    return _rebuild(corpus, kept)


class Ckmeans1D(ClusterMixin, BaseEstimator):
    """Estimator wrapper around ckmeans_1d.

    Accepts shape (n,) or (n, 1) input. Follows the usual clusterer
    conventions: labels_ are 0-based (functional API assignments minus 1).
    """

    def __init__(self, k: int = 5):
        self.k = k

    @staticmethod
    def _flatten(X) -> np.ndarray:
        arr = np.asarray(X, dtype=np.float64)
        if arr.ndim == 2 and arr.shape[1] == 1:
            arr = arr.ravel()
        return as_1d_float_array(arr, name="X")

    def fit(self, X, y=None):
        values = self._flatten(X)
        result = ckmeans_1d(values, self.k)
        self.result_ = result
        self.cluster_centers_ = np.asarray(result.centers)
        self.labels_ = np.asarray(result.assignments, dtype=np.intp) - 1
        self.wcss_ = result.wcss
        self.n_features_in_ = 1
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "cluster_centers_")
        values = self._flatten(X)
        distances = np.abs(values[:, None] - self.cluster_centers_[None, :])
        return np.argmin(distances, axis=1)
