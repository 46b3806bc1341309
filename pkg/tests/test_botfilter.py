"""Exact 1-D k-means and bot-threshold tests.

The ground truth for optimality is an exhaustive search over all contiguous
partitions of the sorted scores, done in exact rational arithmetic.
"""

import random
from datetime import datetime, timezone
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from memtopics.botfilter import (
    BotThreshold,
    Ckmeans1D,
    ckmeans_1d,
    derive_bot_threshold,
    filter_bots,
)
from memtopics.corpus import Corpus, TweetRecord, UserProfile


def exact_partition_cost(groups):
    total = Fraction(0)
    for group in groups:
        mean = Fraction(sum(group), len(group))
        total += sum((x - mean) ** 2 for x in group)
    return total


def brute_force_min_wcss(values, k):
    """Minimum wcss over all contiguous k-partitions of the sorted values.

    Fraction(float) is exact, so this is the true optimum for the given
    binary floating-point inputs.
    """
    vals = sorted(Fraction(v) for v in values)
    n = len(vals)
    best = None
    for cuts in combinations(range(1, n), k - 1):
        edges = (0, *cuts, n)
        groups = [vals[edges[i] : edges[i + 1]] for i in range(k)]
        cost = exact_partition_cost(groups)
        if best is None or cost < best:
            best = cost
    return best


def make_corpus(user_tweets, bot_scores=None):
    """Corpus from {user_id: n_tweets}; ids are '<user>-<i>'."""
    bot_scores = bot_scores or {}
    stamp = datetime(2018, 4, 10, 12, 0, tzinfo=timezone.utc)
    tweets = []
    for uid in sorted(user_tweets):
        for i in range(user_tweets[uid]):
            tweets.append(
                TweetRecord(
                    id=f"{uid}-{i}",
                    text=f"text from {uid}",
                    language="en",
                    author_id=uid,
                    is_retweet=False,
                    created_at=stamp,
                )
            )
    users = {
        uid: UserProfile(user_id=uid, tweet_count=n, bot_score=bot_scores.get(uid))
        for uid, n in user_tweets.items()
    }
    return Corpus(language="en", tweets=tuple(tweets), users=users)


class TestCkmeans1D:
    def test_two_well_separated_pairs(self):
        result = ckmeans_1d([0.10, 0.12, 0.50, 0.52], k=2)
        assert result.k == 2
        assert result.assignments == (1, 1, 2, 2)
        assert result.centers == pytest.approx([0.11, 0.51])
        assert result.wcss == pytest.approx(0.0004, rel=1e-9)
        oracle = brute_force_min_wcss([0.10, 0.12, 0.50, 0.52], 2)
        assert result.wcss == pytest.approx(float(oracle), rel=1e-12)

    def test_k_equals_one_gives_total_ss(self):
        values = [3.0, 1.0, 4.0, 1.0, 5.0]
        result = ckmeans_1d(values, k=1)
        arr = np.asarray(values)
        assert result.assignments == (1,) * 5
        assert result.wcss == pytest.approx(float(((arr - arr.mean()) ** 2).sum()))

    def test_k_equals_n_gives_singletons(self):
        result = ckmeans_1d([0.9, 0.1, 0.5], k=3)
        assert result.wcss == 0.0
        assert result.assignments == (3, 1, 2)
        assert result.centers == pytest.approx([0.1, 0.5, 0.9])

    def test_assignments_nondecreasing_in_sorted_order(self):
        rng = random.Random(7)
        values = [rng.uniform(0, 1) for _ in range(40)]
        result = ckmeans_1d(values, k=6)
        by_value = [a for _, a in sorted(zip(values, result.assignments))]
        assert by_value == sorted(by_value)
        assert set(result.assignments) == set(range(1, 7))

    def test_optimal_against_exhaustive_search(self):
        rng = random.Random(20180410)
        for case in range(120):
            n = rng.randint(1, 12)
            k = rng.randint(1, min(4, n))
            # A coarse grid keeps duplicates frequent; values stay exact.
            values = [rng.randint(0, 64) / 64 for _ in range(n)]
            result = ckmeans_1d(values, k)
            oracle = float(brute_force_min_wcss(values, k))
            assert result.wcss == pytest.approx(oracle, rel=1e-12, abs=1e-15), (
                f"case {case}: values={values} k={k}"
            )

    def test_wcss_definition_matches_partition(self):
        rng = random.Random(99)
        values = [rng.uniform(0, 1) for _ in range(30)]
        result = ckmeans_1d(values, k=4)
        arr = np.asarray(values)
        labels = np.asarray(result.assignments)
        recomputed = 0.0
        for cluster in range(1, 5):
            members = arr[labels == cluster]
            assert members.size > 0
            recomputed += float(((members - members.mean()) ** 2).sum())
            assert members.mean() == pytest.approx(result.centers[cluster - 1])
        assert result.wcss == pytest.approx(recomputed, rel=1e-12, abs=1e-15)

    def test_monotone_in_k(self):
        rng = random.Random(3)
        values = [rng.uniform(0, 1) for _ in range(25)]
        costs = [ckmeans_1d(values, k).wcss for k in range(1, 10)]
        for lo, hi in zip(costs[1:], costs[:-1]):
            assert lo <= hi + 1e-12

    def test_permutation_invariance(self):
        rng = random.Random(11)
        values = [rng.uniform(0, 1) for _ in range(20)]
        base = ckmeans_1d(values, k=3)
        shuffled = values[:]
        rng.shuffle(shuffled)
        other = ckmeans_1d(shuffled, k=3)
        assert other.centers == pytest.approx(base.centers)
        assert other.wcss == pytest.approx(base.wcss)
        # Each value must land in the same cluster either way.
        base_map = dict(zip(values, base.assignments))
        for value, label in zip(shuffled, other.assignments):
            assert base_map[value] == label

    def test_duplicate_scores_share_a_cluster(self):
        values = [0.2, 0.2, 0.2, 0.8, 0.8, 0.2, 0.8]
        result = ckmeans_1d(values, k=2)
        for value, label in zip(values, result.assignments):
            assert label == (1 if value == 0.2 else 2)
        assert result.wcss == 0.0

    def test_argument_errors(self):
        with pytest.raises(ValueError):
            ckmeans_1d([1.0, 2.0], k=0)
        with pytest.raises(ValueError):
            ckmeans_1d([1.0, 2.0], k=3)
        with pytest.raises(ValueError):
            ckmeans_1d([], k=1)
        with pytest.raises(ValueError):
            ckmeans_1d([0.1, float("nan")], k=1)


class TestDeriveBotThreshold:
    def test_even_grid_pairs_up(self):
        scores = [i / 10 for i in range(10)]
        clusters = ckmeans_1d(scores, k=5)
        oracle = float(brute_force_min_wcss(scores, 5))
        assert clusters.wcss == pytest.approx(oracle, rel=1e-12)
        assert [clusters.assignments.count(c) for c in range(1, 6)] == [2] * 5
        threshold = derive_bot_threshold(clusters)
        assert threshold.value == 0.5

    @pytest.mark.parametrize("cluster3_max", [0.4745, 0.4849])
    def test_threshold_is_cluster3_maximum(self, cluster3_max):
        scores = [
            0.01, 0.02, 0.03,
            0.15, 0.16, 0.17,
            0.40, 0.42, cluster3_max,
            0.70, 0.71, 0.72,
            0.95, 0.96, 0.97,
        ]
        clusters = ckmeans_1d(scores, k=5)
        third = [s for s, a in zip(scores, clusters.assignments) if a == 3]
        assert third == [0.40, 0.42, cluster3_max]
        threshold = derive_bot_threshold(clusters)
        assert threshold.value == cluster3_max
        assert threshold.human_clusters == frozenset({1, 2, 3})
        assert threshold.bot_clusters == frozenset({4, 5})

    def test_requires_k_five(self):
        clusters = ckmeans_1d([0.1, 0.2, 0.3, 0.4], k=4)
        with pytest.raises(ValueError):
            derive_bot_threshold(clusters)


class TestFilterBots:
    def test_removes_high_scorers_and_their_tweets(self):
        corpus = make_corpus({"a": 3, "b": 2}, bot_scores={"a": 0.2, "b": 0.6})
        threshold = BotThreshold(value=0.5)
        out = filter_bots(corpus, threshold)
        assert set(out.users) == {"a"}
        assert all(t.author_id == "a" for t in out.tweets)
        assert len(out.tweets) == 3

    def test_boundary_score_is_human(self):
        corpus = make_corpus({"a": 1, "b": 1}, bot_scores={"a": 0.5, "b": 0.5000001})
        out = filter_bots(corpus, BotThreshold(value=0.5))
        assert set(out.users) == {"a"}

    def test_all_below_threshold_is_identity(self):
        corpus = make_corpus({"a": 2, "b": 1}, bot_scores={"a": 0.1, "b": 0.3})
        out = filter_bots(corpus, BotThreshold(value=0.5))
        assert out.tweets == corpus.tweets
        assert out.users == corpus.users

    def test_unscored_users_are_retained(self):
        corpus = make_corpus({"a": 2, "b": 4}, bot_scores={"a": 0.9})
        out = filter_bots(corpus, BotThreshold(value=0.5))
        assert set(out.users) == {"b"}
        assert len(out.tweets) == 4

    def test_removed_tweet_count_matches_user_counts(self):
        rng = random.Random(5)
        user_tweets = {f"u{i:02d}": rng.randint(1, 6) for i in range(20)}
        scores = {uid: rng.random() for uid in user_tweets}
        corpus = make_corpus(user_tweets, bot_scores=scores)
        threshold = BotThreshold(value=0.5)
        out = filter_bots(corpus, threshold)
        removed = [uid for uid in user_tweets if scores[uid] > 0.5]
        assert len(corpus.tweets) - len(out.tweets) == sum(
            user_tweets[uid] for uid in removed
        )
        assert sum(u.tweet_count for u in out.users.values()) == len(out.tweets)


class TestCkmeans1DEstimator:
    def test_fit_exposes_sklearn_attributes(self):
        X = np.array([[0.1], [0.12], [0.5], [0.52], [0.9]])
        est = Ckmeans1D(k=3).fit(X)
        assert est.labels_.tolist() == [0, 0, 1, 1, 2]
        assert est.cluster_centers_.shape == (3,)
        assert est.wcss_ == pytest.approx(ckmeans_1d(X.ravel(), 3).wcss)

    def test_labels_match_functional_api(self):
        rng = random.Random(13)
        values = [rng.uniform(0, 1) for _ in range(30)]
        est = Ckmeans1D(k=4).fit(values)
        reference = ckmeans_1d(values, 4)
        assert (est.labels_ + 1).tolist() == list(reference.assignments)

    def test_predict_assigns_nearest_center(self):
        est = Ckmeans1D(k=2).fit([0.0, 0.1, 0.9, 1.0])
        assert est.predict([0.2, 0.8]).tolist() == [0, 1]

    def test_predict_before_fit_raises(self):
        with pytest.raises(Exception):
            Ckmeans1D(k=2).predict([0.5])

    def test_get_params_round_trip(self):
        est = Ckmeans1D(k=7)
        assert est.get_params() == {"k": 7}
        est.set_params(k=2)
        assert est.k == 2
