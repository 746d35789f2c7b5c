from __future__ import annotations

import math
import random
from collections import Counter
from datetime import date, timedelta

import numpy as np
import pytest

from narranet.ingest import build_corpus
from narranet.metrics import (
    TimeSeries,
    completeness,
    coverage_score,
    cross_correlate,
    evaluate_communities,
    homogeneity,
    relative_coverage,
    smooth_series,
    subcorpus_tokens,
    v_measure,
)
from conftest import make_tuple


def series(values, start=date(2020, 1, 1)):
    return TimeSeries(points=[(start + timedelta(days=i), float(v)) for i, v in enumerate(values)])


def oracle_coverage(community, tokens):
    """Literal double-loop indicator sum (single-word entries)."""
    vocab = sorted(set(community))
    hits = 0
    for w_g in vocab:
        for w_c in tokens:
            if w_g == w_c:
                hits += 1
    return hits / (len(vocab) * len(tokens)) if tokens else 0.0


def oracle_entropy_metrics(y_gr, y_pred):
    """Independent entropy computation for homogeneity/completeness."""

    def entropy(labels):
        n = len(labels)
        return -sum(c / n * math.log(c / n) for c in Counter(labels).values())

    def cond_entropy(labels, given):
        n = len(labels)
        total = 0.0
        for g in set(given):
            subset = [l for l, gv in zip(labels, given) if gv == g]
            total += len(subset) / n * entropy(subset)
        return total

    h = 1.0 if entropy(y_gr) == 0 else 1 - cond_entropy(y_gr, y_pred) / entropy(y_gr)
    c = 1.0 if entropy(y_pred) == 0 else 1 - cond_entropy(y_pred, y_gr) / entropy(y_pred)
    v = 0.0 if h + c == 0 else 2 * h * c / (h + c)
    return h, c, v


class TestTimeSeries:
    def test_rejects_non_increasing_days(self):
        with pytest.raises(ValueError):
            TimeSeries(points=[(date(2020, 1, 2), 1.0), (date(2020, 1, 2), 2.0)])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            TimeSeries(points=[(date(2020, 1, 1), float("nan"))])

    def test_smooth_width_one_is_identity(self):
        s = series([1, 5, 2, 8])
        assert smooth_series(s, 1).values() == s.values()

    def test_smooth_centered_average(self):
        s = series([0, 3, 6, 9, 12])
        sm = smooth_series(s, 3)
        assert sm.values() == [1.5, 3.0, 6.0, 9.0, 10.5]
        assert sm.smoothing_width == 3


class TestCoverageScore:
    def test_worked_example(self):
        assert coverage_score(["5g", "tower"], ["5g", "tower", "5g", "virus"]) == 0.375

    def test_disjoint_vocabularies(self):
        assert coverage_score(["5g"], ["virus", "people"]) == 0.0

    def test_single_repeated_word_gives_one_over_v(self):
        assert coverage_score(["a", "b"], ["a", "a", "a"]) == pytest.approx(1 / 2)

    def test_empty_corpus_by_convention(self):
        assert coverage_score(["a"], []) == 0.0

    def test_empty_community_rejected(self):
        with pytest.raises(ValueError):
            coverage_score([], ["a"])

    def test_multiword_entries_match_contiguously(self):
        tokens = ["bill", "gates", "bill", "gates", "bill"]
        assert coverage_score(["bill gates"], tokens) == pytest.approx(2 / 5)

    def test_duplicate_community_entries_collapse(self):
        assert coverage_score(["a", "a"], ["a", "b"]) == coverage_score(["a"], ["a", "b"])

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_double_loop_oracle(self, seed):
        rnd = random.Random(seed)
        alphabet = [f"w{i}" for i in range(12)]
        tokens = [rnd.choice(alphabet) for _ in range(rnd.randint(1, 200))]
        community = rnd.sample(alphabet, rnd.randint(1, 6))
        assert coverage_score(community, tokens) == oracle_coverage(community, tokens)


class TestRelativeCoverage:
    def test_uniform_corpus_ratio_near_one(self):
        rng = np.random.default_rng(42)
        vocab = [f"t{i:03d}" for i in range(100)]
        tokens = [vocab[i] for i in rng.integers(0, 100, size=5000)]
        community = [vocab[i] for i in rng.choice(100, size=20, replace=False)]
        result = relative_coverage(community, tokens, vocab, n_samples=30, sample_size=20, seed=7)
        assert 0.8 <= result.ratio <= 1.2
        assert not result.degenerate

    def test_absent_community_scores_zero(self):
        vocab = ["a", "b", "c", "d"]
        result = relative_coverage(["zzz"], ["a", "b", "a"], vocab, n_samples=5, sample_size=2, seed=0)
        assert result.ratio == 0.0

    def test_zero_baseline_flagged_infinite(self):
        result = relative_coverage(["a"], ["a"], ["x", "y"], n_samples=3, sample_size=1, seed=0)
        assert result.degenerate
        assert math.isinf(result.ratio)

    def test_seed_deterministic(self):
        vocab = [f"t{i}" for i in range(50)]
        tokens = vocab * 3
        a = relative_coverage(vocab[:5], tokens, vocab, n_samples=10, sample_size=10, seed=3)
        b = relative_coverage(vocab[:5], tokens, vocab, n_samples=10, sample_size=10, seed=3)
        assert a == b

    def test_baseline_invariant_under_vocab_permutation(self):
        rnd = random.Random(1)
        vocab = [f"t{i}" for i in range(30)]
        tokens = [rnd.choice(vocab) for _ in range(300)]
        shuffled = vocab.copy()
        rnd.shuffle(shuffled)
        a = relative_coverage(vocab[:4], tokens, vocab, n_samples=8, sample_size=6, seed=5)
        b = relative_coverage(vocab[:4], tokens, shuffled, n_samples=8, sample_size=6, seed=5)
        assert a.baseline_mean == b.baseline_mean

    def test_small_vocabulary_warns_and_samples_with_replacement(self, caplog):
        with caplog.at_level("WARNING"):
            result = relative_coverage(["a"], ["a", "b"], ["a", "b"], n_samples=3, sample_size=10, seed=0)
        assert any("replacement" in r.message for r in caplog.records)
        assert result.ratio > 0


class TestCrossCorrelate:
    def test_self_correlation_peaks_at_zero(self):
        s = series([1, 4, 2, 8, 5, 7, 3, 6])
        xc = cross_correlate(s, s, max_lag=3)
        assert xc.peak_lag == 0
        assert xc.correlations[0] == pytest.approx(1.0)

    def test_shifted_series_peaks_at_shift(self):
        values = [1, 4, 2, 8, 5, 7, 3, 6, 9, 2, 4, 1]
        a = series(values)
        b = TimeSeries(
            points=[(day + timedelta(days=3), v) for day, v in a.points]
        )
        xc = cross_correlate(a, b, max_lag=5)
        assert xc.peak_lag == 3
        assert xc.correlations[3] == pytest.approx(1.0)

    def test_constant_series_flagged_undefined(self):
        a = series([1, 2, 3, 4, 5])
        flat = series([7, 7, 7, 7, 7])
        xc = cross_correlate(a, flat, max_lag=1)
        assert all(v is None for v in xc.correlations.values())
        assert xc.peak_lag is None

    def test_insufficient_overlap_rejected(self):
        a = series([1, 2, 3, 4])
        with pytest.raises(ValueError, match="overlap"):
            cross_correlate(a, a, max_lag=2)

    def test_all_lags_reported(self):
        s = series(range(10))
        xc = cross_correlate(s, s, max_lag=2)
        assert sorted(xc.correlations) == [-2, -1, 0, 1, 2]


class TestClusteringAgreementMetrics:
    def test_permuted_labels_perfect(self):
        y_gr = [0, 0, 1, 1]
        y_pred = [5, 5, 2, 2]
        assert homogeneity(y_gr, y_pred) == 1.0
        assert completeness(y_gr, y_pred) == 1.0
        assert v_measure(y_gr, y_pred) == 1.0

    def test_single_cluster_degenerate(self):
        y_gr = [0, 0, 1, 1]
        y_pred = [0, 0, 0, 0]
        assert homogeneity(y_gr, y_pred) == 0.0
        assert completeness(y_gr, y_pred) == 1.0
        assert v_measure(y_gr, y_pred) == 0.0

    def test_reference_fixture(self):
        y_gr = [0, 0, 1, 1]
        y_pred = [0, 0, 0, 1]
        h, c, v = oracle_entropy_metrics(y_gr, y_pred)
        assert homogeneity(y_gr, y_pred) == pytest.approx(h)
        assert completeness(y_gr, y_pred) == pytest.approx(c)
        assert v_measure(y_gr, y_pred) == pytest.approx(v)
        assert homogeneity(y_gr, y_pred) == pytest.approx(0.3113, abs=1e-3)
        assert completeness(y_gr, y_pred) == pytest.approx(0.3837, abs=1e-3)
        assert v_measure(y_gr, y_pred) == pytest.approx(0.3437, abs=1e-3)

    @pytest.mark.parametrize("seed", range(10))
    def test_swap_identity_and_range(self, seed):
        rnd = random.Random(seed)
        n = rnd.randint(2, 40)
        a = [rnd.randint(0, 4) for _ in range(n)]
        b = [rnd.randint(0, 4) for _ in range(n)]
        assert homogeneity(a, b) == pytest.approx(completeness(b, a))
        for value in (homogeneity(a, b), completeness(a, b), v_measure(a, b)):
            assert -1e-12 <= value <= 1 + 1e-12

    @pytest.mark.parametrize("seed", range(5))
    def test_agrees_with_sklearn(self, seed):
        sklearn_metrics = pytest.importorskip("sklearn.metrics")
        rnd = random.Random(100 + seed)
        n = rnd.randint(4, 50)
        a = [rnd.randint(0, 5) for _ in range(n)]
        b = [rnd.randint(0, 5) for _ in range(n)]
        h, c, v = sklearn_metrics.homogeneity_completeness_v_measure(a, b)
        assert homogeneity(a, b) == pytest.approx(h)
        assert completeness(a, b) == pytest.approx(c)
        assert v_measure(a, b) == pytest.approx(v)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            homogeneity([0, 1], [0])


class TestEvaluateCommunities:
    def test_perfect_relabeling(self):
        news = {0: {"a", "b"}, 1: {"c", "d"}}
        soc = {5: {"a", "b"}, 9: {"c", "d"}}
        report = evaluate_communities(news, soc)
        assert report.coverage == 1.0
        assert report.homogeneity == 1.0
        assert report.completeness == 1.0
        assert report.v_measure == 1.0

    def test_single_social_community(self):
        news = {0: {"a", "b"}, 1: {"c", "d"}}
        soc = {1: {"a", "b", "c", "d"}}
        report = evaluate_communities(news, soc)
        assert report.homogeneity == 1.0  # constant ground truth
        assert report.completeness == 0.0
        assert report.v_measure == 0.0

    def test_lowest_social_community_wins(self):
        news = {0: {"a"}}
        soc = {7: {"a"}, 2: {"a"}}
        report = evaluate_communities(news, soc)
        assert report.labels_true == [2]

    def test_lowest_news_community_wins(self):
        news = {3: {"a"}, 1: {"a"}}
        soc = {0: {"a"}}
        report = evaluate_communities(news, soc)
        assert report.labels_pred == [1]

    def test_unmatched_actants_lower_coverage(self):
        news = {0: {"a", "ghost"}}
        soc = {0: {"a"}}
        report = evaluate_communities(news, soc)
        assert report.matched == 1 and report.total == 2
        assert report.coverage == 0.5

    def test_no_matches_flagged_undefined(self):
        report = evaluate_communities({0: {"x"}}, {0: {"y"}})
        assert report.coverage == 0.0
        assert not report.defined
        assert report.homogeneity is None

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValueError):
            evaluate_communities({}, {0: {"a"}})


class TestSubcorpusTokens:
    def test_time_bounds_and_undated_exclusion(self):
        tuples = [
            make_tuple("early bird", "sings", "song", day=date(2020, 1, 1)),
            make_tuple("late owl", "hoots", "tune", day=date(2020, 1, 9)),
            make_tuple("no date", "has", "nothing"),
        ]
        corpus = build_corpus(tuples)
        tokens = subcorpus_tokens(corpus, date(2020, 1, 1), date(2020, 1, 5))
        assert tokens == ["early", "bird", "song"]

    def test_unbounded_includes_undated(self):
        corpus = build_corpus([make_tuple("no date", "has", "nothing")])
        assert subcorpus_tokens(corpus) == ["no", "date", "nothing"]
