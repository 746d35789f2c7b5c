"""Coverage, correlation and clustering-agreement measurements.

These are the evaluation primitives tying the social-media communities to
the news stream: how strongly a community's vocabulary appears in a
time-bounded sub-corpus, how that coverage compares against random
communities drawn from the entity vocabulary, how two coverage series
correlate across time lags, and how well two community assignments agree
(homogeneity / completeness / V-measure, natural-log entropies).
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class TimeSeries:
    """Dated scalar measurements with strictly increasing days."""

    points: list[tuple[date, float]]
    smoothing_width: int = 1

    def __post_init__(self):
        for (d1, v), (d2, _) in zip(self.points, self.points[1:]):
            if d2 <= d1:
                raise ValueError(f"days must strictly increase, got {d1} then {d2}")
        for d, v in self.points:
            if not math.isfinite(v):
                raise ValueError(f"non-finite value at {d}")

    def days(self) -> list[date]:
        return [d for d, _ in self.points]

    def values(self) -> list[float]:
        return [v for _, v in self.points]

    def as_dict(self) -> dict[date, float]:
        return dict(self.points)

    def __len__(self) -> int:
        return len(self.points)


def smooth_series(series: TimeSeries, width: int = 5) -> TimeSeries:
    """Centered moving average over ``width`` consecutive points.

    Edge points average over the partial window that fits.
    """
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    half = width // 2
    values = series.values()
    smoothed = []
    for i, (d, _) in enumerate(series.points):
        lo = max(0, i - half)
        hi = min(len(values), i + half + 1)
        smoothed.append((d, float(np.mean(values[lo:hi]))))
    return TimeSeries(points=smoothed, smoothing_width=width)


def _phrase_occurrences(needle: list[str], tokens: Sequence[str]) -> int:
    n = len(needle)
    return sum(
        1
        for i in range(len(tokens) - n + 1)
        if list(tokens[i : i + n]) == needle
    )


def coverage_score(community_words: Sequence[str], tokens: Sequence[str]) -> float:
    """Fraction of community-word hits in a token stream, normalized by both
    community size and stream length.

    Multi-word community entries match as contiguous token sequences and
    every occurrence counts. An empty token stream scores 0 by convention.
    """
    vocab = sorted(set(community_words))
    if not vocab:
        raise ValueError("community word set is empty")
    if not tokens:
        return 0.0
    token_counts = Counter(tokens)
    hits = 0
    for word in vocab:
        if " " in word:
            hits += _phrase_occurrences(word.split(), tokens)
        else:
            hits += token_counts.get(word, 0)
    return hits / (len(vocab) * len(tokens))


@dataclass
class RelativeCoverage:
    ratio: float
    score: float
    baseline_mean: float
    degenerate: bool = False


def relative_coverage(
    community_words: Sequence[str],
    tokens: Sequence[str],
    vocabulary: Sequence[str],
    n_samples: int = 20,
    sample_size: int = 500,
    seed: int = 0,
) -> RelativeCoverage:
    """Coverage of a community relative to random same-vocabulary communities.

    The baseline is the mean coverage of ``n_samples`` communities of
    ``sample_size`` words sampled uniformly without replacement from the
    entity vocabulary (with replacement, and a warning, when the vocabulary
    is smaller than the sample). A zero baseline yields an infinite ratio
    flagged as degenerate. Deterministic for a fixed seed and invariant
    under vocabulary permutation.
    """
    vocab = sorted(set(vocabulary))
    if not vocab:
        raise ValueError("vocabulary is empty")
    rng = np.random.default_rng(seed)
    replace = len(vocab) < sample_size
    if replace:
        logger.warning(
            "vocabulary size %d below sample size %d; sampling with replacement",
            len(vocab),
            sample_size,
        )
    score = coverage_score(community_words, tokens)
    baselines = []
    for _ in range(n_samples):
        sample = rng.choice(len(vocab), size=sample_size, replace=replace)
        baselines.append(coverage_score([vocab[i] for i in sample], tokens))
    mean = float(np.mean(baselines))
    if mean == 0.0:
        return RelativeCoverage(ratio=math.inf, score=score, baseline_mean=0.0, degenerate=True)
    return RelativeCoverage(ratio=score / mean, score=score, baseline_mean=mean)


@dataclass
class CrossCorrelation:
    """Per-lag Pearson correlations; ``None`` marks an undefined lag."""

    correlations: dict[int, float | None]
    peak_lag: int | None

    def peak_value(self) -> float | None:
        if self.peak_lag is None:
            return None
        return self.correlations[self.peak_lag]


def cross_correlate(
    series_a: TimeSeries, series_b: TimeSeries, max_lag: int
) -> CrossCorrelation:
    """Pearson correlation of aligned values for each lag in [-max_lag, max_lag].

    The correlation at lag L pairs a(t) with b(t + L), so a positive peak lag
    means series_b trails series_a by that many days. Every evaluated lag
    must leave at least 3 overlapping days; a constant overlap is flagged as
    undefined (None) for that lag. The peak is the highest defined
    correlation, ties preferring the smallest absolute lag.
    """
    if max_lag < 0:
        raise ValueError(f"max_lag must be >= 0, got {max_lag}")
    b_by_day = series_b.as_dict()
    correlations: dict[int, float | None] = {}
    for lag in range(-max_lag, max_lag + 1):
        pairs = [
            (va, b_by_day[d + timedelta(days=lag)])
            for d, va in series_a.points
            if d + timedelta(days=lag) in b_by_day
        ]
        if len(pairs) < 3:
            raise ValueError(f"only {len(pairs)} overlapping days at lag {lag}; need >= 3")
        xs = np.array([p[0] for p in pairs])
        ys = np.array([p[1] for p in pairs])
        sx, sy = xs.std(), ys.std()
        if sx == 0.0 or sy == 0.0:
            correlations[lag] = None
            continue
        correlations[lag] = float(((xs - xs.mean()) * (ys - ys.mean())).mean() / (sx * sy))
    defined = [lag for lag, v in correlations.items() if v is not None]
    peak = min(defined, key=lambda lag: (-correlations[lag], abs(lag), lag)) if defined else None
    return CrossCorrelation(correlations=correlations, peak_lag=peak)


def _entropy(labels: Sequence) -> float:
    n = len(labels)
    counts = Counter(labels)
    return -sum((c / n) * math.log(c / n) for c in counts.values())


def _conditional_entropy(labels: Sequence, given: Sequence) -> float:
    n = len(labels)
    by_condition: dict = {}
    for lab, cond in zip(labels, given):
        by_condition.setdefault(cond, []).append(lab)
    return sum(len(subset) / n * _entropy(subset) for subset in by_condition.values())


def homogeneity(labels_true: Sequence, labels_pred: Sequence) -> float:
    """1 - H(true|pred)/H(true); 1.0 when the true labeling is constant."""
    if len(labels_true) != len(labels_pred):
        raise ValueError("label sequences differ in length")
    if not labels_true:
        raise ValueError("empty labelings")
    h_true = _entropy(labels_true)
    if h_true == 0.0:
        return 1.0
    return 1.0 - _conditional_entropy(labels_true, labels_pred) / h_true


def completeness(labels_true: Sequence, labels_pred: Sequence) -> float:
    """1 - H(pred|true)/H(pred); mirrors homogeneity with roles swapped."""
    return homogeneity(labels_pred, labels_true)


def v_measure(labels_true: Sequence, labels_pred: Sequence) -> float:
    """Harmonic mean of homogeneity and completeness (0 when both are 0)."""
    h = homogeneity(labels_true, labels_pred)
    c = completeness(labels_true, labels_pred)
    if h + c == 0.0:
        return 0.0
    return 2.0 * h * c / (h + c)


@dataclass
class AgreementReport:
    """Per-window agreement between news and social-media communities."""

    coverage: float
    homogeneity: float | None
    completeness: float | None
    v_measure: float | None
    matched: int
    total: int
    defined: bool = True
    labels_true: list[int] = field(default_factory=list)
    labels_pred: list[int] = field(default_factory=list)


def evaluate_communities(
    news_communities: dict[int, set[str]],
    socmed_communities: dict[int, set[str]],
) -> AgreementReport:
    """Match news-community actants to social-media communities and score
    the two labelings.

    Every actant appearing in a news community is looked up in the social
    communities; matches contribute (ground truth = lowest matching social
    community, prediction = lowest containing news community). The coverage
    fraction divides matches by all distinct actants in the news
    communities. With no matches the entropy metrics are undefined.
    """
    if not news_communities or not socmed_communities:
        raise ValueError("both community sets must be non-empty")
    assigned: dict[str, tuple[int, int]] = {}
    all_actants: set[str] = set()
    for i in sorted(news_communities):
        for actant in sorted(news_communities[i]):
            all_actants.add(actant)
            if actant in assigned:
                continue
            for j in sorted(socmed_communities):
                if actant in socmed_communities[j]:
                    assigned[actant] = (j, i)
                    break
    if not assigned:
        return AgreementReport(
            coverage=0.0,
            homogeneity=None,
            completeness=None,
            v_measure=None,
            matched=0,
            total=len(all_actants),
            defined=False,
        )
    actants = sorted(assigned)
    y_gr = [assigned[a][0] for a in actants]
    y_pred = [assigned[a][1] for a in actants]
    return AgreementReport(
        coverage=len(assigned) / len(all_actants),
        homogeneity=homogeneity(y_gr, y_pred),
        completeness=completeness(y_gr, y_pred),
        v_measure=v_measure(y_gr, y_pred),
        matched=len(assigned),
        total=len(all_actants),
        labels_true=y_gr,
        labels_pred=y_pred,
    )


def subcorpus_tokens(
    corpus, t_start: date | None = None, t_end: date | None = None
) -> list[str]:
    """Token stream of a time-bounded sub-corpus.

    Concatenates the argument-phrase tokens of every tuple dated in
    [t_start, t_end); open bounds admit everything on that side. Undated
    tuples are excluded whenever any bound is set.
    """
    tokens: list[str] = []
    bounded = t_start is not None or t_end is not None
    for t in corpus.tuples:
        if bounded:
            if t.date is None:
                continue
            if t_start is not None and t.date < t_start:
                continue
            if t_end is not None and t.date >= t_end:
                continue
        tokens.extend(t.arg1_text.split())
        tokens.extend(t.arg2_text.split())
    return tokens
