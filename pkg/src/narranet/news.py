"""Sliding-window dynamics of the dated news corpus.

The corpus is segmented into fixed-width windows shifted by a fixed number of
days. Each window selects its salient entities (segment TF-IDF merged with a
constant high-frequency set, both drawn from the social-media vocabulary) and
builds a symmetric headword co-occurrence network. Entity-pair attachment is
tracked as the common-neighbor count per window.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, timedelta

import networkx as nx
import numpy as np

from .ingest import AliasMap, Corpus, RelationTuple
from .metrics import TimeSeries

logger = logging.getLogger(__name__)


@dataclass
class WindowSegment:
    """One sliding window: [start, end) with its tuples and entity set."""

    index: int
    start: date
    end: date
    tuples: list[RelationTuple] = field(default_factory=list)
    entities: list[str] | None = None


@dataclass
class CooccurrenceNetwork:
    """Symmetric entity co-occurrence counts for one window.

    ``matrix`` holds raw integer counts with a zero diagonal; ``normalized``
    is its row-wise L1 normalization (zero rows stay zero).
    """

    entities: list[str]
    matrix: np.ndarray
    normalized: np.ndarray
    window_index: int = 0
    window_start: date | None = None

    def neighbors(self, entity: str) -> set[str]:
        if entity not in self.entities:
            return set()
        i = self.entities.index(entity)
        return {self.entities[j] for j in np.nonzero(self.matrix[i])[0]}


def make_windows(
    t0: date, t1: date, width: int = 5, shift: int = 1
) -> list[WindowSegment]:
    """Enumerate window segments over the inclusive day span [t0, t1].

    Produces starts t0, t0+shift, ... while the full window still fits, i.e.
    floor((span_days - width)/shift) + 1 segments. A span shorter than the
    width yields no segments, with a warning.
    """
    if t0 > t1:
        raise ValueError(f"t0 {t0} is after t1 {t1}")
    if width < 1 or shift < 1:
        raise ValueError("width and shift must be >= 1")
    span_days = (t1 - t0).days + 1
    if span_days < width:
        logger.warning("span of %d days is shorter than window width %d", span_days, width)
        return []
    count = (span_days - width) // shift + 1
    segments = []
    for i in range(count):
        start = t0 + timedelta(days=i * shift)
        segments.append(WindowSegment(index=i, start=start, end=start + timedelta(days=width)))
    return segments


def populate_windows(segments: list[WindowSegment], corpus: Corpus) -> list[WindowSegment]:
    """Attach each dated tuple to every window covering its day."""
    for seg in segments:
        seg.tuples = [
            t for t in corpus.tuples if t.date is not None and seg.start <= t.date < seg.end
        ]
    return segments


def _segment_token_counts(segment: WindowSegment, vocabulary: set[str]) -> Counter[str]:
    counts: Counter[str] = Counter()
    for t in segment.tuples:
        for token in t.arg1_text.split() + t.arg2_text.split():
            if token in vocabulary:
                counts[token] += 1
    return counts


def tfidf_matrix(
    segments: list[WindowSegment], vocabulary: list[str]
) -> np.ndarray:
    """Segment-by-vocabulary TF-IDF matrix.

    tf counts token occurrences in a segment's argument phrases; idf is
    log(s / (1 + df)) over the s segments.
    """
    vocab_set = set(vocabulary)
    col = {tok: i for i, tok in enumerate(vocabulary)}
    s = len(segments)
    tf = np.zeros((s, len(vocabulary)), dtype=np.float64)
    for row, seg in enumerate(segments):
        for token, count in _segment_token_counts(seg, vocab_set).items():
            tf[row, col[token]] = count
    df = np.count_nonzero(tf, axis=0)
    idf = np.log(s / (1.0 + df))
    return tf * idf


def select_entities(
    segment: WindowSegment,
    tfidf: np.ndarray,
    vocabulary: list[str],
    global_freq: dict[str, int],
    alias_map: AliasMap | None = None,
    top_tfidf: int = 25,
    top_freq: int = 100,
) -> list[str]:
    """Merge the segment's top TF-IDF tokens with the constant top-frequency
    set, canonicalize aliases and deduplicate.

    Only tokens actually present in the segment are candidates for the
    TF-IDF cut. Ties break by global frequency, then lexicographically.
    Cutoffs larger than the vocabulary simply take everything.
    """
    col = {tok: i for i, tok in enumerate(vocabulary)}
    row = tfidf[segment.index]
    seg_counts = _segment_token_counts(segment, set(vocabulary))
    ranked = sorted(
        seg_counts,
        key=lambda tok: (-row[col[tok]], -global_freq.get(tok, 0), tok),
    )
    chosen = set(ranked[:top_tfidf])
    by_freq = sorted(vocabulary, key=lambda tok: (-global_freq.get(tok, 0), tok))
    chosen.update(by_freq[:top_freq])
    if alias_map is not None:
        chosen = {alias_map.apply(tok) for tok in chosen}
    entities = sorted(chosen)
    segment.entities = entities
    return entities


def cooccur_network(
    tuples: list[RelationTuple],
    entities: list[str],
    stop_words: set[str],
    alias_map: AliasMap | None = None,
    window_index: int = 0,
    window_start: date | None = None,
) -> CooccurrenceNetwork:
    """Build the symmetric headword co-occurrence network for one segment.

    For every tuple the (canonicalized) subject and object headwords must
    both be selected entities, differ from each other, and the relation
    headword must not be a stop word; each qualifying tuple increments the
    count in both directions. Rows of the normalized matrix sum to one
    unless entirely zero.
    """
    ents = sorted(set(entities))
    index = {e: i for i, e in enumerate(ents)}
    n = len(ents)
    matrix = np.zeros((n, n), dtype=np.int64)
    canon = alias_map.apply if alias_map is not None else (lambda t: t)
    for t in tuples:
        s = canon(t.arg1_head)
        o = canon(t.arg2_head)
        r = t.rel_head
        if s in index and o in index and s != o and r not in stop_words:
            matrix[index[s], index[o]] += 1
            matrix[index[o], index[s]] += 1
    sums = matrix.sum(axis=1, keepdims=True).astype(np.float64)
    normalized = np.divide(
        matrix, sums, out=np.zeros(matrix.shape, dtype=np.float64), where=sums > 0
    )
    return CooccurrenceNetwork(
        entities=ents,
        matrix=matrix,
        normalized=normalized,
        window_index=window_index,
        window_start=window_start,
    )


def common_neighbors(network: CooccurrenceNetwork, a1: str, a2: str) -> int:
    """Count of shared co-occurrence neighbors between two entities."""
    for a in (a1, a2):
        if a not in network.entities:
            logger.warning("entity %r not in window %d network", a, network.window_index)
            return 0
    return len(network.neighbors(a1) & network.neighbors(a2))


def attachment_series(
    networks: list[CooccurrenceNetwork], a1: str, a2: str
) -> TimeSeries:
    """Common-neighbor count per window, indexed by window start day."""
    points = []
    for net in networks:
        if net.window_start is None:
            raise ValueError("networks need window_start dates for a series")
        points.append((net.window_start, float(common_neighbors(net, a1, a2))))
    points.sort(key=lambda p: p[0])
    return TimeSeries(points=points)


def window_count(span_days: int, width: int, shift: int) -> int:
    """Closed-form segment count for an inclusive span of ``span_days``."""
    if span_days < width:
        return 0
    return (span_days - width) // shift + 1


def network_to_csv(network: CooccurrenceNetwork) -> str:
    lines = ["entity," + ",".join(network.entities)]
    for i, ent in enumerate(network.entities):
        lines.append(ent + "," + ",".join(str(int(v)) for v in network.matrix[i]))
    return "\n".join(lines) + "\n"


def write_network_graphml(network: CooccurrenceNetwork, path) -> None:
    """GraphML export with raw counts as weights and normalized counts as
    edge metadata."""
    g = nx.Graph()
    g.add_nodes_from(network.entities)
    n = len(network.entities)
    for i in range(n):
        for j in range(i + 1, n):
            w = int(network.matrix[i, j])
            if w > 0:
                g.add_edge(
                    network.entities[i],
                    network.entities[j],
                    weight=w,
                    normalized=float(network.normalized[i, j]),
                )
    nx.write_graphml(g, str(path))
