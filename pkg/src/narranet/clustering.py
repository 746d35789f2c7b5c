"""Embedding-based clustering of contextual-group phrases into sub-nodes.

Each contextual group is clustered independently with seeded k-means
(k-means++ initialization, fixed iteration cap), so groups can be processed
in any order or in parallel and still produce identical results. Sub-nodes
are labeled with their top TF-IDF words and scored by seed-entity salience.
"""

from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, replace

import numpy as np

from .grouping import ContextualGroup, _seed_tokens_in, _split_seeds
from .ingest import Corpus, EmbeddingTable, SeedEntityList

logger = logging.getLogger(__name__)

MAX_ITER = 100
SHIFT_TOL = 1e-6
LABEL_WORDS = 3


@dataclass(frozen=True)
class Subnode:
    """A phrase cluster inside one contextual group."""

    id: str
    group_id: int
    member_phrases: tuple[str, ...]
    centroid: np.ndarray
    label: tuple[str, ...] = ()
    ner_score: float = 0.0


def default_k(n_phrases: int) -> int:
    """Sub-node count policy: scales with group size, always >= 1."""
    return max(1, math.ceil(math.sqrt(n_phrases / 2)))


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]), dtype=np.float64)
    centroids[0] = points[rng.integers(n)]
    closest = np.sum((points - centroids[0]) ** 2, axis=1)
    for i in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        centroids[i] = points[idx]
        closest = np.minimum(closest, np.sum((points - centroids[i]) ** 2, axis=1))
    return centroids


def kmeans(
    points: np.ndarray, k: int, seed: int, distance: str = "euclidean"
) -> tuple[np.ndarray, np.ndarray, float, int]:
    """Seeded k-means over row vectors.

    Returns (labels, centroids, objective, iterations) where the objective is
    the sum of squared distances to assigned centroids. ``distance`` is
    "euclidean" (raw vectors) or "cosine" (unit-normalized rows). Assignment
    ties go to the lowest centroid index; an emptied cluster is re-seeded at
    the point currently farthest from its centroid, so the run is fully
    deterministic for a fixed seed.
    """
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("points must be a non-empty 2-D array")
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if distance == "cosine":
        norms = np.linalg.norm(points, axis=1, keepdims=True)
        points = np.where(norms > 0, points / np.where(norms == 0, 1, norms), points)
    elif distance != "euclidean":
        raise ValueError(f"unknown distance {distance!r}")

    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(points, k, rng)
    labels = np.zeros(n, dtype=np.int64)
    for iteration in range(1, MAX_ITER + 1):
        dist2 = np.sum((points[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        labels = np.argmin(dist2, axis=1)
        new_centroids = centroids.copy()
        reseeded: set[int] = set()
        for c in range(k):
            mask = labels == c
            if not np.any(mask):
                # revive an empty cluster at the worst-fit point; each point
                # can only seed one cluster per iteration
                assigned = dist2[np.arange(n), labels].copy()
                if reseeded:
                    assigned[list(reseeded)] = -1.0
                worst = int(np.argmax(assigned))
                reseeded.add(worst)
                new_centroids[c] = points[worst]
                labels[worst] = c
            else:
                new_centroids[c] = points[mask].mean(axis=0)
        scale = 1.0 + float(np.max(np.linalg.norm(centroids, axis=1)))
        shift = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        if shift / scale < SHIFT_TOL:
            break
    dist2 = np.sum((points[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
    labels = np.argmin(dist2, axis=1)
    objective = float(np.sum(dist2[np.arange(n), labels]))
    return labels, centroids, objective, iteration


def kmeans_cluster(
    group: ContextualGroup,
    emb: EmbeddingTable,
    k: int | None = None,
    seed: int = 0,
    distance: str = "euclidean",
) -> list[Subnode]:
    """Cluster one group's phrases into sub-nodes.

    Missing phrase embeddings fall back to the mean of member-token vectors;
    phrases with no vector at all are attached post-hoc to the centroid
    nearest the origin. ``k`` above the phrase count is clamped with a
    warning; an empty group yields no sub-nodes.
    """
    phrases = sorted(group.member_phrases)
    if not phrases:
        return []
    if k is None:
        k = default_k(len(phrases))
    if k > len(phrases):
        logger.warning(
            "group %d: k=%d exceeds %d phrases, clamping", group.id, k, len(phrases)
        )
        k = len(phrases)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    vectors: dict[str, np.ndarray] = {}
    missing: list[str] = []
    for p in phrases:
        vec = emb.phrase_vector(p)
        if vec is None:
            missing.append(p)
        else:
            vectors[p] = vec
    if not vectors:
        logger.warning("group %d: no member phrase has an embedding", group.id)
        return [
            Subnode(
                id=f"{group.id}:0",
                group_id=group.id,
                member_phrases=tuple(phrases),
                centroid=np.zeros(emb.dimension),
            )
        ]

    known = sorted(vectors)
    points = np.vstack([vectors[p] for p in known])
    k = min(k, len(known))
    labels, centroids, _, _ = kmeans(points, k, seed=seed, distance=distance)
    clusters: dict[int, list[str]] = defaultdict(list)
    for phrase, lab in zip(known, labels):
        clusters[int(lab)].append(phrase)
    if missing:
        zero_dist = np.linalg.norm(centroids, axis=1)
        nearest = int(np.argmin(zero_dist))
        clusters[nearest].extend(missing)

    subnodes = []
    for c in sorted(clusters):
        subnodes.append(
            Subnode(
                id=f"{group.id}:{c}",
                group_id=group.id,
                member_phrases=tuple(sorted(clusters[c])),
                centroid=centroids[c],
            )
        )
    return subnodes


def label_tfidf(subnodes: list[Subnode], corpus: Corpus) -> list[Subnode]:
    """Label each sub-node with its top TF-IDF words.

    tf counts a word over the sub-node's member-phrase occurrences in the
    corpus; idf uses the smooth form log((1+N)/(1+df)) + 1 over the N
    sub-nodes so that scores stay positive and a degenerate single-sub-node
    collection still ranks by raw frequency. Ties break lexicographically.
    """
    phrase_counts = corpus.phrase_counts()
    n_sub = len(subnodes)
    term_freqs: list[Counter[str]] = []
    doc_freq: Counter[str] = Counter()
    for sn in subnodes:
        tf: Counter[str] = Counter()
        for phrase in sn.member_phrases:
            occurrences = phrase_counts.get(phrase, 0)
            for token in phrase.split():
                tf[token] += occurrences
        term_freqs.append(tf)
        doc_freq.update(set(tf))

    labeled = []
    for sn, tf in zip(subnodes, term_freqs):
        scores = {
            w: count * (math.log((1 + n_sub) / (1 + doc_freq[w])) + 1.0)
            for w, count in tf.items()
            if count > 0
        }
        top = sorted(scores, key=lambda w: (-scores[w], w))[:LABEL_WORDS]
        labeled.append(replace(sn, label=tuple(top)))
    return labeled


def ner_score(subnode: Subnode, seeds: SeedEntityList, phrase_counts: Counter[str]) -> float:
    """Total corpus frequency of member phrases containing a seed token."""
    single, multi = _split_seeds(seeds)
    total = 0
    for phrase in subnode.member_phrases:
        if _seed_tokens_in(phrase, single, multi):
            total += phrase_counts.get(phrase, 0)
    return float(total)


def score_subnodes(
    subnodes: list[Subnode], corpus: Corpus, seeds: SeedEntityList
) -> list[Subnode]:
    phrase_counts = corpus.phrase_counts()
    return [
        replace(sn, ner_score=ner_score(sn, seeds, phrase_counts)) for sn in subnodes
    ]


def cluster_groups(
    groups: list[ContextualGroup],
    emb: EmbeddingTable,
    seed: int = 0,
    k_override: int | None = None,
    k_per_group: dict[int, int] | None = None,
    distance: str = "euclidean",
) -> list[Subnode]:
    """Cluster every group; per-group seeds derive from group id so results
    do not depend on processing order."""
    subnodes: list[Subnode] = []
    for group in sorted(groups, key=lambda g: g.id):
        k = k_override
        if k_per_group and group.id in k_per_group:
            k = k_per_group[group.id]
        if k is not None:
            k = min(k, len(group.member_phrases)) or 1
        subnodes.extend(
            kmeans_cluster(group, emb, k=k, seed=seed + group.id + 1, distance=distance)
        )
    return subnodes


def subnode_index(subnodes: list[Subnode]) -> dict[str, list[str]]:
    """Phrase -> sorted ids of every sub-node containing it (across groups)."""
    index: dict[str, list[str]] = defaultdict(list)
    for sn in subnodes:
        for phrase in sn.member_phrases:
            index[phrase].append(sn.id)
    return {phrase: sorted(ids) for phrase, ids in index.items()}
