"""NER-seeded contextual grouping of noun phrases.

Seed entities that frequently share a phrase are merged into one contextual
group; every argument phrase is then assigned to each group whose seed it
contains. Phrases containing no seed token fall into a residual group with
id -1 so their relationship mass is not discarded.

Co-occurrence is counted per phrase *occurrence* (each arg slot of each
tuple), not per distinct phrase.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass

from .ingest import Corpus, SeedEntityList

logger = logging.getLogger(__name__)

RESIDUAL_GROUP_ID = -1


@dataclass(frozen=True)
class ContextualGroup:
    """A seed-defined macro-context over argument phrases."""

    id: int
    seeds: frozenset[str]
    member_phrases: frozenset[str] = frozenset()
    frequency: int = 0


class UnionFind:
    """Minimal union-find over hashable items."""

    def __init__(self, items=()):
        self.parent = {x: x for x in items}

    def add(self, x) -> None:
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def components(self) -> list[set]:
        groups: dict = defaultdict(set)
        for x in self.parent:
            groups[self.find(x)].add(x)
        return list(groups.values())


def _seed_tokens_in(phrase: str, single: set[str], multi: list[str]) -> set[str]:
    """Seeds present in a phrase: token match, or contiguous match for
    multi-token seeds."""
    tokens = phrase.split()
    found = set(tokens) & single
    for seed in multi:
        if f" {seed} " in f" {phrase} ":
            found.add(seed)
    return found


def _split_seeds(seeds: SeedEntityList) -> tuple[set[str], list[str]]:
    single = {s for s in seeds if " " not in s}
    multi = [s for s in seeds if " " in s]
    return single, multi


def seed_cooccurrence(corpus: Corpus, seeds: SeedEntityList) -> dict[tuple[str, str], int]:
    """Count phrase occurrences containing each seed pair.

    Returns a map from the sorted seed pair ``(a, b)``, a < b, to the number
    of phrase occurrences containing both. Self-pairs are excluded.
    """
    if len(seeds) == 0:
        raise ValueError("seed list is empty")
    single, multi = _split_seeds(seeds)
    counts: Counter[tuple[str, str]] = Counter()
    for t in corpus.tuples:
        for phrase in (t.arg1_text, t.arg2_text):
            present = sorted(_seed_tokens_in(phrase, single, multi))
            for i in range(len(present)):
                for j in range(i + 1, len(present)):
                    counts[(present[i], present[j])] += 1
    return dict(counts)


def form_groups(
    seeds: SeedEntityList,
    pair_counts: dict[tuple[str, str], int],
    min_cooc: int = 3,
) -> list[ContextualGroup]:
    """Connected components of the seed graph thresholded at ``min_cooc``.

    Seeds without any qualifying co-occurrence edge form singleton groups.
    Group ids are assigned in order of each component's lexicographically
    smallest seed, so the output is invariant under pair ordering.
    """
    if min_cooc < 1:
        raise ValueError(f"min_cooc must be >= 1, got {min_cooc}")
    uf = UnionFind(list(seeds))
    for (a, b), count in pair_counts.items():
        if count >= min_cooc:
            uf.add(a)
            uf.add(b)
            uf.union(a, b)
    components = sorted(uf.components(), key=min)
    return [
        ContextualGroup(id=i, seeds=frozenset(comp))
        for i, comp in enumerate(components)
    ]


def assign_phrases(
    corpus: Corpus, groups: list[ContextualGroup]
) -> tuple[dict[str, frozenset[int]], list[ContextualGroup]]:
    """Assign every distinct argument phrase to its seed groups.

    A phrase joins every group whose seed occurs in it (groups overlap at the
    phrase level); phrases with no seed are collected in the residual group.
    Returns the phrase assignment map and the groups rebuilt with member
    phrases and occurrence frequencies.
    """
    phrase_counts = corpus.phrase_counts()
    seed_to_groups: dict[str, int] = {}
    for g in groups:
        for s in g.seeds:
            seed_to_groups[s] = g.id
    single = {s for s in seed_to_groups if " " not in s}
    multi = [s for s in seed_to_groups if " " in s]

    assignment: dict[str, frozenset[int]] = {}
    members: dict[int, set[str]] = defaultdict(set)
    frequencies: Counter[int] = Counter()
    for phrase, count in phrase_counts.items():
        present = _seed_tokens_in(phrase, single, multi)
        ids = sorted({seed_to_groups[s] for s in present}) or [RESIDUAL_GROUP_ID]
        assignment[phrase] = frozenset(ids)
        for gid in ids:
            members[gid].add(phrase)
            frequencies[gid] += count

    rebuilt = [
        ContextualGroup(
            id=g.id,
            seeds=g.seeds,
            member_phrases=frozenset(members.get(g.id, set())),
            frequency=frequencies.get(g.id, 0),
        )
        for g in groups
    ]
    if members.get(RESIDUAL_GROUP_ID):
        rebuilt.append(
            ContextualGroup(
                id=RESIDUAL_GROUP_ID,
                seeds=frozenset(),
                member_phrases=frozenset(members[RESIDUAL_GROUP_ID]),
                frequency=frequencies[RESIDUAL_GROUP_ID],
            )
        )
    return assignment, rebuilt
