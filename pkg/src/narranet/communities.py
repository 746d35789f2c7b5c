"""Overlapping community detection by repeated greedy modularity optimization.

A single Louvain run gives one flat partition. Running it many times with
different node visit orders and grouping node pairs that land together in at
least ``tau_core`` of the runs yields disjoint community cores; relaxing the
threshold to ``tau_relax`` admits overlapping peripheral members. Labels come
from the highest-degree member sub-nodes.

Self-loop convention: an undirected self-loop of weight w counts once toward
the total edge weight m and twice toward its node's degree.
"""

from __future__ import annotations

import logging
import random
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations

from .graph import NarrativeGraph
from .grouping import UnionFind

logger = logging.getLogger(__name__)

Adjacency = dict[str, dict[str, float]]

_EPS = 1e-12


@dataclass
class LouvainResult:
    partition: dict[str, int]
    modularity: float
    pass_modularities: list[float]


@dataclass(frozen=True)
class Community:
    id: int
    core: frozenset[str]
    peripheral: frozenset[str] = frozenset()
    label: str = ""

    @property
    def members(self) -> frozenset[str]:
        return self.core | self.peripheral

    @property
    def size(self) -> int:
        return len(self.core) + len(self.peripheral)


@dataclass
class CommunitySet:
    communities: list[Community]
    runs: int
    tau_core: float
    tau_relax: float
    seed: int
    node_index: dict[str, list[int]] = field(default_factory=dict)

    def rebuild_index(self) -> None:
        index: dict[str, list[int]] = defaultdict(list)
        for com in self.communities:
            for node in com.members:
                index[node].append(com.id)
        self.node_index = {n: sorted(ids) for n, ids in index.items()}


def modularity(adj: Adjacency, partition: dict[str, int]) -> float:
    """Q = sum over communities of e_c/m - (d_c/2m)^2."""
    m = 0.0
    strength: dict[str, float] = {}
    for node, nbrs in adj.items():
        s = 0.0
        for nbr, w in nbrs.items():
            s += w if nbr != node else 2 * w
            if nbr >= node:
                m += w
        strength[node] = s
    if m <= 0:
        return 0.0
    internal: Counter = Counter()
    degree: Counter = Counter()
    for node, nbrs in adj.items():
        c = partition[node]
        degree[c] += strength[node]
        for nbr, w in nbrs.items():
            if nbr == node:
                internal[c] += w
            elif nbr > node and partition[nbr] == c:
                internal[c] += w
    return sum(internal[c] / m - (degree[c] / (2 * m)) ** 2 for c in degree)


def _one_level(
    nodes: list[int],
    adj: list[dict[int, float]],
    strength: list[float],
    m: float,
    rng: random.Random,
) -> tuple[list[int], bool]:
    """Greedy local moving; returns (community per node, moved_any)."""
    comm = list(range(len(nodes)))
    comm_total = strength.copy()
    visit = nodes.copy()
    moved_any = False
    improved = True
    while improved:
        improved = False
        rng.shuffle(visit)
        for node in visit:
            current = comm[node]
            links: dict[int, float] = defaultdict(float)
            for nbr, w in adj[node].items():
                if nbr != node:
                    links[comm[nbr]] += w
            comm_total[current] -= strength[node]
            # a move needs strictly more gain than staying; equal-gain
            # destinations are drawn at random so repeated runs explore them
            best_gain = links.get(current, 0.0) - comm_total[current] * strength[node] / (2 * m)
            ties: list[int] = []
            for cand in sorted(links):
                if cand == current:
                    continue
                gain = links[cand] - comm_total[cand] * strength[node] / (2 * m)
                if gain > best_gain + _EPS:
                    best_gain = gain
                    ties = [cand]
                elif ties and gain >= best_gain - _EPS:
                    ties.append(cand)
            if ties:
                target = ties[0] if len(ties) == 1 else ties[rng.randrange(len(ties))]
                comm[node] = target
                comm_total[target] += strength[node]
                improved = True
                moved_any = True
            else:
                comm_total[current] += strength[node]
    return comm, moved_any


def louvain_once(adj: Adjacency, seed: int = 0) -> LouvainResult:
    """One seeded Louvain run over an undirected weighted adjacency.

    The node visit order inside each pass is shuffled by ``seed``. Modularity
    is recorded after every pass and never decreases. An edgeless graph maps
    every node to its own community with Q = 0.
    """
    names = sorted(adj)
    index = {n: i for i, n in enumerate(names)}
    m = 0.0
    int_adj: list[dict[int, float]] = [dict() for _ in names]
    for node, nbrs in adj.items():
        i = index[node]
        for nbr, w in nbrs.items():
            j = index[nbr]
            int_adj[i][j] = int_adj[i].get(j, 0.0) + (w if i != j else 2 * w)
            if j >= i:
                m += w
    if m <= 0:
        return LouvainResult(
            partition={n: i for i, n in enumerate(names)},
            modularity=0.0,
            pass_modularities=[0.0],
        )

    rng = random.Random(seed)
    # node_comm[i] = community of original node i, refined across passes
    node_comm = list(range(len(names)))
    work_adj = int_adj
    work_nodes = list(range(len(names)))
    pass_q: list[float] = []
    prev_q = None
    while True:
        strength = [sum(nbrs.values()) for nbrs in work_adj]
        comm, moved = _one_level(work_nodes, work_adj, strength, m, rng)
        relabel: dict[int, int] = {}
        for c in comm:
            if c not in relabel:
                relabel[c] = len(relabel)
        comm = [relabel[c] for c in comm]
        node_comm = [comm[node_comm[i]] for i in range(len(names))]
        partition = {names[i]: node_comm[i] for i in range(len(names))}
        q = modularity(adj, partition)
        pass_q.append(q)
        if not moved or (prev_q is not None and q <= prev_q + _EPS):
            break
        prev_q = q
        # aggregate communities into a meta graph for the next pass
        n_comm = len(relabel)
        agg: list[dict[int, float]] = [dict() for _ in range(n_comm)]
        for i, nbrs in enumerate(work_adj):
            ci = comm[i]
            for j, w in nbrs.items():
                cj = comm[j]
                agg[ci][cj] = agg[ci].get(cj, 0.0) + w
        work_adj = agg
        work_nodes = list(range(n_comm))

    # deterministic labels: renumber by first appearance over sorted nodes
    relabel = {}
    for i in range(len(names)):
        c = node_comm[i]
        if c not in relabel:
            relabel[c] = len(relabel)
    partition = {names[i]: relabel[node_comm[i]] for i in range(len(names))}
    return LouvainResult(partition=partition, modularity=pass_q[-1], pass_modularities=pass_q)


def _run_louvain(args: tuple[Adjacency, int]) -> dict[str, int]:
    adj, seed = args
    return louvain_once(adj, seed).partition


def ensemble_communities(
    graph: NarrativeGraph | Adjacency,
    runs: int = 100,
    tau_core: float = 0.9,
    tau_relax: float = 0.5,
    seed: int = 0,
    workers: int = 1,
) -> CommunitySet:
    """Consensus of repeated Louvain runs with core/periphery thresholds.

    Cores are the connected components of node pairs co-assigned in at least
    ``tau_core`` of the runs (disjoint by construction); a node becomes
    peripheral to a community when its mean co-assignment frequency with that
    community's core reaches ``tau_relax``. Per-run seeds derive from the
    master seed, so the result is reproducible at any worker count.
    """
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    if not 0 < tau_relax <= tau_core <= 1:
        raise ValueError(
            f"need 0 < tau_relax <= tau_core <= 1, got tau_relax={tau_relax}, tau_core={tau_core}"
        )
    adj = graph.undirected_adjacency() if isinstance(graph, NarrativeGraph) else graph
    nodes = sorted(adj)
    rng = random.Random(seed)
    run_seeds = [rng.randrange(2**32) for _ in range(runs)]

    if workers > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partitions = list(pool.map(_run_louvain, [(adj, s) for s in run_seeds]))
    else:
        partitions = [louvain_once(adj, s).partition for s in run_seeds]

    pair_counts: Counter[tuple[str, str]] = Counter()
    for partition in partitions:
        groups: dict[int, list[str]] = defaultdict(list)
        for node, c in partition.items():
            groups[c].append(node)
        for members in groups.values():
            for a, b in combinations(sorted(members), 2):
                pair_counts[(a, b)] += 1

    freq = {pair: count / runs for pair, count in pair_counts.items()}
    uf = UnionFind(nodes)
    for (a, b), f in freq.items():
        if f + _EPS >= tau_core:
            uf.union(a, b)
    cores = sorted(uf.components(), key=lambda c: (-len(c), min(c)))

    def pair_freq(a: str, b: str) -> float:
        return freq.get((a, b) if a < b else (b, a), 0.0)

    communities = []
    for cid, core in enumerate(cores):
        peripheral = set()
        for node in nodes:
            if node in core:
                continue
            mean_f = sum(pair_freq(node, member) for member in core) / len(core)
            if mean_f + _EPS >= tau_relax:
                peripheral.add(node)
        communities.append(
            Community(id=cid, core=frozenset(core), peripheral=frozenset(peripheral))
        )
    cset = CommunitySet(
        communities=communities,
        runs=runs,
        tau_core=tau_core,
        tau_relax=tau_relax,
        seed=seed,
    )
    cset.rebuild_index()
    return cset


def label_communities(cset: CommunitySet, graph: NarrativeGraph) -> CommunitySet:
    """Label each community from its three highest-degree member sub-nodes
    and order the list by size, descending.

    The label joins the primary (top TF-IDF) word of each selected sub-node;
    degree ties prefer the higher NER score, then the lexicographically
    smaller node id. Communities smaller than three use all members.
    """
    wdeg = graph.weighted_degree()
    labeled = []
    for com in cset.communities:
        members = sorted(
            com.members,
            key=lambda nid: (
                -wdeg.get(nid, 0.0),
                -(graph.nodes[nid].ner_score if nid in graph.nodes else 0.0),
                nid,
            ),
        )
        parts = []
        for nid in members[:3]:
            sn = graph.nodes.get(nid)
            parts.append(sn.label[0] if sn and sn.label else nid)
        labeled.append(replace(com, label=", ".join(parts)))
    labeled.sort(key=lambda c: (-c.size, c.id))
    out = CommunitySet(
        communities=labeled,
        runs=cset.runs,
        tau_core=cset.tau_core,
        tau_relax=cset.tau_relax,
        seed=cset.seed,
    )
    out.rebuild_index()
    return out


def community_vocabulary(
    com: Community, graph: NarrativeGraph, mode: str = "labels"
) -> list[str]:
    """Word set representing a community, for coverage and agreement checks.

    ``labels`` takes the union of member sub-node label words (the compact
    vocabulary used for matching against other corpora); ``phrases`` takes
    every member-phrase token.
    """
    words: set[str] = set()
    for nid in com.members:
        sn = graph.nodes.get(nid)
        if sn is None:
            continue
        if mode == "labels":
            words.update(sn.label)
        elif mode == "phrases":
            for phrase in sn.member_phrases:
                words.update(phrase.split())
        else:
            raise ValueError(f"unknown mode {mode!r}")
    return sorted(words)


def communities_to_json(cset: CommunitySet) -> dict:
    return {
        "parameters": {
            "runs": cset.runs,
            "tau_core": cset.tau_core,
            "tau_relax": cset.tau_relax,
            "seed": cset.seed,
        },
        "communities": [
            {
                "id": com.id,
                "label": com.label,
                "size": com.size,
                "core": sorted(com.core),
                "peripheral": sorted(com.peripheral),
            }
            for com in cset.communities
        ],
    }
