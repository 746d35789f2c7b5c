"""Aggregation of relationship tuples into the weighted sub-node graph.

Tuples are directed (arg1 -> arg2) and edges carry the multiset of
relationship phrases observed between their endpoints; the edge weight is
the size of that multiset. Community detection consumes the undirected
weight-summed projection. Phrases assigned to several groups fan a tuple out
to every sub-node pair.
"""

from __future__ import annotations

import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
import numpy as np

from .clustering import Subnode, kmeans
from .ingest import Corpus, EmbeddingTable

logger = logging.getLogger(__name__)


@dataclass
class Edge:
    """Directed sub-node edge with its relationship-phrase multiset."""

    weight: int = 0
    relations: Counter = field(default_factory=Counter)
    rel_clusters: list[list[str]] | None = None

    def top_relations(self, n: int = 3) -> list[str]:
        ranked = sorted(self.relations.items(), key=lambda kv: (-kv[1], kv[0]))
        return [phrase for phrase, _ in ranked[:n]]


@dataclass
class NarrativeGraph:
    """Weighted, relationship-labeled graph over sub-nodes."""

    nodes: dict[str, Subnode]
    edges: dict[tuple[str, str], Edge]
    directed: bool = True
    dropped_count: int = 0

    def total_weight(self) -> int:
        return sum(e.weight for e in self.edges.values())

    def undirected_adjacency(self) -> dict[str, dict[str, float]]:
        """Weight-summed undirected projection (self-loops preserved)."""
        adj: dict[str, dict[str, float]] = {nid: {} for nid in self.nodes}
        for (src, dst), edge in self.edges.items():
            adj[src][dst] = adj[src].get(dst, 0.0) + edge.weight
            if src != dst:
                adj[dst][src] = adj[dst].get(src, 0.0) + edge.weight
        return adj

    def weighted_degree(self) -> dict[str, float]:
        adj = self.undirected_adjacency()
        return {
            nid: sum(w for nbr, w in nbrs.items()) + nbrs.get(nid, 0.0)
            for nid, nbrs in adj.items()
        }


def build_graph(
    corpus: Corpus,
    phrase_to_subnodes: dict[str, list[str]],
    subnodes: list[Subnode],
    allow_self_loops: bool = False,
) -> NarrativeGraph:
    """Aggregate tuples into sub-node edges.

    Each tuple increments one edge per (arg1 sub-node, arg2 sub-node) pair
    and appends its relationship phrase to the edge multiset. Tuples whose
    argument phrase maps to no sub-node are counted as dropped. Only
    sub-nodes incident to at least one edge become graph nodes.
    """
    by_id = {sn.id: sn for sn in subnodes}
    edges: dict[tuple[str, str], Edge] = {}
    dropped = 0
    for t in corpus.tuples:
        sources = phrase_to_subnodes.get(t.arg1_text, [])
        targets = phrase_to_subnodes.get(t.arg2_text, [])
        if not sources or not targets:
            dropped += 1
            continue
        for s in sources:
            for o in targets:
                if s == o and not allow_self_loops:
                    continue
                edge = edges.get((s, o))
                if edge is None:
                    edge = edges[(s, o)] = Edge()
                edge.weight += 1
                edge.relations[t.rel_text] += 1
    if dropped:
        logger.warning("%d tuples mapped to no sub-node and were dropped", dropped)
    nodes = {nid: by_id[nid] for pair in edges for nid in pair}
    return NarrativeGraph(nodes=nodes, edges=edges, dropped_count=dropped)


def threshold_edges(graph: NarrativeGraph, min_weight: int = 2) -> NarrativeGraph:
    """Drop edges lighter than ``min_weight`` and any node left isolated.

    Returns a new graph; the input is untouched. Idempotent at a fixed
    threshold.
    """
    if min_weight < 1:
        raise ValueError(f"min_weight must be >= 1, got {min_weight}")
    kept = {
        pair: Edge(weight=e.weight, relations=Counter(e.relations), rel_clusters=e.rel_clusters)
        for pair, e in graph.edges.items()
        if e.weight >= min_weight
    }
    nodes = {nid: graph.nodes[nid] for pair in kept for nid in pair}
    return NarrativeGraph(
        nodes=nodes,
        edges=kept,
        directed=graph.directed,
        dropped_count=graph.dropped_count,
    )


def cluster_edge_relationships(
    edge: Edge, emb: EmbeddingTable, k: int, seed: int = 0
) -> list[list[str]]:
    """Partition an edge's distinct relationship phrases into k semantic
    groups by their embeddings; phrases without any vector form their own
    trailing group. k is clamped to the number of embeddable phrases."""
    phrases = sorted(edge.relations)
    vectors = {p: emb.phrase_vector(p) for p in phrases}
    known = [p for p in phrases if vectors[p] is not None]
    unknown = [p for p in phrases if vectors[p] is None]
    if not known:
        edge.rel_clusters = [unknown] if unknown else []
        return edge.rel_clusters
    k = max(1, min(k, len(known)))
    points = np.vstack([vectors[p] for p in known])
    labels, _, _, _ = kmeans(points, k, seed=seed)
    clusters: dict[int, list[str]] = defaultdict(list)
    for phrase, lab in zip(known, labels):
        clusters[int(lab)].append(phrase)
    parts = [sorted(clusters[c]) for c in sorted(clusters)]
    if unknown:
        parts.append(sorted(unknown))
    edge.rel_clusters = parts
    return parts


def to_networkx(
    graph: NarrativeGraph,
    communities: dict[str, list[int]] | None = None,
    directed: bool = False,
) -> "nx.Graph":
    """Export with label/group/ner-score node attributes and weight plus
    top-3 relationship labels on edges."""
    g = nx.DiGraph() if directed else nx.Graph()
    for nid in sorted(graph.nodes):
        sn = graph.nodes[nid]
        attrs = {
            "label": ", ".join(sn.label),
            "group": sn.group_id,
            "ner_score": float(sn.ner_score),
        }
        if communities is not None:
            attrs["communities"] = ",".join(str(c) for c in communities.get(nid, []))
        g.add_node(nid, **attrs)
    if directed:
        for (src, dst) in sorted(graph.edges):
            edge = graph.edges[(src, dst)]
            g.add_edge(src, dst, weight=edge.weight, relations="; ".join(edge.top_relations()))
    else:
        merged: dict[tuple[str, str], Edge] = {}
        for (src, dst), edge in graph.edges.items():
            key = (src, dst) if src <= dst else (dst, src)
            agg = merged.get(key)
            if agg is None:
                agg = merged[key] = Edge()
            agg.weight += edge.weight
            agg.relations.update(edge.relations)
        for key in sorted(merged):
            edge = merged[key]
            g.add_edge(*key, weight=edge.weight, relations="; ".join(edge.top_relations()))
    return g


def write_graphml(
    graph: NarrativeGraph,
    path: str | Path,
    communities: dict[str, list[int]] | None = None,
    directed: bool = False,
) -> None:
    nx.write_graphml(to_networkx(graph, communities, directed), str(path))


def graph_to_json(graph: NarrativeGraph) -> dict:
    """Full dump including relationship multisets and cluster metadata."""
    return {
        "directed": graph.directed,
        "dropped_count": graph.dropped_count,
        "nodes": [
            {
                "id": nid,
                "group": graph.nodes[nid].group_id,
                "label": list(graph.nodes[nid].label),
                "ner_score": graph.nodes[nid].ner_score,
                "members": list(graph.nodes[nid].member_phrases),
            }
            for nid in sorted(graph.nodes)
        ],
        "edges": [
            {
                "src": src,
                "dst": dst,
                "weight": graph.edges[(src, dst)].weight,
                "relations": dict(sorted(graph.edges[(src, dst)].relations.items())),
                "rel_clusters": graph.edges[(src, dst)].rel_clusters,
            }
            for src, dst in sorted(graph.edges)
        ],
    }


def write_graph_json(graph: NarrativeGraph, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(graph_to_json(graph), indent=2, sort_keys=True) + "\n", "utf-8"
    )
