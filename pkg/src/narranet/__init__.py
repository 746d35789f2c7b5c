"""Narrative-framework network estimation from extracted relationship tuples.

The package turns (arg1, rel, arg2) tuples extracted from social-media posts
and news reports into a weighted sub-node graph, detects overlapping actant
communities, and tracks how those communities surface in the news stream
over time through coverage scores, co-occurrence networks and
clustering-agreement metrics.
"""

__version__ = "0.1.0"

from .ingest import (  # noqa: F401
    AliasMap,
    Corpus,
    EmbeddingTable,
    RelationTuple,
    SeedEntityList,
    build_vocabulary,
    load_aliases,
    load_embeddings,
    load_seed_entities,
    load_stop_words,
    load_tuples,
)
