"""Generative narrative model for planted-truth pipeline validation.

A model holds k contexts over n actants and r relationship types. Every
context is a directed actant network whose edges carry a distribution over
the relationship types; a post picks a context, draws edges from its network
and emits one relationship tuple per edge. Actant embedding centers are
placed at a controlled mutual distance so clustering difficulty is tunable,
and the emitted files use exactly the formats the ingest loaders consume.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .ingest import (
    Corpus,
    EmbeddingTable,
    RelationTuple,
    SeedEntityList,
    build_corpus,
)

logger = logging.getLogger(__name__)

NOISE_TOKENS = ("shiny", "ancient", "hidden", "secret", "giant", "silent", "rapid", "northern")


@dataclass(frozen=True)
class ContextEdge:
    arg1: str
    arg2: str
    rel_probs: tuple[float, ...]


@dataclass(frozen=True)
class Context:
    id: int
    actants: tuple[str, ...]
    edges: tuple[ContextEdge, ...]


@dataclass
class GenerativeModel:
    contexts: list[Context]
    relationships: tuple[str, ...]
    prior: np.ndarray
    centers: dict[str, np.ndarray]
    sigma: float
    dimension: int
    seed: int

    @property
    def actants(self) -> list[str]:
        seen: dict[str, None] = {}
        for ctx in self.contexts:
            for a in ctx.actants:
                seen.setdefault(a)
        return list(seen)


@dataclass
class SampleTruth:
    """Ground truth emitted next to a sampled corpus."""

    post_contexts: list[int]
    actant_labels: dict[str, int]


def make_model(
    k: int,
    n: int,
    r: int,
    separation: float = 6.0,
    seed: int = 0,
    overlap: float = 0.0,
    extra_edge_prob: float = 0.3,
    sigma: float = 1.0,
    prior: list[float] | None = None,
) -> GenerativeModel:
    """Build a k-context, n-actant, r-relationship model.

    Actants are split into contiguous context blocks; ``overlap`` > 0
    additionally shares that fraction of each block with the next context
    (cyclically). Embedding centers sit on scaled coordinate axes so every
    pair is exactly ``separation * sigma`` apart; separation 0 collapses all
    centers onto the origin. Each context's actants are wired in a cycle
    (keeping the context connected) plus random extra edges, and every edge
    gets its own relationship distribution.
    """
    if k < 1 or n < 1 or r < 1:
        raise ValueError("k, n and r must all be >= 1")
    if n < k:
        raise ValueError(f"cannot split {n} actants into {k} non-empty contexts")
    if separation < 0:
        raise ValueError(f"separation must be >= 0, got {separation}")
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if prior is None:
        prior_arr = np.full(k, 1.0 / k)
    else:
        prior_arr = np.asarray(prior, dtype=np.float64)
        if prior_arr.shape != (k,) or abs(prior_arr.sum() - 1.0) > 1e-9 or np.any(prior_arr < 0):
            raise ValueError("prior must be k non-negative numbers summing to 1")

    rng = np.random.default_rng(seed)
    actants = [f"actant{i:02d}" for i in range(n)]
    base = n // k
    remainder = n % k
    blocks: list[list[str]] = []
    cursor = 0
    for i in range(k):
        size = base + (1 if i < remainder else 0)
        blocks.append(actants[cursor : cursor + size])
        cursor += size
    if overlap > 0 and k > 1:
        shared = [blk[: max(1, int(np.ceil(overlap * len(blk))))] for blk in blocks]
        blocks = [blocks[i] + shared[(i + 1) % k] for i in range(k)]

    relationships = tuple(f"rel{j}" for j in range(r))
    contexts = []
    for cid, members in enumerate(blocks):
        edges: list[ContextEdge] = []
        if len(members) >= 2:
            order = list(members)
            rng.shuffle(order)
            cycle = list(zip(order, order[1:] + order[:1]))
            if len(members) == 2:
                cycle = cycle[:1]
            pairs = set(cycle)
            for a in members:
                for b in members:
                    if a != b and (a, b) not in pairs and rng.random() < extra_edge_prob:
                        pairs.add((a, b))
            for a, b in sorted(pairs):
                probs = rng.dirichlet(np.ones(r))
                edges.append(ContextEdge(arg1=a, arg2=b, rel_probs=tuple(probs)))
        contexts.append(Context(id=cid, actants=tuple(members), edges=tuple(edges)))

    scale = separation * sigma / np.sqrt(2.0)
    centers = {}
    for i, a in enumerate(actants):
        vec = np.zeros(n)
        vec[i] = scale
        centers[a] = vec
    return GenerativeModel(
        contexts=contexts,
        relationships=relationships,
        prior=prior_arr,
        centers=centers,
        sigma=sigma,
        dimension=n,
        seed=seed,
    )


def planted_labels(model: GenerativeModel) -> dict[str, int]:
    """Ground-truth context per actant: the highest-prior containing context,
    ties going to the lowest context id."""
    labels: dict[str, int] = {}
    for actant in model.actants:
        containing = [ctx.id for ctx in model.contexts if actant in ctx.actants]
        labels[actant] = max(containing, key=lambda cid: (model.prior[cid], -cid))
    return labels


def _phrase(actant: str, rng: np.random.Generator, prefix_prob: float) -> str:
    if rng.random() < prefix_prob:
        return f"{NOISE_TOKENS[int(rng.integers(len(NOISE_TOKENS)))]} {actant}"
    return actant


def _emit_post(
    model: GenerativeModel,
    ctx: Context,
    doc_id: str,
    source: str,
    post_date: date | None,
    tuples_per_post: int,
    rng: np.random.Generator,
    prefix_prob: float,
) -> list[RelationTuple]:
    out = []
    for _ in range(tuples_per_post):
        edge = ctx.edges[int(rng.integers(len(ctx.edges)))]
        rel = model.relationships[int(rng.choice(len(model.relationships), p=edge.rel_probs))]
        arg1 = _phrase(edge.arg1, rng, prefix_prob)
        arg2 = _phrase(edge.arg2, rng, prefix_prob)
        out.append(
            RelationTuple(
                doc_id=doc_id,
                source=source,
                date=post_date,
                arg1_text=arg1,
                arg1_head=edge.arg1,
                rel_text=rel,
                rel_head=rel,
                arg2_text=arg2,
                arg2_head=edge.arg2,
            )
        )
    return out


def sample_corpus(
    model: GenerativeModel,
    num_posts: int,
    tuples_per_post: int = 3,
    seed: int = 0,
    source: str = "social",
    start: date = date(2020, 3, 1),
    num_days: int = 14,
    undated_fraction: float = 0.0,
    prefix_prob: float = 0.6,
) -> tuple[Corpus, SampleTruth]:
    """Sample posts from the model, bit-for-bit reproducible per seed.

    Each post picks a context from the prior, then draws ``tuples_per_post``
    edges from that context's network and one relationship per edge from the
    edge's distribution. Contexts without edges are resampled with a
    warning. ``undated_fraction`` of social posts carry no date.
    """
    if num_posts < 0 or tuples_per_post < 1:
        raise ValueError("num_posts must be >= 0 and tuples_per_post >= 1")
    if source == "news" and undated_fraction > 0:
        raise ValueError("news posts always carry a date")
    if not any(ctx.edges for ctx in model.contexts):
        raise ValueError("no context has any edge to sample")
    rng = np.random.default_rng(seed)
    k = len(model.contexts)
    tuples: list[RelationTuple] = []
    post_contexts: list[int] = []
    warned = False
    for i in range(num_posts):
        cid = int(rng.choice(k, p=model.prior))
        while not model.contexts[cid].edges:
            if not warned:
                logger.warning("context %d has no edges; resampling", cid)
                warned = True
            cid = int(rng.choice(k, p=model.prior))
        post_date: date | None = start + timedelta(days=int(rng.integers(num_days)))
        if undated_fraction > 0 and rng.random() < undated_fraction:
            post_date = None
        tuples.extend(
            _emit_post(
                model,
                model.contexts[cid],
                doc_id=f"{source}-{i:06d}",
                source=source,
                post_date=post_date,
                tuples_per_post=tuples_per_post,
                rng=rng,
                prefix_prob=prefix_prob,
            )
        )
        post_contexts.append(cid)
    corpus = build_corpus(tuples)
    return corpus, SampleTruth(post_contexts=post_contexts, actant_labels=planted_labels(model))


def sample_coupled_streams(
    model: GenerativeModel,
    posts_per_day: int,
    num_days: int,
    lag: int = 0,
    seed: int = 0,
    tuples_per_post: int = 3,
    start: date = date(2020, 3, 1),
    boost: float = 8.0,
    prefix_prob: float = 0.6,
) -> tuple[Corpus, Corpus, SampleTruth]:
    """Generate social and news streams sharing a time-varying context
    schedule, with the news stream trailing the social stream by ``lag`` days.

    Each context gets a contiguous block of days in which its prior is
    boosted, so per-context activity forms a bump the news stream reproduces
    ``lag`` days later (the schedule clamps at the span edges).
    """
    if num_days < 1 or posts_per_day < 1:
        raise ValueError("num_days and posts_per_day must be >= 1")
    if lag < 0 or lag >= num_days:
        raise ValueError(f"lag must be in [0, num_days), got {lag}")
    if not any(ctx.edges for ctx in model.contexts):
        raise ValueError("no context has any edge to sample")
    k = len(model.contexts)
    block = max(1, num_days // k)

    def day_prior(day: int) -> np.ndarray:
        active = min(day // block, k - 1)
        boosted = model.prior.copy()
        boosted[active] += boost
        return boosted / boosted.sum()

    def sample_stream(source: str, stream_seed: int, day_shift: int) -> tuple[list[RelationTuple], list[int]]:
        rng = np.random.default_rng(stream_seed)
        tuples: list[RelationTuple] = []
        contexts: list[int] = []
        idx = 0
        for day in range(num_days):
            sched_day = min(max(day - day_shift, 0), num_days - 1)
            prior = day_prior(sched_day)
            for _ in range(posts_per_day):
                cid = int(rng.choice(k, p=prior))
                while not model.contexts[cid].edges:
                    cid = int(rng.choice(k, p=prior))
                tuples.extend(
                    _emit_post(
                        model,
                        model.contexts[cid],
                        doc_id=f"{source}-{idx:06d}",
                        source=source,
                        post_date=start + timedelta(days=day),
                        tuples_per_post=tuples_per_post,
                        rng=rng,
                        prefix_prob=prefix_prob,
                    )
                )
                contexts.append(cid)
                idx += 1
        return tuples, contexts

    rng = np.random.default_rng(seed)
    social_seed = int(rng.integers(2**32))
    news_seed = int(rng.integers(2**32))
    social_tuples, social_contexts = sample_stream("social", social_seed, 0)
    news_tuples, _ = sample_stream("news", news_seed, lag)
    truth = SampleTruth(post_contexts=social_contexts, actant_labels=planted_labels(model))
    return build_corpus(social_tuples), build_corpus(news_tuples), truth


def synth_embeddings(
    model: GenerativeModel, phrases: set[str], seed: int = 0
) -> EmbeddingTable:
    """One Gaussian draw around the phrase's actant center per distinct
    phrase (the actant is the phrase's last token)."""
    rng = np.random.default_rng(seed)
    entries: dict[str, np.ndarray] = {}
    for phrase in sorted(phrases):
        actant = phrase.split()[-1]
        center = model.centers.get(actant)
        if center is None:
            center = np.zeros(model.dimension)
        entries[phrase] = center + model.sigma * rng.standard_normal(model.dimension)
    return EmbeddingTable(dimension=model.dimension, entries=entries)


def seed_entities_from_corpus(model: GenerativeModel, corpus: Corpus) -> SeedEntityList:
    """Actant names with their corpus frequencies (absent actants omitted)."""
    entities = {}
    for actant in model.actants:
        count = corpus.vocabulary.get(actant, 0)
        if count >= 1:
            entities[actant] = count
    return SeedEntityList(entities=entities)


def context_vocabulary(model: GenerativeModel, context_id: int) -> list[str]:
    for ctx in model.contexts:
        if ctx.id == context_id:
            return sorted(ctx.actants)
    raise KeyError(f"no context {context_id}")


def write_truth_json(truth: SampleTruth, path: str | Path) -> None:
    payload = {
        "actant_labels": dict(sorted(truth.actant_labels.items())),
        "post_contexts": truth.post_contexts,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")


def load_truth_json(path: str | Path) -> SampleTruth:
    payload = json.loads(Path(path).read_text("utf-8"))
    return SampleTruth(
        post_contexts=list(payload.get("post_contexts", [])),
        actant_labels={str(k): int(v) for k, v in payload["actant_labels"].items()},
    )
