from __future__ import annotations

import random

import networkx as nx
import pytest

from narranet.grouping import (
    RESIDUAL_GROUP_ID,
    assign_phrases,
    form_groups,
    seed_cooccurrence,
)
from narranet.ingest import SeedEntityList, build_corpus
from conftest import corpus_of, make_tuple


def seeds_of(*entities):
    return SeedEntityList(entities={e: 1 for e in entities})


class TestSeedCooccurrence:
    def test_repeated_phrase_counts_occurrences(self):
        corpus = corpus_of(
            ("corona virus", "kills", "people"),
            ("corona virus", "spreads", "fast illness"),
            ("corona virus", "worries", "doctors"),
        )
        counts = seed_cooccurrence(corpus, seeds_of("corona", "virus"))
        assert counts == {("corona", "virus"): 3}

    def test_disjoint_seeds_empty_map(self):
        corpus = corpus_of(("corona virus", "hits", "the city"))
        assert seed_cooccurrence(corpus, seeds_of("wuhan", "lab")) == {}

    def test_wuhan_lab_single_phrase(self):
        corpus = corpus_of(("wuhan lab leak", "caused", "panic"))
        counts = seed_cooccurrence(corpus, seeds_of("wuhan", "lab"))
        assert counts == {("lab", "wuhan"): 1}

    def test_both_arg_slots_counted(self):
        corpus = corpus_of(("corona virus", "is", "corona virus"))
        assert seed_cooccurrence(corpus, seeds_of("corona", "virus")) == {
            ("corona", "virus"): 2
        }

    def test_empty_seed_list_rejected(self):
        with pytest.raises(ValueError):
            seed_cooccurrence(corpus_of(("a", "r", "b")), SeedEntityList(entities={}))


class TestFormGroups:
    def test_chained_components_merge(self):
        seeds = seeds_of("corona", "virus", "viruses")
        counts = {("corona", "virus"): 3, ("virus", "viruses"): 2}
        groups = form_groups(seeds, counts, min_cooc=2)
        assert len(groups) == 1
        assert groups[0].seeds == frozenset({"corona", "virus", "viruses"})

    def test_high_threshold_all_singletons(self):
        seeds = seeds_of("a", "b", "c")
        counts = {("a", "b"): 5, ("b", "c"): 9}
        groups = form_groups(seeds, counts, min_cooc=10)
        assert [set(g.seeds) for g in groups] == [{"a"}, {"b"}, {"c"}]

    def test_two_components_stable_ids(self):
        seeds = seeds_of("gates", "bill", "wuhan", "lab")
        counts = {("bill", "gates"): 4, ("lab", "wuhan"): 4}
        groups = form_groups(seeds, counts, min_cooc=3)
        assert groups[0].id == 0 and groups[0].seeds == frozenset({"bill", "gates"})
        assert groups[1].id == 1 and groups[1].seeds == frozenset({"lab", "wuhan"})

    def test_invariant_under_pair_ordering(self):
        seeds = seeds_of(*"abcdef")
        pairs = {("a", "b"): 3, ("b", "c"): 3, ("d", "e"): 3}
        shuffled = dict(reversed(list(pairs.items())))
        assert form_groups(seeds, pairs, 2) == form_groups(seeds, shuffled, 2)

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_networkx_components(self, seed):
        rnd = random.Random(seed)
        names = [f"s{i}" for i in range(12)]
        seeds = seeds_of(*names)
        counts = {}
        for _ in range(20):
            a, b = rnd.sample(names, 2)
            counts[tuple(sorted((a, b)))] = rnd.randint(1, 6)
        min_cooc = rnd.randint(1, 6)
        g = nx.Graph()
        g.add_nodes_from(names)
        g.add_edges_from(pair for pair, c in counts.items() if c >= min_cooc)
        expected = sorted(
            (frozenset(comp) for comp in nx.connected_components(g)), key=min
        )
        got = [g2.seeds for g2 in form_groups(seeds, counts, min_cooc)]
        assert got == expected

    @pytest.mark.parametrize("seed", range(4))
    def test_raising_threshold_refines(self, seed):
        rnd = random.Random(100 + seed)
        names = [f"s{i}" for i in range(8)]
        seeds = seeds_of(*names)
        counts = {}
        for _ in range(12):
            a, b = rnd.sample(names, 2)
            counts[tuple(sorted((a, b)))] = rnd.randint(1, 5)
        coarse = form_groups(seeds, counts, 2)
        fine = form_groups(seeds, counts, 4)
        coarse_of = {s: g.id for g in coarse for s in g.seeds}
        for g in fine:
            # every fine group sits inside exactly one coarse group
            assert len({coarse_of[s] for s in g.seeds}) == 1

    def test_min_cooc_validation(self):
        with pytest.raises(ValueError):
            form_groups(seeds_of("a"), {}, 0)


class TestAssignPhrases:
    def test_multi_membership(self):
        corpus = corpus_of(("bill gates foundation", "funds", "vaccines"))
        seeds = seeds_of("gate", "gates", "bill", "foundation")
        groups = form_groups(
            seeds, {("bill", "gates"): 5, ("gate", "gates"): 5}, min_cooc=3
        )
        assignment, rebuilt = assign_phrases(corpus, groups)
        gids = {g.seeds: g.id for g in groups}
        a = gids[frozenset({"gate", "gates", "bill"})]
        b = gids[frozenset({"foundation"})]
        assert assignment["bill gates foundation"] == frozenset({a, b})

    def test_unseeded_phrase_goes_residual(self):
        corpus = corpus_of(("strange thing", "does", "bill gates"))
        groups = form_groups(seeds_of("bill", "gates"), {("bill", "gates"): 9}, 3)
        assignment, rebuilt = assign_phrases(corpus, groups)
        assert assignment["strange thing"] == frozenset({RESIDUAL_GROUP_ID})
        residual = [g for g in rebuilt if g.id == RESIDUAL_GROUP_ID]
        assert len(residual) == 1
        assert residual[0].member_phrases == frozenset({"strange thing"})

    def test_group_frequency_sums_member_occurrences(self):
        corpus = corpus_of(
            ("corona virus", "kills", "people"),
            ("corona virus", "is", "a virus"),
            ("deadly virus", "is", "corona"),
        )
        seeds = seeds_of("corona", "virus")
        groups = form_groups(seeds, {("corona", "virus"): 3}, 3)
        _, rebuilt = assign_phrases(corpus, groups)
        g = next(g for g in rebuilt if g.id == 0)
        # occurrences: "corona virus" x2, "a virus" x1, "deadly virus" x1, "corona" x1
        assert g.frequency == 5
        assert g.member_phrases == frozenset(
            {"corona virus", "a virus", "deadly virus", "corona"}
        )

    def test_union_of_members_covers_all_phrases(self):
        rnd = random.Random(5)
        words = ["corona", "virus", "lab", "wuhan", "people", "idea"]
        tuples = [
            make_tuple(
                " ".join(rnd.sample(words, rnd.randint(1, 3))),
                "r",
                " ".join(rnd.sample(words, rnd.randint(1, 3))),
            )
            for _ in range(30)
        ]
        corpus = build_corpus(tuples)
        seeds = seeds_of("corona", "wuhan")
        groups = form_groups(seeds, seed_cooccurrence(corpus, seeds), 2)
        _, rebuilt = assign_phrases(corpus, groups)
        union = set()
        for g in rebuilt:
            union |= g.member_phrases
            if g.id != RESIDUAL_GROUP_ID:
                for phrase in g.member_phrases:
                    assert set(phrase.split()) & g.seeds
        assert union == corpus.phrases()
