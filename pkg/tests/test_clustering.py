"""tDFS and single-linkage clustering, threshold tuning, subchain merging."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftlink.clustering import (
    ClusterParams,
    hc_single_cluster,
    merge_chains,
    tdfs_cluster,
    tdfs_cluster_detailed,
    threshold_grid,
    tune_threshold,
)
from shiftlink.corpus import Chain, Corpus, build_windows
from shiftlink.errors import ValidationError
from shiftlink.synthgen import SynthSpec, generate, oracle_scores

from conftest import HOUR, rec


def record_map(*recs):
    return {r.record_id: r for r in recs}


def members(chains):
    return sorted(tuple(c.record_ids) for c in chains)


PARAMS = ClusterParams(score_threshold=0.5, max_gap_hours=24.0)


class TestParams:
    def test_threshold_range(self):
        for bad in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValidationError):
                ClusterParams(score_threshold=bad, max_gap_hours=1.0)

    def test_gap_positive(self):
        with pytest.raises(ValidationError):
            ClusterParams(score_threshold=0.5, max_gap_hours=0.0)

    def test_algorithm_name(self):
        with pytest.raises(ValidationError):
            ClusterParams(score_threshold=0.5, max_gap_hours=1.0, algorithm="kmeans")


class TestTdfs:
    def test_dfs_hand_trace(self):
        # C reached via DFS from B despite the low direct A-C score
        recs = record_map(rec("A", 0.0), rec("B", 1.0), rec("C", 2.0))
        scores = {("A", "B"): 0.9, ("B", "C"): 0.8, ("A", "C"): 0.1}
        chains = tdfs_cluster(scores, recs, ["A", "B", "C"], PARAMS)
        assert members(chains) == [("A", "B", "C")]

    def test_gap_splits_chain(self):
        # C sits beyond the max gap, so its pairs never enter the score map
        recs = record_map(rec("A", 0.0), rec("B", 1.0), rec("C", 50.0))
        chains = tdfs_cluster({("A", "B"): 0.9}, recs, ["A", "B", "C"], PARAMS)
        assert members(chains) == [("A", "B"), ("C",)]

    def test_links_recorded(self):
        recs = record_map(rec("A", 0.0), rec("B", 1.0), rec("C", 2.0))
        scores = {("A", "B"): 0.9, ("B", "C"): 0.8}
        result = tdfs_cluster_detailed(scores, recs, ["A", "B", "C"], PARAMS)
        [chain] = result.chains
        assert result.link_scores[chain.chain_id] == [("A", "B", 0.9), ("B", "C", 0.8)]

    def test_best_score_first(self):
        # From A both B and C qualify; B wins on score, then C attaches to B
        recs = record_map(rec("A", 0.0), rec("B", 1.0), rec("C", 2.0))
        scores = {("A", "B"): 0.9, ("A", "C"): 0.7, ("B", "C"): 0.6}
        result = tdfs_cluster_detailed(scores, recs, ["A", "B", "C"], PARAMS)
        [chain] = result.chains
        assert result.link_scores[chain.chain_id][0] == ("A", "B", 0.9)
        assert result.link_scores[chain.chain_id][1] == ("B", "C", 0.6)

    def test_backtrack_to_earlier_frontier(self):
        # D only reachable from A; DFS finishes the B branch then backtracks
        recs = record_map(rec("A", 0.0), rec("B", 1.0), rec("C", 2.0), rec("D", 3.0))
        scores = {("A", "B"): 0.9, ("B", "C"): 0.8, ("A", "D"): 0.7}
        chains = tdfs_cluster(scores, recs, ["A", "B", "C", "D"], PARAMS)
        assert members(chains) == [("A", "B", "C", "D")]

    def test_assigned_never_revisited(self):
        recs = record_map(rec("A", 0.0), rec("B", 1.0), rec("C", 2.0))
        scores = {("A", "B"): 0.9, ("A", "C"): 0.8, ("B", "C"): 0.99}
        chains = tdfs_cluster(scores, recs, ["A", "B", "C"], PARAMS)
        # single chain; C joins once even though two strong in-links exist
        assert members(chains) == [("A", "B", "C")]

    def test_below_threshold_ignored(self):
        recs = record_map(rec("A", 0.0), rec("B", 1.0))
        chains = tdfs_cluster({("A", "B"): 0.4}, recs, ["A", "B"], PARAMS)
        assert members(chains) == [("A",), ("B",)]

    def test_reverse_pair_rejected(self):
        recs = record_map(rec("A", 0.0), rec("B", 1.0))
        with pytest.raises(ValidationError):
            tdfs_cluster({("B", "A"): 0.9}, recs, ["A", "B"], PARAMS)

    def test_pair_over_gap_rejected(self):
        recs = record_map(rec("A", 0.0), rec("B", 100.0))
        with pytest.raises(ValidationError):
            tdfs_cluster({("A", "B"): 0.9}, recs, ["A", "B"], PARAMS)

    def test_equal_timestamps_ordered_by_id(self):
        recs = record_map(rec("A", 1.0), rec("B", 1.0))
        chains = tdfs_cluster({("A", "B"): 0.9}, recs, ["B", "A"], PARAMS)
        assert members(chains) == [("A", "B")]

    def test_oracle_scores_reproduce_gold(self):
        corpus = Corpus(
            [rec("A", 0.0), rec("B", 2.0), rec("C", 4.0), rec("D", 10.0), rec("E", 11.0)],
            [Chain("c1", ("A", "B", "C")), Chain("c2", ("D", "E"))],
        )
        scores = oracle_scores(corpus)
        chains = tdfs_cluster(scores, corpus.records, list(corpus.records), PARAMS)
        assert members(chains) == [("A", "B", "C"), ("D", "E")]


class TestHcSingle:
    def test_transitive_component(self):
        recs = record_map(rec("A", 0.0), rec("B", 1.0), rec("C", 2.0))
        scores = {("A", "B"): 0.9, ("B", "C"): 0.8, ("A", "C"): 0.1}
        chains = hc_single_cluster(scores, recs, ["A", "B", "C"], PARAMS)
        assert members(chains) == [("A", "B", "C")]

    def test_no_edges_all_singletons(self):
        recs = record_map(rec("A", 0.0), rec("B", 1.0))
        chains = hc_single_cluster({("A", "B"): 0.2}, recs, ["A", "B"], PARAMS)
        assert members(chains) == [("A",), ("B",)]

    def test_members_time_ordered(self):
        recs = record_map(rec("A", 5.0), rec("B", 1.0), rec("C", 3.0))
        scores = {("B", "C"): 0.9, ("C", "A"): 0.9}
        [chain] = hc_single_cluster(scores, recs, ["A", "B", "C"], PARAMS)
        assert chain.record_ids == ("B", "C", "A")

    def brute_components(self, edges, nodes):
        comps = []
        remaining = set(nodes)
        while remaining:
            seed = remaining.pop()
            comp = {seed}
            changed = True
            while changed:
                changed = False
                for a, b in edges:
                    if a in comp and b in remaining:
                        comp.add(b)
                        remaining.discard(b)
                        changed = True
                    if b in comp and a in remaining:
                        comp.add(a)
                        remaining.discard(a)
                        changed = True
            comps.append(frozenset(comp))
        return sorted(comps, key=sorted)

    def test_matches_brute_force_components(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n = int(rng.integers(3, 12))
            recs = record_map(*[rec(f"r{i:02d}", float(i)) for i in range(n)])
            ids = sorted(recs)
            scores = {}
            for a, b in itertools.combinations(ids, 2):
                scores[(a, b)] = float(rng.random())
            chains = hc_single_cluster(scores, recs, ids, PARAMS)
            got = sorted(frozenset(c.record_ids) for c in chains)
            edges = [p for p, s in scores.items() if s >= PARAMS.score_threshold]
            assert got == self.brute_components(edges, ids)


class TestThresholdGrid:
    def test_grid_shape(self):
        full, clipped = threshold_grid(0.5)
        assert len(full) == 16  # tau0 plus 15 scaled candidates
        deltas = sorted(round(t / 0.5 - 1.0, 10) for t in full)
        assert deltas == [
            -0.9, -0.8, -0.7, -0.6, -0.5, -0.4, -0.3,
            0.0, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0,
        ]
        assert all(0.0 < t < 1.0 for t in clipped)
        assert 1.0 not in clipped  # 0.5 * 2.0 clipped away

    def test_small_tau_keeps_doubling(self):
        full, clipped = threshold_grid(0.2)
        assert max(clipped) == pytest.approx(0.4)
        assert len(clipped) == 16

    def test_clip_is_sorted_unique(self):
        _, clipped = threshold_grid(0.7)
        assert clipped == sorted(set(clipped))


class TestTuneThreshold:
    def windowed(self, corpus):
        [window] = build_windows(corpus, "T", window_hours=10 ** 6)
        return window

    def test_oracle_ties_resolve_to_smallest(self):
        corpus = Corpus(
            [rec("A", 0.0), rec("B", 1.0), rec("C", 5.0), rec("D", 6.0)],
            [Chain("c1", ("A", "B")), Chain("c2", ("C", "D"))],
        )
        window = self.windowed(corpus)
        scores = oracle_scores(corpus)
        tau = tune_threshold(
            [(window, scores, corpus.gold_chains, 24.0)], corpus.records, 0.5, "tdfs"
        )
        _, clipped = threshold_grid(0.5)
        assert tau == min(clipped)

    def test_picks_separating_threshold(self):
        corpus = Corpus(
            [rec("A", 0.0), rec("B", 1.0), rec("C", 2.0), rec("D", 3.0)],
            [Chain("c1", ("A", "B")), Chain("c2", ("C", "D"))],
        )
        window = self.windowed(corpus)
        # cross-chain noise at 0.45 sits inside the low end of the 0.5 grid
        scores = {("A", "B"): 0.9, ("C", "D"): 0.9, ("B", "C"): 0.45}
        tau = tune_threshold(
            [(window, scores, corpus.gold_chains, 24.0)], corpus.records, 0.5, "tdfs"
        )
        clustered = tdfs_cluster(
            scores, corpus.records, window.record_ids,
            ClusterParams(tau, 24.0),
        )
        assert members(clustered) == [("A", "B"), ("C", "D")]
        assert tau > 0.45

    def test_empty_windows_rejected(self):
        with pytest.raises(ValidationError):
            tune_threshold([], {}, 0.5, "tdfs")

    def test_all_singleton_gold_rejected(self):
        corpus = Corpus([rec("A", 0.0), rec("B", 1.0)])
        window = self.windowed(corpus)
        with pytest.raises(ValidationError):
            tune_threshold([(window, {}, [], 24.0)], corpus.records, 0.5, "tdfs")


class TestMergeChains:
    def recs(self):
        return record_map(rec("A", 0.0), rec("B", 1.0), rec("C", 2.0), rec("D", 3.0))

    def test_shared_node_merge(self):
        merged = merge_chains(
            [Chain("x", ("A", "B")), Chain("y", ("B", "C"))], self.recs()
        )
        assert members(merged) == [("A", "B", "C")]

    def test_disjoint_unchanged(self):
        merged = merge_chains(
            [Chain("x", ("A", "B")), Chain("y", ("C", "D"))], self.recs()
        )
        assert members(merged) == [("A", "B"), ("C", "D")]

    def test_three_window_transitive(self):
        merged = merge_chains(
            [Chain("x", ("A", "B")), Chain("y", ("B", "C")), Chain("z", ("C", "D"))],
            self.recs(),
        )
        assert members(merged) == [("A", "B", "C", "D")]

    def test_idempotent(self):
        once = merge_chains(
            [Chain("x", ("A", "B")), Chain("y", ("B", "C"))], self.recs()
        )
        twice = merge_chains(once, self.recs())
        assert members(once) == members(twice)

    def test_order_independent(self):
        chains = [Chain("x", ("A", "B")), Chain("y", ("B", "C")), Chain("z", ("C", "D"))]
        for perm in itertools.permutations(chains):
            assert members(merge_chains(list(perm), self.recs())) == [("A", "B", "C", "D")]

    def test_members_resorted_by_time(self):
        [merged] = merge_chains(
            [Chain("x", ("C", "D")), Chain("y", ("A", "C"))], self.recs()
        )
        assert merged.record_ids == ("A", "C", "D")


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=10 ** 6),
    tau_pct=st.integers(min_value=1, max_value=99),
    gap=st.floats(min_value=0.5, max_value=48.0),
)
def test_tdfs_invariants_random(seed, tau_pct, gap):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 16))
    recs = record_map(*[rec(f"r{i:02d}", float(rng.integers(0, 96)) / 2.0) for i in range(n)])
    ids = sorted(recs, key=lambda r: (recs[r].timestamp, r))
    scores = {}
    max_gap_s = gap * 3600.0
    for a, b in itertools.combinations(ids, 2):
        if recs[b].timestamp - recs[a].timestamp <= max_gap_s and rng.random() < 0.6:
            scores[(a, b)] = float(rng.random())
    params = ClusterParams(score_threshold=tau_pct / 100.0, max_gap_hours=gap)
    result = tdfs_cluster_detailed(scores, recs, ids, params)

    # partition: every record in exactly one chain
    seen = [m for c in result.chains for m in c.record_ids]
    assert sorted(seen) == sorted(ids)

    for chain in result.chains:
        ts = [recs[m].timestamp for m in chain.record_ids]
        assert ts == sorted(ts)
        for link_a, link_b, score in result.link_scores[chain.chain_id]:
            assert score >= params.score_threshold
            assert (recs[link_a].timestamp, link_a) < (recs[link_b].timestamp, link_b)
            assert recs[link_b].timestamp - recs[link_a].timestamp <= max_gap_s


def test_oracle_clustering_full_corpus():
    spec = SynthSpec(n_topics=1, chains_per_topic=120, seed=5)
    corpus = generate(spec)
    scores = oracle_scores(corpus)
    ids = sorted(corpus.records)
    recs = corpus.records
    params = ClusterParams(score_threshold=0.5, max_gap_hours=10 ** 6)
    gold_with_singletons = corpus.effective_chains("T00")
    for algo in (tdfs_cluster, hc_single_cluster):
        chains = algo(scores, recs, ids, params)
        assert members(chains) == members(gold_with_singletons)
