"""Labeled pair enumeration, negative sampling, candidate generation."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftlink.corpus import Chain, Corpus, build_windows
from shiftlink.errors import ValidationError
from shiftlink.pairgen import (
    CROSS_CHAIN,
    NON_ADJACENT,
    POSITIVE,
    REVERSE_ORDER,
    LabeledPair,
    SamplingConfig,
    candidate_pairs_for_inference,
    enumerate_labeled_pairs,
    sample_pairs,
)

from conftest import rec


def one_window(corpus):
    [window] = build_windows(corpus, "T", window_hours=10 ** 6)
    return window


def by_kind(pairs):
    out = {}
    for p in pairs:
        out.setdefault(p.negative_kind if not p.is_positive else POSITIVE, set()).add((p.a, p.b))
    return out


class TestEnumeration:
    def test_single_chain_classification(self):
        corpus = Corpus([rec("A", 0.0), rec("B", 1.0), rec("C", 2.0)],
                        [Chain("c", ("A", "B", "C"))])
        kinds = by_kind(enumerate_labeled_pairs(one_window(corpus), corpus.gold_chains))
        assert kinds[POSITIVE] == {("A", "B"), ("B", "C")}
        assert kinds[NON_ADJACENT] == {("A", "C")}
        assert kinds[REVERSE_ORDER] == {("B", "A"), ("C", "B"), ("C", "A")}
        assert CROSS_CHAIN not in kinds

    def test_two_singletons(self):
        corpus = Corpus([rec("X", 0.0), rec("Y", 1.0)])
        kinds = by_kind(enumerate_labeled_pairs(one_window(corpus), []))
        assert POSITIVE not in kinds
        assert kinds[CROSS_CHAIN] == {("X", "Y"), ("Y", "X")}

    def test_two_chains_counts(self):
        corpus = Corpus(
            [rec("A", 0.0), rec("B", 1.0), rec("C", 2.0), rec("D", 3.0)],
            [Chain("c1", ("A", "B")), Chain("c2", ("C", "D"))],
        )
        pairs = enumerate_labeled_pairs(one_window(corpus), corpus.gold_chains)
        assert sum(p.is_positive for p in pairs) == 2
        assert sum(not p.is_positive for p in pairs) == 10
        assert len(pairs) == 12  # every ordered pair classified exactly once

    def test_chain_clipped_to_window(self):
        # B outside the window: (A, C) becomes adjacent after clipping
        corpus = Corpus([rec("A", 0.0), rec("B", 50.0), rec("C", 100.0)],
                        [Chain("c", ("A", "B", "C"))])
        windows = build_windows(corpus, "T", window_hours=30.0)
        inside = [w for w in windows if set(w.record_ids) == {"A"}]
        assert inside  # sanity: clipping happened somewhere
        for window in windows:
            pairs = enumerate_labeled_pairs(window, corpus.gold_chains)
            for p in pairs:
                assert {p.a, p.b} <= set(window.record_ids)

    def test_positive_invariant_under_stride(self):
        corpus = Corpus([rec("A", 0.0), rec("B", 5.0), rec("Z", 30.0)],
                        [Chain("c", ("A", "B"))])
        for stride in (0.25, 0.5, 1.0):
            for window in build_windows(corpus, "T", 20.0, stride):
                if {"A", "B"} <= set(window.record_ids):
                    kinds = by_kind(enumerate_labeled_pairs(window, corpus.gold_chains))
                    assert ("A", "B") in kinds[POSITIVE]

    def test_equal_timestamps_use_chain_order(self):
        corpus = Corpus([rec("B", 1.0), rec("A", 1.0)], [Chain("c", ("B", "A"))])
        kinds = by_kind(enumerate_labeled_pairs(one_window(corpus), corpus.gold_chains))
        assert kinds[POSITIVE] == {("B", "A")}
        assert kinds[REVERSE_ORDER] == {("A", "B")}


class TestSampling:
    def fake_pairs(self, n_pos, n_neg):
        pos = [LabeledPair(f"p{i}", f"q{i}", POSITIVE) for i in range(n_pos)]
        neg = [LabeledPair(f"n{i}", f"m{i}", "negative", CROSS_CHAIN) for i in range(n_neg)]
        return pos + neg

    def test_train_ratio(self):
        out = sample_pairs(self.fake_pairs(5, 200), SamplingConfig(seed=0), "train")
        assert sum(p.is_positive for p in out) == 5
        assert sum(not p.is_positive for p in out) == 100

    def test_exhaustion(self):
        out = sample_pairs(self.fake_pairs(5, 3), SamplingConfig(seed=0), "train")
        assert sum(not p.is_positive for p in out) == 3

    def test_dev_ratio(self):
        out = sample_pairs(self.fake_pairs(5, 200), SamplingConfig(seed=0), "dev")
        assert sum(not p.is_positive for p in out) == 5

    def test_deterministic(self):
        for split in ("train", "dev"):
            a = sample_pairs(self.fake_pairs(3, 500), SamplingConfig(seed=42), split)
            b = sample_pairs(self.fake_pairs(3, 500), SamplingConfig(seed=42), split)
            assert a == b

    def test_seed_matters(self):
        a = sample_pairs(self.fake_pairs(3, 500), SamplingConfig(seed=1), "train")
        b = sample_pairs(self.fake_pairs(3, 500), SamplingConfig(seed=2), "train")
        assert a != b

    def test_no_positive_error(self):
        with pytest.raises(ValidationError):
            sample_pairs(self.fake_pairs(0, 10), SamplingConfig(seed=0), "train")

    def test_unknown_split(self):
        with pytest.raises(ValidationError):
            sample_pairs(self.fake_pairs(1, 1), SamplingConfig(seed=0), "test")


class TestCandidates:
    def test_gap_filter(self):
        corpus = Corpus([rec("A", 0.0), rec("B", 5.0), rec("C", 200.0)])
        pairs = candidate_pairs_for_inference(one_window(corpus), corpus.records, 100.0)
        assert pairs == [("A", "B")]

    def test_unbounded_gap(self):
        corpus = Corpus([rec(f"r{i}", float(i)) for i in range(6)])
        pairs = candidate_pairs_for_inference(one_window(corpus), corpus.records, float("inf"))
        assert len(pairs) == 6 * 5 // 2

    def test_single_record(self):
        corpus = Corpus([rec("A", 0.0)])
        assert candidate_pairs_for_inference(one_window(corpus), corpus.records, 10.0) == []

    def test_invalid_gap(self):
        corpus = Corpus([rec("A", 0.0)])
        with pytest.raises(ValidationError):
            candidate_pairs_for_inference(one_window(corpus), corpus.records, 0.0)

    def test_forward_only(self):
        corpus = Corpus([rec("B", 1.0), rec("A", 1.0), rec("C", 2.0)])
        pairs = candidate_pairs_for_inference(one_window(corpus), corpus.records, 10.0)
        assert ("A", "B") in pairs  # tie broken by record id
        assert all(
            (corpus.records[a].timestamp, a) < (corpus.records[b].timestamp, b)
            for a, b in pairs
        )


@settings(max_examples=30, deadline=None)
@given(
    n_records=st.integers(min_value=2, max_value=14),
    chain_cut=st.integers(min_value=0, max_value=7),
    seed=st.integers(min_value=0, max_value=10 ** 6),
)
def test_every_ordered_pair_classified_once(n_records, chain_cut, seed):
    records = [rec(f"r{i:02d}", float(i)) for i in range(n_records)]
    chain_ids = tuple(f"r{i:02d}" for i in range(min(chain_cut, n_records)))
    chains = [Chain("c", chain_ids)] if len(chain_ids) >= 2 else []
    corpus = Corpus(records, chains)
    pairs = enumerate_labeled_pairs(one_window(corpus), chains)
    seen = {(p.a, p.b) for p in pairs}
    assert len(pairs) == len(seen) == n_records * (n_records - 1)
    for p in pairs:
        assert p.is_positive == (p.negative_kind is None)
