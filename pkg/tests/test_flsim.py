"""FL-code similarity, binning, and the bin-embedding lookup."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shiftlink.errors import ConfigError, ValidationError
from shiftlink.flsim import (
    FlConfig,
    FlEmbeddingTable,
    fl_bin,
    fl_feature,
    fl_similarity,
)


class TestSimilarity:
    def test_identical_codes(self):
        assert fl_similarity("K1A-PU-001", "K1A-PU-001") == 1.0

    def test_half_overlap(self):
        assert fl_similarity("ABC123", "ABCXYZ") == 0.5

    def test_missing_code(self):
        assert fl_similarity(None, "ABC") == 0.0
        assert fl_similarity("ABC", None) == 0.0
        assert fl_similarity(None, None) == 0.0
        assert fl_similarity("", "ABC") == 0.0
        assert fl_similarity("   ", "ABC") == 0.0

    def test_unequal_lengths(self):
        # common prefix 3 over max length 8
        assert fl_similarity("ABC", "ABCDEFGH") == pytest.approx(3 / 8)

    def test_case_sensitive(self):
        assert fl_similarity("abc", "ABC") == 0.0

    def test_whitespace_trimmed(self):
        assert fl_similarity(" ABC ", "ABC") == 1.0

    codes = st.text(alphabet="ABC123-", min_size=0, max_size=12)

    @given(codes, codes)
    def test_symmetry(self, a, b):
        assert fl_similarity(a, b) == fl_similarity(b, a)

    @given(codes, codes)
    def test_range(self, a, b):
        assert 0.0 <= fl_similarity(a, b) <= 1.0

    @given(st.text(alphabet="ABC", min_size=1, max_size=6))
    def test_longer_shared_prefix_scores_higher(self, prefix):
        # same lengths, one shares the full prefix, the other breaks early
        close = prefix + "X"
        far = ("Z" * len(prefix)) + "X"
        base = prefix + "Y"
        assert fl_similarity(base, close) > fl_similarity(base, far)


class TestBinning:
    def test_boundaries_11_bins(self):
        assert fl_bin(0.0, 11) == 0
        assert fl_bin(1.0, 11) == 10
        assert fl_bin(0.5, 11) == 5

    def test_rounding_to_nearest_level(self):
        assert fl_bin(0.04, 11) == 0
        assert fl_bin(0.05, 11) == 1   # 0.05*10 + 0.5 = 1.0
        assert fl_bin(0.949, 11) == 9
        assert fl_bin(0.951, 11) == 10

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            fl_bin(-0.01, 11)
        with pytest.raises(ValidationError):
            fl_bin(1.01, 11)

    @given(st.floats(min_value=0.0, max_value=1.0), st.integers(min_value=2, max_value=30))
    def test_bin_in_range(self, sim, n_bins):
        assert 0 <= fl_bin(sim, n_bins) < n_bins


class TestEmbedding:
    def test_config_validation(self):
        with pytest.raises(ConfigError):
            FlConfig(n_bins=1)
        with pytest.raises(ConfigError):
            FlConfig(embed_dim=0)
        with pytest.raises(ConfigError):
            FlConfig(missing_policy="drop")

    def test_initialize_shape_and_range(self, rng):
        table = FlEmbeddingTable.initialize(FlConfig(), rng)
        assert table.table.shape == (11, 50)
        assert np.all(np.abs(table.table) <= 0.1)

    def test_feature_row_lookup(self, rng):
        table = FlEmbeddingTable.initialize(FlConfig(), rng)
        np.testing.assert_array_equal(
            fl_feature("SAME", "SAME", table), table.table[10])
        np.testing.assert_array_equal(
            fl_feature(None, "ABC", table), table.table[0])
        np.testing.assert_array_equal(
            fl_feature("ABC123", "ABCXYZ", table), table.table[5])

    def test_initialize_deterministic(self):
        t1 = FlEmbeddingTable.initialize(FlConfig(), np.random.Generator(np.random.PCG64(9)))
        t2 = FlEmbeddingTable.initialize(FlConfig(), np.random.Generator(np.random.PCG64(9)))
        np.testing.assert_array_equal(t1.table, t2.table)
