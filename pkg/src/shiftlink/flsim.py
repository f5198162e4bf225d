"""Functional-location code similarity and its trainable bin embedding.

FL codes identify machinery hierarchically; a longer shared prefix means
closer equipment. Pair similarity is the normalized common-prefix length,
discretized into bins, each bin backed by a trainable embedding row.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, ValidationError

DEFAULT_N_BINS = 11
DEFAULT_EMBED_DIM = 50


@dataclass(frozen=True)
class FlConfig:
    n_bins: int = DEFAULT_N_BINS
    embed_dim: int = DEFAULT_EMBED_DIM
    missing_policy: str = "zero_similarity"

    def __post_init__(self):
        if self.n_bins < 2:
            raise ConfigError("n_bins must be >= 2")
        if self.embed_dim < 1:
            raise ConfigError("embed_dim must be >= 1")
        if self.missing_policy != "zero_similarity":
            raise ConfigError(f"unknown missing_policy {self.missing_policy!r}")


@dataclass
class FlEmbeddingTable:
    table: np.ndarray  # (n_bins, embed_dim), trainable

    @staticmethod
    def initialize(config: FlConfig, rng: np.random.Generator) -> "FlEmbeddingTable":
        # Small symmetric init, standard for embedding tables.
        return FlEmbeddingTable(
            table=rng.uniform(-0.1, 0.1, size=(config.n_bins, config.embed_dim))
        )


def fl_similarity(f_i: Optional[str], f_j: Optional[str]) -> float:
    """Normalized common-prefix overlap in [0, 1]; missing codes score 0."""
    if f_i is None or f_j is None:
        return 0.0
    a = f_i.strip()
    b = f_j.strip()
    if not a or not b:
        return 0.0
    overlap = 0
    for ca, cb in zip(a, b):
        if ca != cb:
            break
        overlap += 1
    return overlap / max(len(a), len(b))


def fl_bin(sim: float, n_bins: int = DEFAULT_N_BINS) -> int:
    """Nearest of n_bins equally spaced levels {0, 1/(n_bins-1), ..., 1}."""
    if not (0.0 <= sim <= 1.0):
        raise ValidationError(f"similarity {sim!r} outside [0, 1]")
    return min(int(sim * (n_bins - 1) + 0.5), n_bins - 1)


def fl_feature(
    f_i: Optional[str], f_j: Optional[str], table: FlEmbeddingTable
) -> np.ndarray:
    """Embedding row of the pair's similarity bin (one-hot times the table)."""
    index = fl_bin(fl_similarity(f_i, f_j), table.table.shape[0])
    return table.table[index]
