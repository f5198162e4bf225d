"""Labeled pair generation for training and candidate pairs for inference.

Positives are forward-adjacent members of one chain after clipping the chain
to the window. Every other ordered pair in the window is a negative of
exactly one kind: reverse_order (same chain, against the timeline),
non_adjacent (same chain, forward but skipping members), or cross_chain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .corpus import Chain, Record, SubtopicWindow, clip_chains_to_window, SECONDS_PER_HOUR
from .errors import ValidationError

POSITIVE = "positive"
NEGATIVE = "negative"

CROSS_CHAIN = "cross_chain"
REVERSE_ORDER = "reverse_order"
NON_ADJACENT = "non_adjacent"


@dataclass(frozen=True)
class LabeledPair:
    a: str
    b: str
    label: str
    negative_kind: Optional[str] = None

    @property
    def is_positive(self) -> bool:
        return self.label == POSITIVE


@dataclass(frozen=True)
class SamplingConfig:
    train_neg_ratio: int = 20
    dev_neg_ratio: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.train_neg_ratio < 1 or self.dev_neg_ratio < 1:
            raise ValidationError("negative sampling ratios must be >= 1")


def enumerate_labeled_pairs(
    window: SubtopicWindow, gold: Iterable[Chain]
) -> list[LabeledPair]:
    """Classify every ordered pair of distinct window records exactly once."""
    clipped = clip_chains_to_window(gold, window)
    position: dict[str, tuple[str, int]] = {}
    for chain in clipped:
        for idx, rid in enumerate(chain.record_ids):
            if rid in position:
                raise ValidationError(f"record {rid!r} appears in two chains")
            position[rid] = (chain.chain_id, idx)

    pairs = []
    for a in window.record_ids:
        for b in window.record_ids:
            if a == b:
                continue
            pa = position.get(a)
            pb = position.get(b)
            if pa is not None and pb is not None and pa[0] == pb[0]:
                ia, ib = pa[1], pb[1]
                if ib == ia + 1:
                    pairs.append(LabeledPair(a, b, POSITIVE))
                elif ib > ia:
                    pairs.append(LabeledPair(a, b, NEGATIVE, NON_ADJACENT))
                else:
                    pairs.append(LabeledPair(a, b, NEGATIVE, REVERSE_ORDER))
            else:
                pairs.append(LabeledPair(a, b, NEGATIVE, CROSS_CHAIN))
    return pairs


def sample_pairs(
    pairs: Iterable[LabeledPair], config: SamplingConfig, split: str
) -> list[LabeledPair]:
    """Keep all positives; downsample negatives to the split's ratio, seeded."""
    if split == "train":
        ratio = config.train_neg_ratio
    elif split == "dev":
        ratio = config.dev_neg_ratio
    else:
        raise ValidationError(f"unknown split {split!r}")
    positives = [p for p in pairs if p.is_positive]
    negatives = [p for p in pairs if not p.is_positive]
    if not positives:
        raise ValidationError("sampling requires at least one positive pair")
    budget = ratio * len(positives)
    if len(negatives) > budget:
        rng = np.random.Generator(np.random.PCG64(config.seed))
        picked = rng.choice(len(negatives), size=budget, replace=False)
        negatives = [negatives[i] for i in sorted(picked)]
    return positives + negatives


def candidate_pairs_for_inference(
    window: SubtopicWindow, records: dict[str, Record], max_gap_hours: float
) -> list[tuple[str, str]]:
    """Forward ordered pairs (ties by record_id) within the time gap."""
    if max_gap_hours <= 0:
        raise ValidationError("max_gap_hours must be positive")
    max_gap = max_gap_hours * SECONDS_PER_HOUR
    ids = window.record_ids  # already sorted by (timestamp, record_id)
    out = []
    for i, a in enumerate(ids):
        ts_a = records[a].timestamp
        for b in ids[i + 1:]:
            if records[b].timestamp - ts_a > max_gap:
                break
            out.append((a, b))
    return out


def dump_pairs(pairs: Iterable[LabeledPair], path) -> None:
    """Debug dump: one JSON object per line {a, b, label, kind}."""
    import json

    with open(path, "w", encoding="utf-8") as handle:
        for pair in pairs:
            obj = {"a": pair.a, "b": pair.b, "label": pair.label, "kind": pair.negative_kind}
            handle.write(json.dumps(obj, sort_keys=True) + "\n")
