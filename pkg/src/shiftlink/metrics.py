"""Coreference and clustering evaluation.

Gold singletons are stripped before scoring, following the practice of
evaluating without singletons: the universe is the set of members of the
remaining gold chains, and system chains are restricted to that universe.
All metrics are pure functions of the resulting partition pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .corpus import Chain
from .errors import ValidationError


@dataclass(frozen=True)
class PartitionPair:
    gold: tuple[tuple[str, ...], ...]
    system: tuple[tuple[str, ...], ...]
    universe: frozenset[str]
    defined: bool = True


@dataclass
class ScoreReport:
    """Coreference F1s as percentages, clustering scores as ratios."""

    muc_p: float = 0.0
    muc_r: float = 0.0
    muc_f1: float = 0.0
    b3_p: float = 0.0
    b3_r: float = 0.0
    b3_f1: float = 0.0
    ceafe_p: float = 0.0
    ceafe_r: float = 0.0
    ceafe_f1: float = 0.0
    conll_f1: float = 0.0
    homogeneity: float = 0.0
    completeness: float = 0.0
    v_measure: float = 0.0

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def strip_singletons(gold: Sequence[Chain], system: Sequence[Chain]) -> PartitionPair:
    """Drop gold singletons, restrict system chains to the remaining universe.

    System chains reduced to one member stay in as system singletons; chains
    reduced to nothing are dropped. An empty universe flags the pair undefined.
    """
    gold_kept = [tuple(c.record_ids) for c in gold if len(c.record_ids) > 1]
    universe = frozenset(m for chain in gold_kept for m in chain)
    system_kept = []
    for chain in system:
        restricted = tuple(r for r in chain.record_ids if r in universe)
        if restricted:
            system_kept.append(restricted)
    return PartitionPair(
        gold=tuple(gold_kept),
        system=tuple(system_kept),
        universe=universe,
        defined=bool(universe),
    )


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0.0 else 2.0 * p * r / (p + r)


def _cell_index(chains: Sequence[tuple[str, ...]], universe: frozenset[str]) -> dict[str, int]:
    """Map each universe member to its chain index; uncovered members get
    fresh singleton cells."""
    index: dict[str, int] = {}
    for i, chain in enumerate(chains):
        for m in chain:
            index[m] = i
    nxt = len(chains)
    for m in sorted(universe):
        if m not in index:
            index[m] = nxt
            nxt += 1
    return index


def muc(pair: PartitionPair) -> tuple[float, float, float]:
    """Link-based metric: recall counts the links missing to stitch each gold
    chain back together from the system cells that cover it."""

    def score(keys: Sequence[tuple[str, ...]], responses: Sequence[tuple[str, ...]]) -> float:
        cell_of = {}
        for i, chain in enumerate(responses):
            for m in chain:
                cell_of[m] = i
        num = 0.0
        den = 0.0
        for chain in keys:
            cells = set()
            uncovered = 0
            for m in chain:
                if m in cell_of:
                    cells.add(cell_of[m])
                else:
                    uncovered += 1
            partitions = len(cells) + uncovered
            num += len(chain) - partitions
            den += len(chain) - 1
        return 0.0 if den == 0.0 else num / den

    r = score(pair.gold, pair.system)
    p = score(pair.system, pair.gold)
    return p, r, _f1(p, r)


def b_cubed(pair: PartitionPair) -> tuple[float, float, float]:
    """Mention-based metric; universe members absent from the system count as
    system singletons."""
    if not pair.universe:
        return 0.0, 0.0, 0.0
    gold_of = _cell_index(pair.gold, pair.universe)
    sys_of = _cell_index(pair.system, pair.universe)
    gold_sets: dict[int, set[str]] = {}
    sys_sets: dict[int, set[str]] = {}
    for m in pair.universe:
        gold_sets.setdefault(gold_of[m], set()).add(m)
        sys_sets.setdefault(sys_of[m], set()).add(m)
    r_sum = 0.0
    p_sum = 0.0
    for m in pair.universe:
        g = gold_sets[gold_of[m]]
        s = sys_sets[sys_of[m]]
        overlap = len(g & s)
        r_sum += overlap / len(g)
        p_sum += overlap / len(s)
    n = len(pair.universe)
    p, r = p_sum / n, r_sum / n
    return p, r, _f1(p, r)


def ceaf_e(pair: PartitionPair) -> tuple[float, float, float]:
    """Entity-alignment metric with the size-normalized overlap similarity
    phi(g, s) = 2|g ∩ s| / (|g| + |s|), alignment solved exactly."""
    if not pair.gold or not pair.system:
        return 0.0, 0.0, 0.0
    gold_sets = [set(c) for c in pair.gold]
    sys_sets = [set(c) for c in pair.system]
    sim = np.zeros((len(gold_sets), len(sys_sets)))
    for i, g in enumerate(gold_sets):
        for j, s in enumerate(sys_sets):
            sim[i, j] = 2.0 * len(g & s) / (len(g) + len(s))
    rows, cols = linear_sum_assignment(sim, maximize=True)
    total = float(sim[rows, cols].sum())
    r = total / len(gold_sets)
    p = total / len(sys_sets)
    return p, r, _f1(p, r)


def v_measure(pair: PartitionPair) -> tuple[float, float, float]:
    """Entropy-based homogeneity/completeness/v over the universe; natural log.

    A zero-entropy side scores 1 by convention; v is 0 when h + c = 0.
    """
    if not pair.universe:
        return 0.0, 0.0, 0.0
    gold_of = _cell_index(pair.gold, pair.universe)
    sys_of = _cell_index(pair.system, pair.universe)
    n = len(pair.universe)
    joint: dict[tuple[int, int], int] = {}
    gold_counts: dict[int, int] = {}
    sys_counts: dict[int, int] = {}
    for m in pair.universe:
        g, s = gold_of[m], sys_of[m]
        joint[(g, s)] = joint.get((g, s), 0) + 1
        gold_counts[g] = gold_counts.get(g, 0) + 1
        sys_counts[s] = sys_counts.get(s, 0) + 1

    def entropy(counts: dict[int, int]) -> float:
        return -sum((c / n) * math.log(c / n) for c in counts.values())

    h_gold = entropy(gold_counts)
    h_sys = entropy(sys_counts)
    h_gold_given_sys = -sum(
        (c / n) * math.log(c / sys_counts[s]) for (g, s), c in joint.items()
    )
    h_sys_given_gold = -sum(
        (c / n) * math.log(c / gold_counts[g]) for (g, s), c in joint.items()
    )
    h = 1.0 if h_gold == 0.0 else 1.0 - h_gold_given_sys / h_gold
    c = 1.0 if h_sys == 0.0 else 1.0 - h_sys_given_gold / h_sys
    v = 0.0 if h + c == 0.0 else 2.0 * h * c / (h + c)
    return h, c, v


def binary_prf(
    scores: Sequence[float], labels: Sequence[int], threshold: float
) -> tuple[float, float, float]:
    """Precision/recall/F1 with predicted-positive meaning score >= threshold."""
    if len(scores) != len(labels) or not scores:
        raise ValidationError("scores and labels must be non-empty and aligned")
    tp = fp = fn = 0
    for s, y in zip(scores, labels):
        pred = s >= threshold
        if pred and y:
            tp += 1
        elif pred and not y:
            fp += 1
        elif not pred and y:
            fn += 1
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    return p, r, _f1(p, r)


def evaluate_partition(gold: Sequence[Chain], system: Sequence[Chain]) -> Optional[ScoreReport]:
    """Full report for one window; None when gold has no non-singleton chain."""
    pair = strip_singletons(gold, system)
    if not pair.defined:
        return None
    muc_p, muc_r, muc_f = muc(pair)
    b3_p, b3_r, b3_f = b_cubed(pair)
    ce_p, ce_r, ce_f = ceaf_e(pair)
    h, c, v = v_measure(pair)
    return ScoreReport(
        muc_p=100.0 * muc_p,
        muc_r=100.0 * muc_r,
        muc_f1=100.0 * muc_f,
        b3_p=100.0 * b3_p,
        b3_r=100.0 * b3_r,
        b3_f1=100.0 * b3_f,
        ceafe_p=100.0 * ce_p,
        ceafe_r=100.0 * ce_r,
        ceafe_f1=100.0 * ce_f,
        conll_f1=100.0 * (muc_f + b3_f + ce_f) / 3.0,
        homogeneity=h,
        completeness=c,
        v_measure=v,
    )


@dataclass
class AggregateReport:
    report: Optional[ScoreReport]
    window_count: int
    excluded_count: int


def aggregate(reports: Sequence[Optional[ScoreReport]]) -> AggregateReport:
    """Unweighted mean of each metric over windows with defined metrics."""
    defined = [r for r in reports if r is not None]
    excluded = len(reports) - len(defined)
    if not defined:
        return AggregateReport(report=None, window_count=len(reports), excluded_count=excluded)
    mean = ScoreReport()
    for name in ScoreReport.__dataclass_fields__:
        setattr(mean, name, float(np.mean([getattr(r, name) for r in defined])))
    return AggregateReport(report=mean, window_count=len(reports), excluded_count=excluded)
