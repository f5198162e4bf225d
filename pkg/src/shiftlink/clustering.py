"""Chain construction from pairwise scores.

tDFS grows chains forward in time: starting from the earliest unassigned
record, it greedily follows score-thresholded, gap-constrained links and
exhausts the search from every record already pulled into the chain.
The single-linkage baseline takes connected components of the thresholded
score graph instead (friends-of-friends), ignoring link direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .corpus import Chain, Record, SubtopicWindow, SECONDS_PER_HOUR
from .errors import ValidationError
from .metrics import strip_singletons, v_measure

ScoreMap = Mapping[tuple[str, str], float]


@dataclass(frozen=True)
class ClusterParams:
    score_threshold: float
    max_gap_hours: float
    algorithm: str = "tdfs"  # "tdfs" | "hc_single"

    def __post_init__(self):
        if not (0.0 < self.score_threshold < 1.0):
            raise ValidationError("score_threshold must be in (0, 1)")
        if self.max_gap_hours <= 0:
            raise ValidationError("max_gap_hours must be positive")
        if self.algorithm not in ("tdfs", "hc_single"):
            raise ValidationError(f"unknown clustering algorithm {self.algorithm!r}")


def _order_key(records: Mapping[str, Record]):
    return lambda rid: (records[rid].timestamp, rid)


def _check_forward(scores: ScoreMap, records: Mapping[str, Record]) -> None:
    for a, b in scores:
        if (records[a].timestamp, a) >= (records[b].timestamp, b):
            raise ValidationError(f"score map contains non-forward pair ({a!r}, {b!r})")


@dataclass(frozen=True)
class ClusterResult:
    chains: list[Chain]
    link_scores: dict[str, list[tuple[str, str, float]]]  # chain_id -> links used


def tdfs_cluster(
    scores: ScoreMap,
    records: Mapping[str, Record],
    window_record_ids: Sequence[str],
    params: ClusterParams,
) -> list[Chain]:
    return tdfs_cluster_detailed(scores, records, window_record_ids, params).chains


def tdfs_cluster_detailed(
    scores: ScoreMap,
    records: Mapping[str, Record],
    window_record_ids: Sequence[str],
    params: ClusterParams,
) -> ClusterResult:
    """Time-dependent depth-first search over the thresholded forward graph.

    Records are seeded in time order; from each resolved record the best-scored
    unassigned successor is visited first and expanded in turn. Candidate order:
    descending score, then earlier timestamp, then record_id.
    """
    _check_forward(scores, records)
    key = _order_key(records)
    ordered = sorted(window_record_ids, key=key)
    max_gap = params.max_gap_hours * SECONDS_PER_HOUR

    adjacency: dict[str, list[tuple[str, float]]] = {rid: [] for rid in ordered}
    in_window = set(ordered)
    for (a, b), score in scores.items():
        if a in in_window and b in in_window:
            if records[b].timestamp - records[a].timestamp > max_gap:
                raise ValidationError(
                    f"score map pair ({a!r}, {b!r}) exceeds the max gap"
                )
            adjacency[a].append((b, score))

    assigned: set[str] = set()
    chains: list[Chain] = []
    link_scores: dict[str, list[tuple[str, str, float]]] = {}
    for seed in ordered:
        if seed in assigned:
            continue
        assigned.add(seed)
        members = [seed]
        links: list[tuple[str, str, float]] = []
        stack = [seed]
        while stack:
            frontier = stack[-1]
            best: Optional[tuple[str, float]] = None
            for cand, score in adjacency[frontier]:
                if cand in assigned or score < params.score_threshold:
                    continue
                if best is None or (-score, records[cand].timestamp, cand) < (
                    -best[1], records[best[0]].timestamp, best[0]
                ):
                    best = (cand, score)
            if best is None:
                stack.pop()
                continue
            cand, score = best
            assigned.add(cand)
            members.append(cand)
            links.append((frontier, cand, score))
            stack.append(cand)
        members.sort(key=key)
        chain = Chain(f"{members[0]}+{len(members)}", tuple(members))
        chains.append(chain)
        link_scores[chain.chain_id] = links
    return ClusterResult(chains=chains, link_scores=link_scores)


def hc_single_cluster(
    scores: ScoreMap,
    records: Mapping[str, Record],
    window_record_ids: Sequence[str],
    params: ClusterParams,
) -> list[Chain]:
    """Connected components of the undirected graph with edges at score >= threshold."""
    _check_forward(scores, records)
    key = _order_key(records)
    ordered = sorted(window_record_ids, key=key)
    in_window = set(ordered)

    parent = {rid: rid for rid in ordered}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: str, y: str) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    for (a, b), score in scores.items():
        if score >= params.score_threshold and a in in_window and b in in_window:
            union(a, b)

    groups: dict[str, list[str]] = {}
    for rid in ordered:
        groups.setdefault(find(rid), []).append(rid)
    chains = []
    for members in groups.values():
        members.sort(key=key)
        chains.append(Chain(f"{members[0]}+{len(members)}", tuple(members)))
    chains.sort(key=lambda c: key(c.record_ids[0]))
    return chains


def cluster_window(
    scores: ScoreMap,
    records: Mapping[str, Record],
    window: SubtopicWindow,
    params: ClusterParams,
) -> list[Chain]:
    if params.algorithm == "tdfs":
        return tdfs_cluster(scores, records, window.record_ids, params)
    return hc_single_cluster(scores, records, window.record_ids, params)


def threshold_grid(tau0: float) -> tuple[list[float], list[float]]:
    """Candidate clustering thresholds around the scorer's operating point.

    Returns (full grid before clipping, grid clipped to (0, 1)). The grid is
    tau0 plus tau0 scaled by +/-30%..100% in 10% steps; the -100% point is
    omitted since it is always zero.
    """
    deltas = [round(0.1 * k, 10) for k in range(3, 11)]       # +30% .. +100%
    deltas += [-round(0.1 * k, 10) for k in range(3, 10)]     # -30% .. -90%
    full = [tau0] + [tau0 * (1.0 + d) for d in deltas]
    clipped = sorted({t for t in full if 0.0 < t < 1.0})
    return full, clipped


def tune_threshold(
    windows: Sequence[tuple[SubtopicWindow, ScoreMap, Sequence[Chain], float]],
    records: Mapping[str, Record],
    tau0: float,
    algorithm: str,
) -> float:
    """Pick the grid threshold maximizing mean v-measure on dev windows.

    Each entry is (window, score map, gold chains already clipped to the
    window, max gap hours for that window's topic). Ties resolve to the
    smaller threshold.
    """
    if not windows:
        raise ValidationError("threshold tuning requires at least one dev window")
    _, candidates = threshold_grid(tau0)
    best_tau = None
    best_score = -1.0
    for tau in candidates:
        values = []
        for window, scores, gold, max_gap_hours in windows:
            params = ClusterParams(
                score_threshold=tau, max_gap_hours=max_gap_hours, algorithm=algorithm
            )
            system = cluster_window(scores, records, window, params)
            pair = strip_singletons(list(gold), system)
            if not pair.defined:
                continue
            values.append(v_measure(pair)[2])
        if not values:
            continue
        mean_v = sum(values) / len(values)
        if mean_v > best_score + 1e-12:
            best_score = mean_v
            best_tau = tau
    if best_tau is None:
        raise ValidationError("no dev window produced a defined v-measure")
    return best_tau


def merge_chains(chains: Iterable[Chain], records: Mapping[str, Record]) -> list[Chain]:
    """Union chains sharing any record until fixpoint; members re-sorted by time.

    Idempotent and independent of input order.
    """
    chains = list(chains)
    owner: dict[str, int] = {}
    parent = list(range(len(chains)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for idx, chain in enumerate(chains):
        for rid in chain.record_ids:
            if rid in owner:
                ra, rb = find(owner[rid]), find(idx)
                if ra != rb:
                    parent[rb] = ra
            else:
                owner[rid] = idx

    groups: dict[int, set[str]] = {}
    for idx, chain in enumerate(chains):
        groups.setdefault(find(idx), set()).update(chain.record_ids)

    key = _order_key(records)
    merged = []
    for members in groups.values():
        ordered = sorted(members, key=key)
        merged.append(Chain(f"{ordered[0]}+{len(ordered)}", tuple(ordered)))
    merged.sort(key=lambda c: key(c.record_ids[0]))
    return merged
