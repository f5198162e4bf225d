"""Shift-book corpus: data model, JSONL ingestion, time statistics, windows, splits.

A corpus holds event records grouped by topic (one log book per plant).
Records that narrate one story form a chain; records without a chain are
implicit singletons. Timestamps are float seconds since the Unix epoch, UTC.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Optional

import numpy as np

from .errors import ValidationError

# Valid timestamp range: 1970-01-01 (inclusive) to 2100-01-01 (exclusive), UTC.
TIMESTAMP_MIN = 0.0
TIMESTAMP_MAX = datetime(2100, 1, 1, tzinfo=timezone.utc).timestamp()

SECONDS_PER_HOUR = 3600.0

# Prefix for chain ids synthesized for records outside any explicit chain.
SINGLETON_PREFIX = "s::"


@dataclass(frozen=True)
class Record:
    """One shift-book entry."""

    record_id: str
    topic_id: str
    document_id: str
    timestamp: float
    text: str
    fl_code: Optional[str] = None
    extra_attributes: dict[str, str] = field(default_factory=dict)

    def validate(self) -> None:
        if not self.record_id:
            raise ValidationError("record with empty record_id")
        if not self.text.strip():
            raise ValidationError(f"record {self.record_id!r}: empty text")
        ts = self.timestamp
        if not math.isfinite(ts) or not (TIMESTAMP_MIN <= ts < TIMESTAMP_MAX):
            raise ValidationError(
                f"record {self.record_id!r}: timestamp {ts!r} outside [1970, 2100)"
            )


@dataclass(frozen=True)
class Chain:
    """A time-ordered sequence of record ids narrating one story."""

    chain_id: str
    record_ids: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.record_ids)

    @property
    def is_singleton(self) -> bool:
        return len(self.record_ids) == 1


@dataclass(frozen=True)
class TimeStats:
    """Quartiles (hours) of full-chain durations and between-record gaps."""

    full_chain_hours_q1: float
    full_chain_hours_q2: float
    full_chain_hours_q3: float
    between_records_hours_q1: float
    between_records_hours_q2: float
    between_records_hours_q3: float


@dataclass(frozen=True)
class SubtopicWindow:
    """A time window over one topic's records; the unit of scoring and evaluation."""

    topic_id: str
    start: float
    end: float
    record_ids: tuple[str, ...]


@dataclass(frozen=True)
class DataSplit:
    """Chronological chain-level split; chain ids per part."""

    train: tuple[str, ...]
    dev: tuple[str, ...]
    test: tuple[str, ...]

    def to_manifest(self) -> dict:
        return {"train": list(self.train), "dev": list(self.dev), "test": list(self.test)}

    @staticmethod
    def from_manifest(obj: dict) -> "DataSplit":
        try:
            return DataSplit(
                train=tuple(obj["train"]), dev=tuple(obj["dev"]), test=tuple(obj["test"])
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed split manifest: {exc}") from exc


@dataclass(frozen=True)
class SplitPolicy:
    """Per-topic split sizing: all-test below the quota, thirds, then 80/10/10."""

    test_quota: int = 200


def record_sort_key(record: Record) -> tuple[float, str]:
    # Timestamp ties break by record_id for full determinism.
    return (record.timestamp, record.record_id)


class Corpus:
    """Immutable after construction; safe for concurrent reads."""

    def __init__(self, records: Iterable[Record], gold_chains: Optional[Iterable[Chain]] = None):
        self.records: dict[str, Record] = {}
        for rec in records:
            rec.validate()
            if rec.record_id in self.records:
                raise ValidationError(f"duplicate record_id {rec.record_id!r}")
            self.records[rec.record_id] = rec

        self.topics: dict[str, list[str]] = {}
        for rec in sorted(self.records.values(), key=record_sort_key):
            self.topics.setdefault(rec.topic_id, []).append(rec.record_id)

        self.gold_chains: Optional[list[Chain]] = None
        if gold_chains is not None:
            self.gold_chains = [self._validate_chain(c) for c in gold_chains]
            self._check_disjoint(self.gold_chains)
            self.gold_chains.sort(key=lambda c: (self.chain_start(c), c.chain_id))
        self._chained: set[str] = set()
        self._chain_index: dict[str, Chain] = {}
        if self.gold_chains:
            for chain in self.gold_chains:
                self._chained.update(chain.record_ids)
                self._chain_index[chain.chain_id] = chain

    def _validate_chain(self, chain: Chain) -> Chain:
        if not chain.record_ids:
            raise ValidationError(f"chain {chain.chain_id!r} has no members")
        if chain.chain_id.startswith(SINGLETON_PREFIX):
            raise ValidationError(
                f"chain id {chain.chain_id!r} collides with the reserved singleton prefix"
            )
        topic_ids = set()
        for rid in chain.record_ids:
            if rid not in self.records:
                raise ValidationError(
                    f"chain {chain.chain_id!r} references unknown record {rid!r}"
                )
            topic_ids.add(self.records[rid].topic_id)
        if len(topic_ids) > 1:
            raise ValidationError(
                f"chain {chain.chain_id!r} spans topics {sorted(topic_ids)}"
            )
        # Stable sort by timestamp keeps the stored order authoritative for ties.
        ordered = tuple(sorted(chain.record_ids, key=lambda r: self.records[r].timestamp))
        return Chain(chain.chain_id, ordered)

    @staticmethod
    def _check_disjoint(chains: list[Chain]) -> None:
        seen: dict[str, str] = {}
        for chain in chains:
            for rid in chain.record_ids:
                if rid in seen:
                    raise ValidationError(
                        f"record {rid!r} appears in chains {seen[rid]!r} and {chain.chain_id!r}"
                    )
                seen[rid] = chain.chain_id

    def chain_start(self, chain: Chain) -> float:
        return min(self.records[r].timestamp for r in chain.record_ids)

    def chain_topic(self, chain: Chain) -> str:
        return self.records[chain.record_ids[0]].topic_id

    def topic_chains(self, topic_id: str) -> list[Chain]:
        if self.gold_chains is None:
            return []
        return [c for c in self.gold_chains if self.chain_topic(c) == topic_id]

    def effective_chains(self, topic_id: str) -> list[Chain]:
        """Explicit chains plus one implicit singleton per unchained record."""
        chains = list(self.topic_chains(topic_id))
        for rid in self.topics.get(topic_id, []):
            if rid not in self._chained:
                chains.append(Chain(SINGLETON_PREFIX + rid, (rid,)))
        chains.sort(key=lambda c: (self.chain_start(c), c.chain_id))
        return chains

    def resolve_chain(self, chain_id: str) -> Chain:
        if chain_id.startswith(SINGLETON_PREFIX):
            rid = chain_id[len(SINGLETON_PREFIX):]
            if rid not in self.records or rid in self._chained:
                raise ValidationError(f"unknown singleton chain {chain_id!r}")
            return Chain(chain_id, (rid,))
        try:
            return self._chain_index[chain_id]
        except KeyError:
            raise ValidationError(f"unknown chain {chain_id!r}") from None


# ---------------------------------------------------------------------------
# JSONL ingestion and serialization
# ---------------------------------------------------------------------------

def _parse_timestamp(value, where: str) -> float:
    if isinstance(value, bool):
        raise ValidationError(f"{where}: timestamp must be a number or RFC 3339 string")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        if text.endswith(("Z", "z")):
            text = text[:-1] + "+00:00"
        try:
            dt = datetime.fromisoformat(text)
        except ValueError as exc:
            raise ValidationError(f"{where}: bad timestamp {value!r}: {exc}") from exc
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return dt.timestamp()
    raise ValidationError(f"{where}: timestamp must be a number or RFC 3339 string")


def _parse_record_line(obj: dict, where: str) -> Record:
    try:
        record_id = obj["record_id"]
        topic_id = obj["topic_id"]
        document_id = obj["document_id"]
        timestamp = obj["timestamp"]
        text = obj["text"]
    except KeyError as exc:
        raise ValidationError(f"{where}: missing key {exc}") from exc
    fl_code = obj.get("fl_code")
    attributes = obj.get("attributes") or {}
    if not isinstance(attributes, dict):
        raise ValidationError(f"{where}: attributes must be an object")
    return Record(
        record_id=str(record_id),
        topic_id=str(topic_id),
        document_id=str(document_id),
        timestamp=_parse_timestamp(timestamp, where),
        text=str(text),
        fl_code=None if fl_code is None else str(fl_code),
        extra_attributes={str(k): str(v) for k, v in attributes.items()},
    )


def _iter_jsonl(path) -> Iterable[tuple[int, dict]]:
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise ValidationError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def load_corpus(records_path, chains_path=None) -> Corpus:
    """Load a record JSONL file, optionally with a gold-chain JSONL file."""
    records = []
    for lineno, obj in _iter_jsonl(records_path):
        records.append(_parse_record_line(obj, f"{records_path}:{lineno}"))

    chains = None
    if chains_path is not None:
        chains = []
        seen_ids = set()
        for lineno, obj in _iter_jsonl(chains_path):
            where = f"{chains_path}:{lineno}"
            try:
                chain_id = str(obj["chain_id"])
                record_ids = tuple(str(r) for r in obj["record_ids"])
            except (KeyError, TypeError) as exc:
                raise ValidationError(f"{where}: malformed chain: {exc}") from exc
            if chain_id in seen_ids:
                raise ValidationError(f"{where}: duplicate chain_id {chain_id!r}")
            seen_ids.add(chain_id)
            chains.append(Chain(chain_id, record_ids))
    return Corpus(records, chains)


def save_corpus(corpus: Corpus, records_path, chains_path=None) -> None:
    """Write the external JSONL formats. Deterministic byte-for-byte."""
    with open(records_path, "w", encoding="utf-8") as handle:
        for topic_id in sorted(corpus.topics):
            for rid in corpus.topics[topic_id]:
                rec = corpus.records[rid]
                ts = rec.timestamp
                obj = {
                    "record_id": rec.record_id,
                    "topic_id": rec.topic_id,
                    "document_id": rec.document_id,
                    "timestamp": int(ts) if float(ts).is_integer() else ts,
                    "text": rec.text,
                    "fl_code": rec.fl_code,
                }
                if rec.extra_attributes:
                    obj["attributes"] = dict(sorted(rec.extra_attributes.items()))
                handle.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")
    if chains_path is not None and corpus.gold_chains is not None:
        with open(chains_path, "w", encoding="utf-8") as handle:
            for chain in corpus.gold_chains:
                obj = {"chain_id": chain.chain_id, "record_ids": list(chain.record_ids)}
                handle.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")


def load_chains(path) -> list[Chain]:
    """Standalone chain-file loader (gold or predicted); provenance ignored."""
    chains = []
    seen = set()
    for lineno, obj in _iter_jsonl(path):
        where = f"{path}:{lineno}"
        try:
            chain_id = str(obj["chain_id"])
            record_ids = tuple(str(r) for r in obj["record_ids"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"{where}: malformed chain: {exc}") from exc
        if chain_id in seen:
            raise ValidationError(f"{where}: duplicate chain_id {chain_id!r}")
        if not record_ids:
            raise ValidationError(f"{where}: chain {chain_id!r} has no members")
        seen.add(chain_id)
        chains.append(Chain(chain_id, record_ids))
    return chains


def save_chains(chains: Iterable[Chain], path, provenance: Optional[dict] = None) -> None:
    """Write chains as JSONL, optionally with per-chain provenance objects."""
    with open(path, "w", encoding="utf-8") as handle:
        for chain in chains:
            obj = {"chain_id": chain.chain_id, "record_ids": list(chain.record_ids)}
            if provenance is not None and chain.chain_id in provenance:
                obj["provenance"] = provenance[chain.chain_id]
            handle.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")


def save_split(split: DataSplit, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(split.to_manifest(), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_split(path) -> DataSplit:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            obj = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed split manifest: {exc}") from exc
    return DataSplit.from_manifest(obj)


# ---------------------------------------------------------------------------
# Time statistics
# ---------------------------------------------------------------------------

def compute_time_stats(corpus: Corpus, topic_id: str) -> TimeStats:
    """Quartiles of full-chain durations and consecutive-member gaps, in hours.

    Quartiles use linear interpolation over the sorted values (inclusive method).
    """
    durations = []
    gaps = []
    for chain in corpus.topic_chains(topic_id):
        if chain.is_singleton:
            continue
        times = [corpus.records[r].timestamp for r in chain.record_ids]
        durations.append((times[-1] - times[0]) / SECONDS_PER_HOUR)
        gaps.extend((b - a) / SECONDS_PER_HOUR for a, b in zip(times, times[1:]))
    if not durations:
        raise ValidationError(f"topic {topic_id!r}: no chain statistics available")
    dq = np.quantile(np.asarray(durations), [0.25, 0.5, 0.75], method="linear")
    gq = np.quantile(np.asarray(gaps), [0.25, 0.5, 0.75], method="linear")
    return TimeStats(
        full_chain_hours_q1=float(dq[0]),
        full_chain_hours_q2=float(dq[1]),
        full_chain_hours_q3=float(dq[2]),
        between_records_hours_q1=float(gq[0]),
        between_records_hours_q2=float(gq[1]),
        between_records_hours_q3=float(gq[2]),
    )


def corpus_time_stats(corpus: Corpus) -> dict[str, TimeStats]:
    """Per-topic stats for topics that have at least one non-singleton chain."""
    stats = {}
    for topic_id in sorted(corpus.topics):
        try:
            stats[topic_id] = compute_time_stats(corpus, topic_id)
        except ValidationError:
            continue
    if not stats:
        raise ValidationError("no chain statistics available in any topic")
    return stats


def window_size_for_topic(topic_stats: TimeStats, all_topic_stats: list[TimeStats]) -> float:
    """Window size in hours: max of the cross-topic mean Q3 and the topic's own Q3."""
    if not all_topic_stats:
        raise ValidationError("no topic statistics supplied")
    mean_q3 = float(np.mean([s.full_chain_hours_q3 for s in all_topic_stats]))
    return max(mean_q3, topic_stats.full_chain_hours_q3)


# ---------------------------------------------------------------------------
# Sliding subtopic windows
# ---------------------------------------------------------------------------

def build_windows(
    corpus: Corpus,
    topic_id: str,
    window_hours: float,
    stride_fraction: float = 0.5,
    record_ids: Optional[Iterable[str]] = None,
) -> list[SubtopicWindow]:
    """Overlapping sliding windows over one topic, covering every record.

    Windows advance by stride_fraction * window_hours from the first record's
    timestamp; generation stops with the first window extending past the last
    record. Empty windows are dropped. Restrict to `record_ids` if given.
    """
    if window_hours <= 0:
        raise ValidationError("window_hours must be positive")
    if not (0 < stride_fraction <= 1):
        raise ValidationError("stride_fraction must be in (0, 1]")
    if record_ids is None:
        members = list(corpus.topics.get(topic_id, []))
    else:
        wanted = set(record_ids)
        members = [r for r in corpus.topics.get(topic_id, []) if r in wanted]
    if not members:
        raise ValidationError(f"topic {topic_id!r} has no records to window")

    first_ts = corpus.records[members[0]].timestamp
    last_ts = corpus.records[members[-1]].timestamp
    width = window_hours * SECONDS_PER_HOUR
    stride = stride_fraction * width

    windows = []
    start = first_ts
    while True:
        end = start + width
        inside = tuple(
            r for r in members if start <= corpus.records[r].timestamp < end
        )
        if inside:
            windows.append(
                SubtopicWindow(topic_id=topic_id, start=start, end=end, record_ids=inside)
            )
        if end > last_ts:
            break
        start += stride
    return windows


def clip_chain_to_window(chain: Chain, window: SubtopicWindow) -> Optional[Chain]:
    """Subsequence of the chain inside the window; None when empty."""
    inside = set(window.record_ids)
    members = tuple(r for r in chain.record_ids if r in inside)
    if not members:
        return None
    return Chain(chain.chain_id, members)


def clip_chains_to_window(chains: Iterable[Chain], window: SubtopicWindow) -> list[Chain]:
    clipped = []
    for chain in chains:
        part = clip_chain_to_window(chain, window)
        if part is not None:
            clipped.append(part)
    return clipped


# ---------------------------------------------------------------------------
# Chronological split
# ---------------------------------------------------------------------------

def chronological_split(corpus: Corpus, policy: SplitPolicy = SplitPolicy()) -> DataSplit:
    """Per-topic chronological split over all chains, implicit singletons included.

    Per topic, with chains ordered by start time (oldest first):
      n <= quota          -> everything is test
      n <  3 * quota      -> equal thirds, test takes the most recent
      otherwise           -> 80/10/10, test takes the most recent
    """
    if corpus.gold_chains is None or not corpus.gold_chains:
        raise ValidationError("chronological split requires gold chains")
    train: list[str] = []
    dev: list[str] = []
    test: list[str] = []
    for topic_id in sorted(corpus.topics):
        chains = corpus.effective_chains(topic_id)
        chains.sort(key=lambda c: (corpus.chain_start(c), c.chain_id))
        ids = [c.chain_id for c in chains]
        n = len(ids)
        if n <= policy.test_quota:
            test.extend(ids)
            continue
        if n < 3 * policy.test_quota:
            n_dev = n_test = n // 3
        else:
            n_dev = n_test = n // 10
        n_train = n - n_dev - n_test
        train.extend(ids[:n_train])
        dev.extend(ids[n_train:n_train + n_dev])
        test.extend(ids[n_train + n_dev:])
    return DataSplit(train=tuple(train), dev=tuple(dev), test=tuple(test))


def split_members(corpus: Corpus, split: DataSplit) -> dict[str, tuple[list[Chain], set[str]]]:
    """Resolve manifest chain ids to (chains, member record ids) per part."""
    out = {}
    for part, chain_ids in (("train", split.train), ("dev", split.dev), ("test", split.test)):
        chains = [corpus.resolve_chain(cid) for cid in chain_ids]
        members = {rid for chain in chains for rid in chain.record_ids}
        out[part] = (chains, members)
    return out
