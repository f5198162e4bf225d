"""Deterministic synthetic shift-log generator.

Produces corpora whose structure matches real plant logs: mostly singleton
records, multi-record chains with a truncated-geometric size distribution
(mean 2.72 conditioned on size >= 2), heavily right-skewed between-record
gaps with quartiles near (2.0, 21.0, 111.7) hours, FL machinery codes, and
8-hour shift documents. Chain members share content tokens and FL prefixes
with probability signal_strength, which plants a learnable link signal.

No single log-normal matches all three gap quartiles (the upper and lower
quartile ratios differ), so gaps use a two-sided log-normal: one spread below
the median, another above, hitting the three targets exactly in distribution.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import norm

from .corpus import Chain, Corpus, Record, SECONDS_PER_HOUR
from .errors import ConfigError, ValidationError

_Z75 = float(norm.ppf(0.75))

SHIFT_HOURS = 8.0

# Domain-flavored token pools; the encoder is lexical, so these only need to
# look like plant vocabulary, not read like it.
EQUIPMENT = (
    "pumpe ventil kessel motor filter kolonne reaktor ruehrwerk verdichter "
    "waermetauscher behaelter leitung dosierung brenner geblaese abscheider"
).split()
ACTIONS = (
    "geprueft gereinigt getauscht angefahren abgestellt entleert gespuelt "
    "nachgefuellt kalibriert entlueftet abgedichtet gemessen quittiert "
    "gemeldet beobachtet justiert"
).split()
QUALIFIERS = (
    "druck temperatur fuellstand durchfluss leckage vibration stoerung alarm "
    "probe charge dichtung lager anzeige regler sollwert messwert"
).split()

_THEME_SIZE = 6
_MISSING_FL_PROB = 0.08
_SEGMENT_LETTERS = "ABCDEFGHKLMN"


@dataclass(frozen=True)
class SynthSpec:
    n_topics: int = 3
    chains_per_topic: int = 400
    singleton_fraction: float = 0.89
    mean_chain_size: float = 2.72
    gap_quartiles_hours: tuple[float, float, float] = (2.0, 21.0, 111.7)
    vocabulary_size: int = 400
    fl_depth: int = 3
    signal_strength: float = 0.9
    horizon_hours: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.n_topics < 1 or self.chains_per_topic < 1:
            raise ConfigError("n_topics and chains_per_topic must be >= 1")
        if not (0.0 <= self.singleton_fraction < 1.0):
            raise ConfigError(
                "singleton_fraction must be in [0, 1); 1 would leave no "
                "multi-record chains to link"
            )
        if self.mean_chain_size <= 2.0:
            raise ConfigError("mean_chain_size must exceed 2 (sizes start at 2)")
        q1, q2, q3 = self.gap_quartiles_hours
        if not (0 < q1 < q2 < q3):
            raise ConfigError("gap quartiles must be positive and increasing")
        if self.vocabulary_size < 4 * _THEME_SIZE:
            raise ConfigError(f"vocabulary_size must be >= {4 * _THEME_SIZE}")
        if self.fl_depth < 2:
            raise ConfigError("fl_depth must be >= 2 (prefix plus leaf)")
        if not (0.0 <= self.signal_strength <= 1.0):
            raise ConfigError("signal_strength must be in [0, 1]")
        if self.horizon_hours is not None and self.horizon_hours <= 0:
            raise ConfigError("horizon_hours must be positive")

    @property
    def effective_horizon_hours(self) -> float:
        if self.horizon_hours is not None:
            return self.horizon_hours
        return 12.0 * self.chains_per_topic

    @staticmethod
    def from_dict(obj: dict) -> "SynthSpec":
        known = set(SynthSpec.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown synth spec keys: {sorted(unknown)}")
        if "gap_quartiles_hours" in obj:
            obj = dict(obj)
            obj["gap_quartiles_hours"] = tuple(obj["gap_quartiles_hours"])
        return SynthSpec(**obj)


def _derive_seed(*parts) -> int:
    payload = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def sample_gap_hours(rng: np.random.Generator, quartiles: tuple[float, float, float]) -> float:
    """Two-sided log-normal whose quartiles equal the targets exactly.

    A standard normal draw z is scaled by a side-dependent slope before
    exponentiation: the slope below the median maps z = -z75 onto q1, the one
    above maps z = +z75 onto q3.
    """
    q1, q2, q3 = quartiles
    z = rng.standard_normal()
    slope = np.log(q2 / q1) / _Z75 if z < 0 else np.log(q3 / q2) / _Z75
    return max(float(q2 * np.exp(slope * z)), 0.02)


def _chain_size(rng: np.random.Generator, mean_size: float) -> int:
    # size = 2 + (geometric - 1); mean 2 + (1-p)/p = mean_size
    p = 1.0 / (mean_size - 1.0)
    return 2 + int(rng.geometric(p)) - 1


def _build_vocabulary(size: int, rng: np.random.Generator) -> list[str]:
    vocab = list(EQUIPMENT) + list(ACTIONS) + list(QUALIFIERS)
    nxt = 0
    while len(vocab) < size:
        vocab.append(f"teil{nxt:03d}")
        nxt += 1
    vocab = vocab[:size]
    rng.shuffle(vocab)
    return vocab


def _random_segment(rng: np.random.Generator) -> str:
    letter = _SEGMENT_LETTERS[int(rng.integers(len(_SEGMENT_LETTERS)))]
    return f"{letter}{int(rng.integers(10))}"


def _sibling_code(prefix: list[str], rng: np.random.Generator) -> str:
    return "-".join(prefix + [_random_segment(rng)])


def _record_text(
    rng: np.random.Generator,
    vocab: list[str],
    theme: Optional[list[str]],
    share_theme: bool,
) -> str:
    length = int(rng.integers(5, 11))
    tokens: list[str] = []
    if theme is not None and share_theme:
        # the full theme, so any two sharing chain-mates overlap strongly
        tokens.extend(theme)
    while len(tokens) < length:
        tokens.append(vocab[int(rng.integers(len(vocab)))])
    order = rng.permutation(len(tokens))
    return " ".join(tokens[i] for i in order)


@dataclass
class _TopicState:
    records: list[Record] = field(default_factory=list)
    chains: list[Chain] = field(default_factory=list)


def _document_id(topic_id: str, timestamp: float) -> str:
    shift = int(timestamp // (SHIFT_HOURS * SECONDS_PER_HOUR))
    return f"{topic_id}-s{shift:06d}"


def _generate_topic(spec: SynthSpec, topic_index: int) -> _TopicState:
    topic_id = f"T{topic_index:02d}"
    rng = np.random.Generator(np.random.PCG64(_derive_seed(spec.seed, "topic", topic_index)))
    vocab = _build_vocabulary(spec.vocabulary_size, rng)
    horizon_s = spec.effective_horizon_hours * SECONDS_PER_HOUR
    state = _TopicState()
    rec_counter = 0
    chain_counter = 0

    for _ in range(spec.chains_per_topic):
        is_singleton = rng.random() < spec.singleton_fraction
        size = 1 if is_singleton else _chain_size(rng, spec.mean_chain_size)
        start = float(np.floor(rng.random() * horizon_s))
        prefix = [_random_segment(rng) for _ in range(spec.fl_depth - 1)]
        chain_code = _sibling_code(prefix, rng)
        theme_idx = rng.choice(len(vocab), size=_THEME_SIZE, replace=False)
        theme = [vocab[i] for i in theme_idx]

        member_ids = []
        ts = start
        for pos in range(size):
            if pos > 0:
                ts += round(sample_gap_hours(rng, spec.gap_quartiles_hours) * SECONDS_PER_HOUR)
            rid = f"{topic_id}-r{rec_counter:06d}"
            rec_counter += 1
            if is_singleton:
                fl_code = None if rng.random() < _MISSING_FL_PROB else _sibling_code(prefix, rng)
                text = _record_text(rng, vocab, None, False)
            else:
                shared = rng.random() < spec.signal_strength
                fl_code = chain_code if shared else _sibling_code(prefix, rng)
                text = _record_text(rng, vocab, theme, shared)
            state.records.append(
                Record(
                    record_id=rid,
                    topic_id=topic_id,
                    document_id=_document_id(topic_id, ts),
                    timestamp=ts,
                    text=text,
                    fl_code=fl_code,
                )
            )
            member_ids.append(rid)
        if not is_singleton:
            state.chains.append(Chain(f"{topic_id}-c{chain_counter:04d}", tuple(member_ids)))
            chain_counter += 1
    return state


def generate(spec: SynthSpec) -> Corpus:
    """Synthetic corpus with gold chains; byte-stable for a fixed spec."""
    records: list[Record] = []
    chains: list[Chain] = []
    for topic_index in range(spec.n_topics):
        state = _generate_topic(spec, topic_index)
        records.extend(state.records)
        chains.extend(state.chains)
    if not records:
        raise ValidationError("generated corpus is empty")
    return Corpus(records, chains)


def oracle_scores(
    corpus: Corpus, max_gap_hours: Optional[float] = None
) -> dict[tuple[str, str], float]:
    """Perfect pair scores: 1.0 on gold-adjacent forward pairs, 0.0 on every
    other same-chain forward pair. With max_gap_hours set, the map is instead
    restricted to forward pairs within the gap (so it always satisfies the
    clustering precondition), with every non-chain candidate an explicit 0.0."""
    if corpus.gold_chains is None:
        raise ValidationError("oracle scores require gold chains")
    max_gap = None if max_gap_hours is None else max_gap_hours * SECONDS_PER_HOUR

    def within(a: str, b: str) -> bool:
        if max_gap is None:
            return True
        return corpus.records[b].timestamp - corpus.records[a].timestamp <= max_gap

    scores: dict[tuple[str, str], float] = {}
    if max_gap is not None:
        for topic_id in sorted(corpus.topics):
            ids = corpus.topics[topic_id]
            for i, a in enumerate(ids):
                for b in ids[i + 1:]:
                    if not within(a, b):
                        break
                    scores[(a, b)] = 0.0
    for chain in corpus.gold_chains:
        ids = chain.record_ids
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                if within(ids[i], ids[j]):
                    scores[(ids[i], ids[j])] = 1.0 if j == i + 1 else 0.0
    return scores
