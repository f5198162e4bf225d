"""Record-pair scorer: feature assembly, FFNN, training, thresholds, scoring.

The pair feature concatenates a joint summary vector, attention-pooled vectors
of each record, their elementwise product, and an FL-code bin embedding; a
two-hidden-layer ReLU network with a sigmoid output turns it into a link
probability. Three architecture modes reuse the same network over different
feature blocks:

  cdcr  [joint, pooled_a, pooled_b, pooled_a * pooled_b, fl?]   width 4*dim (+fl)
  nli   [joint, fl?]                                            width dim (+fl)
  sts   [summary_a, summary_b, summary_a * summary_b, fl?]      width 3*dim (+fl)

The text encoder is frozen; trainables are the FFNN, the attention-pooling
vector (cdcr only), and the FL bin-embedding table (when enabled). Everything
is float64 numpy and deterministic for a fixed seed.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .corpus import Corpus, Record, SubtopicWindow
from .encoding import attention_pool_backward, attention_pool_with_weights
from .errors import ConfigError, DivergenceError, ValidationError
from .flsim import FlConfig, FlEmbeddingTable, fl_bin, fl_similarity
from .metrics import binary_prf
from .pairgen import LabeledPair, candidate_pairs_for_inference

PROB_CLAMP = 1e-7

MODES = ("cdcr", "nli", "sts")


@dataclass(frozen=True)
class ArchMode:
    mode: str
    use_fl: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown arch mode {self.mode!r}")

    def feature_width(self, dim: int, embed_dim: int) -> int:
        base = {"cdcr": 4 * dim, "nli": dim, "sts": 3 * dim}[self.mode]
        return base + (embed_dim if self.use_fl else 0)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 5e-5
    weight_decay: float = 0.1
    epsilon: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    epochs: int = 5
    batch_size: int = 32
    seed: int = 0
    hidden: tuple[int, int] = (1024, 1024)

    def __post_init__(self):
        if self.learning_rate < 0 or self.weight_decay < 0:
            raise ConfigError("learning_rate and weight_decay must be >= 0")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be >= 1")
        if min(self.hidden) < 1:
            raise ConfigError("hidden widths must be >= 1")


@dataclass
class ScorerParams:
    """Trainable parameters. attention_vector is live only in cdcr mode,
    fl is live only when the arch enables the FL feature."""

    attention_vector: np.ndarray
    fl: Optional[FlEmbeddingTable]
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray

    @property
    def dim(self) -> int:
        return self.attention_vector.shape[0]

    @property
    def in_dim(self) -> int:
        return self.w1.shape[0]

    def trainable_tensors(self, arch: ArchMode) -> dict[str, np.ndarray]:
        tensors = {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2,
                   "w3": self.w3, "b3": self.b3}
        if arch.mode == "cdcr":
            tensors["attention_vector"] = self.attention_vector
        if arch.use_fl:
            if self.fl is None:
                raise ConfigError("arch enables FL but params carry no FL table")
            tensors["fl_table"] = self.fl.table
        return tensors

    def copy(self) -> "ScorerParams":
        return ScorerParams(
            attention_vector=self.attention_vector.copy(),
            fl=None if self.fl is None else FlEmbeddingTable(self.fl.table.copy()),
            w1=self.w1.copy(), b1=self.b1.copy(),
            w2=self.w2.copy(), b2=self.b2.copy(),
            w3=self.w3.copy(), b3=self.b3.copy(),
        )


def init_params(
    arch: ArchMode,
    dim: int,
    fl_config: FlConfig,
    rng: np.random.Generator,
    hidden: tuple[int, int] = (1024, 1024),
) -> ScorerParams:
    """He-scaled FFNN weights, zero attention vector (plain mean pooling at
    start), small uniform FL embedding rows."""
    in_dim = arch.feature_width(dim, fl_config.embed_dim)
    h1, h2 = hidden
    w1 = rng.standard_normal((in_dim, h1)) * np.sqrt(2.0 / in_dim)
    w2 = rng.standard_normal((h1, h2)) * np.sqrt(2.0 / h1)
    w3 = rng.standard_normal((h2,)) * np.sqrt(2.0 / h2)
    fl = FlEmbeddingTable.initialize(fl_config, rng) if arch.use_fl else None
    return ScorerParams(
        attention_vector=np.zeros(dim),
        fl=fl,
        w1=w1, b1=np.zeros(h1),
        w2=w2, b2=np.zeros(h2),
        w3=w3, b3=np.zeros(1),
    )


# ---------------------------------------------------------------------------
# Pair examples: frozen encoder outputs plus label and FL bin
# ---------------------------------------------------------------------------

@dataclass
class PairExample:
    a: str
    b: str
    label: float
    fl_bin: Optional[int]
    cls: Optional[np.ndarray] = None        # cdcr, nli
    tokens_a: Optional[np.ndarray] = None   # cdcr
    tokens_b: Optional[np.ndarray] = None
    summary_a: Optional[np.ndarray] = None  # sts
    summary_b: Optional[np.ndarray] = None


def build_pair_example(
    arch: ArchMode,
    encoder,
    records: Mapping[str, Record],
    a_id: str,
    b_id: str,
    label: float,
    n_bins: int,
) -> PairExample:
    rec_a, rec_b = records[a_id], records[b_id]
    bin_index = None
    if arch.use_fl:
        bin_index = fl_bin(fl_similarity(rec_a.fl_code, rec_b.fl_code), n_bins)
    example = PairExample(a=a_id, b=b_id, label=float(label), fl_bin=bin_index)
    if arch.mode in ("cdcr", "nli"):
        enc = encoder.encode_pair(rec_a, rec_b)
        example.cls = enc.cls_vector
        if arch.mode == "cdcr":
            example.tokens_a = enc.tokens_a
            example.tokens_b = enc.tokens_b
    else:
        example.summary_a = encoder.encode_single(rec_a).summary_vector
        example.summary_b = encoder.encode_single(rec_b).summary_vector
    return example


@dataclass
class _BatchCache:
    features: np.ndarray
    pooled_a: Optional[np.ndarray] = None
    pooled_b: Optional[np.ndarray] = None
    weights_a: Optional[list] = None
    weights_b: Optional[list] = None


def assemble_batch(
    arch: ArchMode, params: ScorerParams, examples: Sequence[PairExample]
) -> _BatchCache:
    """Feature matrix for a batch, keeping the pooling intermediates needed
    for the backward pass."""
    n = len(examples)
    dim = params.dim
    if arch.use_fl and params.fl is None:
        raise ConfigError("arch enables FL but params carry no FL table")
    fl_width = params.fl.table.shape[1] if arch.use_fl else 0
    features = np.zeros((n, arch.feature_width(dim, fl_width)))
    cache = _BatchCache(features=features)
    if arch.mode == "cdcr":
        cache.pooled_a = np.zeros((n, dim))
        cache.pooled_b = np.zeros((n, dim))
        cache.weights_a = [None] * n
        cache.weights_b = [None] * n
    for i, ex in enumerate(examples):
        blocks = []
        if arch.mode == "cdcr":
            m_a, w_a = attention_pool_with_weights(ex.tokens_a, params.attention_vector)
            m_b, w_b = attention_pool_with_weights(ex.tokens_b, params.attention_vector)
            cache.pooled_a[i] = m_a
            cache.pooled_b[i] = m_b
            cache.weights_a[i] = w_a
            cache.weights_b[i] = w_b
            blocks = [ex.cls, m_a, m_b, m_a * m_b]
        elif arch.mode == "nli":
            blocks = [ex.cls]
        else:
            blocks = [ex.summary_a, ex.summary_b, ex.summary_a * ex.summary_b]
        if arch.use_fl:
            blocks.append(params.fl.table[ex.fl_bin])
        features[i] = np.concatenate(blocks)
    return cache


def assemble_features(
    arch: ArchMode, params: ScorerParams, example: PairExample
) -> np.ndarray:
    return assemble_batch(arch, params, [example]).features[0]


# ---------------------------------------------------------------------------
# Forward, loss, backward
# ---------------------------------------------------------------------------

def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class _ForwardCache:
    x: np.ndarray
    z1: np.ndarray
    a1: np.ndarray
    z2: np.ndarray
    a2: np.ndarray
    probs: np.ndarray


def _forward_full(params: ScorerParams, features: np.ndarray) -> _ForwardCache:
    x = np.atleast_2d(features)
    z1 = x @ params.w1 + params.b1
    a1 = np.maximum(z1, 0.0)
    z2 = a1 @ params.w2 + params.b2
    a2 = np.maximum(z2, 0.0)
    z3 = a2 @ params.w3 + params.b3[0]
    probs = _sigmoid(z3)
    if not np.all(np.isfinite(probs)):
        raise DivergenceError("non-finite activations in scorer forward pass")
    return _ForwardCache(x=x, z1=z1, a1=a1, z2=z2, a2=a2, probs=probs)


def forward(params: ScorerParams, features: np.ndarray) -> np.ndarray:
    """Link probability for each feature row."""
    return _forward_full(params, features).probs


def bce_loss(predictions: np.ndarray, labels: np.ndarray) -> float:
    """Two-term binary cross-entropy, mean over the batch; probabilities are
    clamped away from 0 and 1 before the logs."""
    predictions = np.asarray(predictions, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if predictions.size == 0 or predictions.shape != labels.shape:
        raise ValidationError("bce_loss requires aligned, non-empty inputs")
    p = np.clip(predictions, PROB_CLAMP, 1.0 - PROB_CLAMP)
    return float(-np.mean(labels * np.log(p) + (1.0 - labels) * np.log(1.0 - p)))


@dataclass
class Grads:
    tensors: dict[str, np.ndarray] = field(default_factory=dict)


def backward(
    arch: ArchMode,
    params: ScorerParams,
    examples: Sequence[PairExample],
    cache: Optional[_BatchCache] = None,
) -> tuple[float, np.ndarray, Grads]:
    """Loss, probabilities, and exact gradients for one batch.

    Encoder outputs are constants; gradient reaches the FFNN, the FL rows the
    batch touched, and (cdcr) the attention vector through both the pooled
    blocks and the product block.
    """
    if cache is None:
        cache = assemble_batch(arch, params, examples)
    fwd = _forward_full(params, cache.features)
    labels = np.array([ex.label for ex in examples], dtype=float)
    loss = bce_loss(fwd.probs, labels)
    n = len(examples)

    dz3 = (fwd.probs - labels) / n                      # (B,)
    grads = Grads()
    grads.tensors["w3"] = fwd.a2.T @ dz3
    grads.tensors["b3"] = np.array([dz3.sum()])
    da2 = np.outer(dz3, params.w3)
    dz2 = da2 * (fwd.z2 > 0.0)
    grads.tensors["w2"] = fwd.a1.T @ dz2
    grads.tensors["b2"] = dz2.sum(axis=0)
    da1 = dz2 @ params.w2.T
    dz1 = da1 * (fwd.z1 > 0.0)
    grads.tensors["w1"] = fwd.x.T @ dz1
    grads.tensors["b1"] = dz1.sum(axis=0)
    dx = dz1 @ params.w1.T

    dim = params.dim
    if arch.use_fl:
        fl_grad = np.zeros_like(params.fl.table)
        fl_slice = dx[:, -params.fl.table.shape[1]:]
        for i, ex in enumerate(examples):
            fl_grad[ex.fl_bin] += fl_slice[i]
        grads.tensors["fl_table"] = fl_grad
    if arch.mode == "cdcr":
        d_att = np.zeros(dim)
        d_ma = dx[:, dim:2 * dim] + dx[:, 3 * dim:4 * dim] * cache.pooled_b
        d_mb = dx[:, 2 * dim:3 * dim] + dx[:, 3 * dim:4 * dim] * cache.pooled_a
        for i, ex in enumerate(examples):
            d_att += attention_pool_backward(ex.tokens_a, cache.weights_a[i], d_ma[i])
            d_att += attention_pool_backward(ex.tokens_b, cache.weights_b[i], d_mb[i])
        grads.tensors["attention_vector"] = d_att
    return loss, fwd.probs, grads


class AdamW:
    """Adaptive moments with decoupled weight decay:
    param <- param - lr * (bias-corrected step + weight_decay * param)."""

    def __init__(self, config: TrainConfig):
        self.config = config
        self.t = 0
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}

    def step(self, tensors: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        cfg = self.config
        self.t += 1
        bc1 = 1.0 - cfg.beta1 ** self.t
        bc2 = 1.0 - cfg.beta2 ** self.t
        for name, tensor in tensors.items():
            g = grads[name]
            m = self._m.setdefault(name, np.zeros_like(tensor))
            v = self._v.setdefault(name, np.zeros_like(tensor))
            m += (1.0 - cfg.beta1) * (g - m)
            v += (1.0 - cfg.beta2) * (g * g - v)
            step = (m / bc1) / (np.sqrt(v / bc2) + cfg.epsilon)
            tensor -= cfg.learning_rate * (step + cfg.weight_decay * tensor)


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------

CHECKPOINT_MAGIC = b"SLCKPT1\n"
CHECKPOINT_VERSION = 1


@dataclass
class Checkpoint:
    params: ScorerParams
    arch: ArchMode
    fingerprint: dict
    dev_loss: float
    epoch: int


def save_checkpoint(checkpoint: Checkpoint, path) -> None:
    """Self-describing binary container; byte-deterministic for equal content."""
    tensors = {
        "attention_vector": checkpoint.params.attention_vector,
        "w1": checkpoint.params.w1, "b1": checkpoint.params.b1,
        "w2": checkpoint.params.w2, "b2": checkpoint.params.b2,
        "w3": checkpoint.params.w3, "b3": checkpoint.params.b3,
    }
    if checkpoint.params.fl is not None:
        tensors["fl_table"] = checkpoint.params.fl.table
    names = sorted(tensors)
    header = {
        "version": CHECKPOINT_VERSION,
        "arch": {"mode": checkpoint.arch.mode, "use_fl": checkpoint.arch.use_fl},
        "fingerprint": checkpoint.fingerprint,
        "dev_loss": checkpoint.dev_loss,
        "epoch": checkpoint.epoch,
        "tensors": [
            {"name": n, "shape": list(tensors[n].shape), "dtype": "float64"}
            for n in names
        ],
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(CHECKPOINT_MAGIC)
        handle.write(struct.pack("<Q", len(blob)))
        handle.write(blob)
        for name in names:
            handle.write(np.ascontiguousarray(tensors[name], dtype="<f8").tobytes())


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as handle:
        magic = handle.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise ValidationError(f"{path}: not a scorer checkpoint")
        (header_len,) = struct.unpack("<Q", handle.read(8))
        header = json.loads(handle.read(header_len).decode("utf-8"))
        if header.get("version") != CHECKPOINT_VERSION:
            raise ValidationError(f"{path}: unsupported checkpoint version")
        tensors = {}
        for spec in header["tensors"]:
            shape = tuple(spec["shape"])
            count = int(np.prod(shape)) if shape else 1
            raw = handle.read(8 * count)
            tensors[spec["name"]] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
    fl = FlEmbeddingTable(tensors["fl_table"]) if "fl_table" in tensors else None
    params = ScorerParams(
        attention_vector=tensors["attention_vector"], fl=fl,
        w1=tensors["w1"], b1=tensors["b1"],
        w2=tensors["w2"], b2=tensors["b2"],
        w3=tensors["w3"], b3=tensors["b3"],
    )
    arch = ArchMode(mode=header["arch"]["mode"], use_fl=header["arch"]["use_fl"])
    return Checkpoint(
        params=params, arch=arch, fingerprint=header["fingerprint"],
        dev_loss=header["dev_loss"], epoch=header["epoch"],
    )


def check_fingerprint(checkpoint: Checkpoint, encoder) -> None:
    actual = encoder.fingerprint()
    if actual != checkpoint.fingerprint:
        raise ConfigError(
            f"checkpoint fingerprint {checkpoint.fingerprint} does not match "
            f"encoder {actual}"
        )


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

@dataclass
class WindowPairs:
    window: SubtopicWindow
    pairs: list[LabeledPair]


def _derive_seed(*parts) -> int:
    payload = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def prepare_split_pairs(
    corpus: Corpus,
    part_chains: Sequence,
    part_members: set[str],
    part: str,
    sampling,
    stats_by_topic: Mapping[str, object],
    stride_fraction: float = 0.5,
) -> list[WindowPairs]:
    """Window one split part and sample labeled pairs per window.

    Window sizes come from full-corpus statistics so train/dev/test see the
    same geometry. Windows whose clipped chains are all singletons yield no
    positives and are skipped (the negative ratio is defined per positive).
    """
    from .corpus import build_windows, window_size_for_topic
    from .pairgen import SamplingConfig, enumerate_labeled_pairs, sample_pairs

    all_stats = [stats_by_topic[t] for t in sorted(stats_by_topic)]
    members_by_topic: dict[str, list[str]] = {}
    for rid in part_members:
        members_by_topic.setdefault(corpus.records[rid].topic_id, []).append(rid)

    out: list[WindowPairs] = []
    for topic_id in sorted(members_by_topic):
        width = window_size_for_topic(stats_by_topic[topic_id], all_stats)
        windows = build_windows(
            corpus, topic_id, width, stride_fraction,
            record_ids=members_by_topic[topic_id],
        )
        for window in windows:
            pairs = enumerate_labeled_pairs(window, part_chains)
            if not any(p.is_positive for p in pairs):
                continue
            window_cfg = SamplingConfig(
                train_neg_ratio=sampling.train_neg_ratio,
                dev_neg_ratio=sampling.dev_neg_ratio,
                seed=_derive_seed(sampling.seed, part, topic_id, f"{window.start:.6f}"),
            )
            sampled = sample_pairs(pairs, window_cfg, part)
            out.append(WindowPairs(window=window, pairs=sampled))
    return out


def examples_from_windows(
    window_pairs: Sequence[WindowPairs],
    arch: ArchMode,
    encoder,
    records: Mapping[str, Record],
    n_bins: int,
) -> list[PairExample]:
    return [
        build_pair_example(
            arch, encoder, records, p.a, p.b,
            1.0 if p.is_positive else 0.0, n_bins,
        )
        for wp in window_pairs
        for p in wp.pairs
    ]


@dataclass
class TrainResult:
    checkpoint: Checkpoint
    history: list[dict]


def train(
    corpus: Corpus,
    train_windows: Sequence[WindowPairs],
    dev_examples: Sequence[PairExample],
    arch: ArchMode,
    encoder,
    config: TrainConfig,
    fl_config: FlConfig,
) -> TrainResult:
    """Epochs over shuffled window-level batches; the checkpoint with the
    lowest dev loss wins (earlier epoch on ties)."""
    if not train_windows:
        raise ValidationError("training requires at least one window with pairs")
    if not dev_examples:
        raise ValidationError("training requires dev pairs")

    rng = np.random.Generator(np.random.PCG64(config.seed))
    params = init_params(arch, encoder.dim, fl_config, rng, hidden=config.hidden)
    optimizer = AdamW(config)

    examples_by_window: list[list[PairExample]] = []
    for wp in train_windows:
        examples_by_window.append([
            build_pair_example(
                arch, encoder, corpus.records, p.a, p.b,
                1.0 if p.is_positive else 0.0, fl_config.n_bins,
            )
            for p in wp.pairs
        ])

    dev_labels = np.array([ex.label for ex in dev_examples])
    best: Optional[Checkpoint] = None
    history = []
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(examples_by_window))
        stream = [ex for idx in order for ex in examples_by_window[idx]]
        epoch_loss = 0.0
        seen = 0
        for lo in range(0, len(stream), config.batch_size):
            batch = stream[lo:lo + config.batch_size]
            loss, _, grads = backward(arch, params, batch)
            if not np.isfinite(loss):
                raise DivergenceError(f"training loss diverged at epoch {epoch}")
            optimizer.step(params.trainable_tensors(arch), grads.tensors)
            epoch_loss += loss * len(batch)
            seen += len(batch)
        dev_probs = predict(arch, params, dev_examples)
        dev_loss = bce_loss(dev_probs, dev_labels)
        tau0 = select_threshold(dev_probs, dev_labels)
        _, _, dev_f1 = binary_prf(dev_probs.tolist(), dev_labels.tolist(), tau0)
        history.append({
            "epoch": epoch,
            "train_loss": epoch_loss / max(seen, 1),
            "dev_loss": dev_loss,
            "dev_f1": dev_f1,
            "dev_threshold": tau0,
        })
        if best is None or dev_loss < best.dev_loss:
            best = Checkpoint(
                params=params.copy(), arch=arch,
                fingerprint=encoder.fingerprint(),
                dev_loss=dev_loss, epoch=epoch,
            )
    return TrainResult(checkpoint=best, history=history)


def predict(
    arch: ArchMode, params: ScorerParams, examples: Sequence[PairExample],
    batch_size: int = 256,
) -> np.ndarray:
    probs = np.zeros(len(examples))
    for lo in range(0, len(examples), batch_size):
        chunk = examples[lo:lo + batch_size]
        cache = assemble_batch(arch, params, chunk)
        probs[lo:lo + len(chunk)] = forward(params, cache.features)
    return probs


def select_threshold(scores: Sequence[float], labels: Sequence[float]) -> float:
    """Sweep every distinct score as a cut point; return the lowest cut
    maximizing binary F1 (predicted positive means score >= cut)."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if scores.size == 0:
        raise ValidationError("threshold selection requires scores")
    if labels.min() == labels.max():
        raise ValidationError("threshold selection requires both classes in dev")
    best_tau = None
    best_f1 = -1.0
    for tau in sorted(set(scores.tolist())):
        pred = scores >= tau
        tp = float(np.sum(pred * labels))
        fp = float(np.sum(pred * (1.0 - labels)))
        fn = float(np.sum(~pred * labels))
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f1 = 0.0 if p + r == 0.0 else 2 * p * r / (p + r)
        if f1 > best_f1 + 1e-12:
            best_f1 = f1
            best_tau = tau
    return float(best_tau)


def score_matrix(
    checkpoint: Checkpoint,
    window: SubtopicWindow,
    records: Mapping[str, Record],
    encoder,
    max_gap_hours: float,
) -> dict[tuple[str, str], float]:
    """Scores for exactly the forward candidate pairs within the gap."""
    check_fingerprint(checkpoint, encoder)
    pairs = candidate_pairs_for_inference(window, records, max_gap_hours)
    if not pairs:
        return {}
    n_bins = checkpoint.params.fl.table.shape[0] if checkpoint.params.fl is not None else 2
    examples = [
        build_pair_example(checkpoint.arch, encoder, records, a, b, 0.0, n_bins)
        for a, b in pairs
    ]
    probs = predict(checkpoint.arch, checkpoint.params, examples)
    return {pair: float(p) for pair, p in zip(pairs, probs)}
