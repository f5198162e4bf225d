"""Text encoders producing joint pair encodings and single-record encodings.

Two backends share one interface: a deterministic hash-based builtin encoder
(desk-scale stand-in, no model download) and an HTTP client for the remote
encoder service. Both emit a joint summary vector plus per-token vectors for
each record; the summary of a pair plays the role of the sequence-start token
of a cross-encoder.
"""

from __future__ import annotations

import hashlib
import re
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
import requests

from .corpus import Record
from .errors import ConfigError, RemoteEncoderError, ValidationError

_WORD_RE = re.compile(r"\w+", re.UNICODE)

DEFAULT_DIM = 256
DEFAULT_MAX_TOKENS = 512


@dataclass(frozen=True)
class EncoderConfig:
    backend: str = "builtin"  # "builtin" | "remote"
    dim: int = DEFAULT_DIM
    max_tokens: int = DEFAULT_MAX_TOKENS
    remote_url: Optional[str] = None
    per_record_budget: Optional[int] = None
    seed: int = 0
    timeout_s: float = 30.0
    retries: int = 2

    def budget(self) -> int:
        # One sequence-start and two separator positions must fit.
        budget = self.per_record_budget
        if budget is None:
            budget = (self.max_tokens - 3) // 2
        if budget < 1 or 2 * budget + 3 > self.max_tokens:
            raise ConfigError(
                f"per-record budget {budget} does not fit max_tokens {self.max_tokens}"
            )
        return budget

    def validate(self) -> None:
        if self.backend not in ("builtin", "remote"):
            raise ConfigError(f"unknown encoder backend {self.backend!r}")
        if self.dim < 16:
            raise ConfigError("encoder dim must be >= 16")
        self.budget()
        if self.backend == "remote" and not self.remote_url:
            raise ConfigError("remote backend requires remote_url")


@dataclass(frozen=True)
class PairEncoding:
    cls_vector: np.ndarray          # (dim,) joint summary of both records
    tokens_a: np.ndarray            # (n_a, dim)
    tokens_b: np.ndarray            # (n_b, dim)
    truncated_a: bool
    truncated_b: bool


@dataclass(frozen=True)
class SingleEncoding:
    summary_vector: np.ndarray      # (dim,)
    tokens: np.ndarray              # (n, dim)


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens at Unicode word boundaries."""
    return _WORD_RE.findall(text.lower())


@lru_cache(maxsize=262144)
def _token_vector(token: str, dim: int, seed: int) -> np.ndarray:
    digest = hashlib.blake2b(f"{seed}\x1f{token}".encode("utf-8"), digest_size=8).digest()
    rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest, "little")))
    vec = rng.standard_normal(dim)
    vec /= np.linalg.norm(vec)
    vec.flags.writeable = False
    return vec


def builtin_token_vectors(text: str, dim: int, seed: int = 0) -> np.ndarray:
    """One unit-norm row per token; identical tokens map to identical rows."""
    if dim < 16:
        raise ConfigError("builtin encoder requires dim >= 16")
    tokens = tokenize(text)
    if not tokens:
        raise ValidationError(f"text has no tokens after normalization: {text!r}")
    return np.stack([_token_vector(t, dim, seed) for t in tokens])


@lru_cache(maxsize=16384)
def _text_matrix(text: str, dim: int, seed: int, budget: int) -> tuple[np.ndarray, bool]:
    """Budget-truncated token matrix, cached so that the many pairs touching
    one record share a single read-only array."""
    rows = builtin_token_vectors(text, dim, seed)
    truncated = rows.shape[0] > budget
    if truncated:
        rows = rows[:budget]
    rows = np.ascontiguousarray(rows)
    rows.flags.writeable = False
    return rows, truncated


def builtin_cls_vector(tokens_a: np.ndarray, tokens_b: np.ndarray) -> np.ndarray:
    """Joint summary: mean_a + mean_b + 2 * (mean_a * mean_b), unit-normalized.

    The interaction term reacts to lexical overlap, mimicking the joint signal
    a cross-encoder would contribute.
    """
    mean_a = tokens_a.mean(axis=0)
    mean_b = tokens_b.mean(axis=0)
    joint = mean_a + mean_b + 2.0 * (mean_a * mean_b)
    norm = np.linalg.norm(joint)
    if norm == 0.0:
        return joint
    return joint / norm


def attention_pool(tokens: np.ndarray, attention_vector: np.ndarray) -> np.ndarray:
    pooled, _ = attention_pool_with_weights(tokens, attention_vector)
    return pooled


def attention_pool_with_weights(
    tokens: np.ndarray, attention_vector: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Softmax-weighted mean of token rows; weights scored by one trained vector."""
    scores = tokens @ attention_vector
    scores = scores - scores.max()  # max-subtraction for stability
    weights = np.exp(scores)
    weights /= weights.sum()
    return weights @ tokens, weights


def attention_pool_backward(
    tokens: np.ndarray, weights: np.ndarray, upstream: np.ndarray
) -> np.ndarray:
    """Gradient of the pooled vector w.r.t. the attention vector.

    tokens are treated as constants (the encoder is frozen); only the scoring
    vector receives gradient through the softmax.
    """
    g_alpha = tokens @ upstream                       # dL/d alpha_k
    g_scores = weights * (g_alpha - weights @ g_alpha)  # softmax Jacobian
    return tokens.T @ g_scores


class BuiltinEncoder:
    """Deterministic, dependency-free encoder over hashed token vectors."""

    backend = "builtin"

    def __init__(self, config: EncoderConfig):
        config.validate()
        self.config = config
        self.dim = config.dim
        self.model_id = f"builtin-hash-v1:d{config.dim}:s{config.seed}"

    def fingerprint(self) -> dict:
        return {"backend": self.backend, "dim": self.dim, "model_id": self.model_id}

    def _record_tokens(self, record: Record) -> tuple[np.ndarray, bool]:
        return _text_matrix(record.text, self.dim, self.config.seed, self.config.budget())

    def encode_pair(self, a: Record, b: Record) -> PairEncoding:
        tokens_a, trunc_a = self._record_tokens(a)
        tokens_b, trunc_b = self._record_tokens(b)
        return PairEncoding(
            cls_vector=builtin_cls_vector(tokens_a, tokens_b),
            tokens_a=tokens_a,
            tokens_b=tokens_b,
            truncated_a=trunc_a,
            truncated_b=trunc_b,
        )

    def encode_single(self, record: Record) -> SingleEncoding:
        tokens, _ = self._record_tokens(record)
        summary = tokens.mean(axis=0)
        norm = np.linalg.norm(summary)
        if norm > 0.0:
            summary = summary / norm
        return SingleEncoding(summary_vector=summary, tokens=tokens)


class RemoteEncoder:
    """Client for the encoder-service wire protocol (see README)."""

    backend = "remote"

    def __init__(self, config: EncoderConfig, session: Optional[requests.Session] = None):
        config.validate()
        if config.backend != "remote":
            raise ConfigError("RemoteEncoder requires backend='remote'")
        self.config = config
        self.dim = config.dim
        self.base_url = config.remote_url.rstrip("/")
        self.session = session or requests.Session()
        self.model_id = self._health()["model_id"]

    def fingerprint(self) -> dict:
        return {"backend": self.backend, "dim": self.dim, "model_id": self.model_id}

    def _health(self) -> dict:
        return self._request("GET", "/v1/health", None)

    def _request(self, method: str, path: str, body: Optional[dict]) -> dict:
        url = self.base_url + path
        last_exc: Optional[Exception] = None
        for attempt in range(self.config.retries + 1):
            try:
                resp = self.session.request(
                    method, url, json=body, timeout=self.config.timeout_s
                )
            except requests.RequestException as exc:
                last_exc = exc
                if attempt < self.config.retries:
                    time.sleep(0.2 * (attempt + 1))
                continue
            if resp.status_code >= 500:
                last_exc = RemoteEncoderError(f"{url}: HTTP {resp.status_code}")
                if attempt < self.config.retries:
                    time.sleep(0.2 * (attempt + 1))
                continue
            if resp.status_code != 200:
                raise RemoteEncoderError(f"{url}: HTTP {resp.status_code}: {resp.text[:200]}")
            return resp.json()
        raise RemoteEncoderError(f"{url}: unreachable after retries: {last_exc}")

    def _check_dim(self, reported: int) -> None:
        if reported != self.dim:
            raise RemoteEncoderError(
                f"remote dim {reported} does not match configured dim {self.dim}"
            )

    def encode_pair(self, a: Record, b: Record) -> PairEncoding:
        if not a.text.strip() or not b.text.strip():
            raise ValidationError("encode_pair requires non-empty texts")
        payload = {"text_a": a.text, "text_b": b.text, "max_tokens": self.config.max_tokens}
        obj = self._request("POST", "/v1/encode-pair", payload)
        self._check_dim(int(obj["dim"]))
        return PairEncoding(
            cls_vector=np.asarray(obj["cls"], dtype=float),
            tokens_a=np.asarray(obj["tokens_a"], dtype=float),
            tokens_b=np.asarray(obj["tokens_b"], dtype=float),
            truncated_a=bool(obj["truncated_a"]),
            truncated_b=bool(obj["truncated_b"]),
        )

    def encode_single(self, record: Record) -> SingleEncoding:
        if not record.text.strip():
            raise ValidationError("encode_single requires non-empty text")
        payload = {"text": record.text, "max_tokens": self.config.max_tokens}
        obj = self._request("POST", "/v1/encode-single", payload)
        self._check_dim(int(obj["dim"]))
        return SingleEncoding(
            summary_vector=np.asarray(obj["summary"], dtype=float),
            tokens=np.asarray(obj["tokens"], dtype=float),
        )


def make_encoder(config: EncoderConfig):
    config.validate()
    if config.backend == "builtin":
        return BuiltinEncoder(config)
    return RemoteEncoder(config)
