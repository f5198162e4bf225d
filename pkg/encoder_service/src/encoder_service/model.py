"""Mounted transformer model: tokenization, truncation, and last-layer vectors.

The joint encoding follows the cross-encoder convention: both texts share one
sequence "[CLS] <a> [SEP] <b> [SEP]" and the response partitions the last
hidden layer into the sequence-start summary and the two records' content
token rows. Special-token rows are never returned.
"""

from __future__ import annotations

import threading
from pathlib import Path

import torch
from transformers import AutoModel, AutoTokenizer

from .config import ServiceConfig, ServiceConfigError


class EmptyTextError(ValueError):
    """Request text empty or without any content token; maps to HTTP 400."""


class OversizeError(ValueError):
    """Requested budget cannot be honored even with truncation; maps to HTTP 413."""


class MountedModel:
    """One loaded model plus tokenizer; inference is serialized for determinism."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.tokenizer = AutoTokenizer.from_pretrained(config.model_path)
        self.model = AutoModel.from_pretrained(config.model_path)
        self.model.eval()
        self.model.to(config.device)
        torch.set_num_threads(1)
        self._lock = threading.Lock()

        self.dim = int(self.model.config.hidden_size)
        self.model_id = f"{Path(config.model_path).name}:d{self.dim}"
        self._wants_segments = "token_type_ids" in self.tokenizer.model_input_names

        max_positions = int(getattr(self.model.config, "max_position_embeddings", 0))
        if max_positions and config.max_tokens > max_positions:
            raise ServiceConfigError(
                f"max_tokens {config.max_tokens} exceeds the model's "
                f"position limit {max_positions}"
            )

    # -- request-level limits -------------------------------------------------

    def _cap(self, max_tokens: int) -> int:
        if max_tokens > self.config.max_tokens:
            raise OversizeError(
                f"requested max_tokens {max_tokens} exceeds the service "
                f"cap {self.config.max_tokens}"
            )
        return max_tokens

    def _content_ids(self, text: str, budget: int) -> tuple[list[int], bool]:
        if not text or not text.strip():
            raise EmptyTextError("text is empty")
        ids = self.tokenizer.encode(text, add_special_tokens=False)
        if not ids:
            raise EmptyTextError("text has no tokens after normalization")
        truncated = len(ids) > budget
        return ids[:budget], truncated

    def _forward(self, input_ids: list[int], segments: list[int]):
        kwargs = {
            "input_ids": torch.tensor([input_ids]),
            "attention_mask": torch.ones((1, len(input_ids)), dtype=torch.long),
        }
        if self._wants_segments:
            kwargs["token_type_ids"] = torch.tensor([segments])
        with self._lock, torch.no_grad():
            out = self.model(**{k: v.to(self.config.device) for k, v in kwargs.items()})
        return out.last_hidden_state[0].cpu().numpy()

    # -- endpoints' substance -------------------------------------------------

    def encode_pair(self, text_a: str, text_b: str, max_tokens: int) -> dict:
        budget = (self._cap(max_tokens) - 3) // 2  # [CLS] + two [SEP] positions
        if budget < 1:
            raise OversizeError(
                f"max_tokens {max_tokens} leaves no room for content tokens"
            )
        ids_a, trunc_a = self._content_ids(text_a, budget)
        ids_b, trunc_b = self._content_ids(text_b, budget)

        cls_id = self.tokenizer.cls_token_id
        sep_id = self.tokenizer.sep_token_id
        input_ids = [cls_id, *ids_a, sep_id, *ids_b, sep_id]
        segments = [0] * (len(ids_a) + 2) + [1] * (len(ids_b) + 1)
        hidden = self._forward(input_ids, segments)

        n_a, n_b = len(ids_a), len(ids_b)
        return {
            "dim": self.dim,
            "cls": hidden[0].tolist(),
            "tokens_a": hidden[1:1 + n_a].tolist(),
            "tokens_b": hidden[2 + n_a:2 + n_a + n_b].tolist(),
            "truncated_a": trunc_a,
            "truncated_b": trunc_b,
            "model_id": self.model_id,
        }

    def encode_single(self, text: str, max_tokens: int) -> dict:
        budget = self._cap(max_tokens) - 2  # [CLS] and [SEP] positions
        if budget < 1:
            raise OversizeError(
                f"max_tokens {max_tokens} leaves no room for content tokens"
            )
        ids, _ = self._content_ids(text, budget)

        input_ids = [self.tokenizer.cls_token_id, *ids, self.tokenizer.sep_token_id]
        segments = [0] * len(input_ids)
        hidden = self._forward(input_ids, segments)

        tokens = hidden[1:1 + len(ids)]
        if self.config.summary_mode == "mean":
            summary = tokens.mean(axis=0)
        else:
            summary = hidden[0]
        return {
            "dim": self.dim,
            "summary": summary.tolist(),
            "tokens": tokens.tolist(),
            "model_id": self.model_id,
        }
