"""Deterministic miniature model for tests and local demos.

Builds a word-piece tokenizer over a small maintenance vocabulary and a
randomly initialized (but seed-pinned) bidirectional encoder, saved to a
directory that mounts like any hub checkpoint. No network involved.
"""

from __future__ import annotations

from pathlib import Path

import torch
from transformers import BertConfig, BertModel, BertTokenizerFast

_WORDS = [
    "pumpe", "ventil", "druck", "motor", "lager", "leck", "dichtung",
    "temperatur", "alarm", "filter", "kessel", "riss", "sensor", "welle",
    "geprueft", "getauscht", "normal", "erneut", "wieder", "ausgefallen",
    "instand", "gemeldet", "pump", "seal", "leaking", "checked", "replaced",
]


def build_test_model(
    target_dir: str | Path,
    seed: int = 0,
    hidden_size: int = 32,
    num_layers: int = 2,
    num_heads: int = 4,
) -> Path:
    """Write tokenizer + seeded model into target_dir; returns the directory."""
    target = Path(target_dir)
    target.mkdir(parents=True, exist_ok=True)

    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    vocab += _WORDS
    vocab += list("abcdefghijklmnopqrstuvwxyz0123456789")
    vocab += [f"##{c}" for c in "abcdefghijklmnopqrstuvwxyz0123456789"]
    vocab_file = target / "vocab.txt"
    vocab_file.write_text("\n".join(vocab) + "\n", encoding="utf-8")

    tokenizer = BertTokenizerFast(vocab_file=str(vocab_file), do_lower_case=True)
    tokenizer.save_pretrained(target)

    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=hidden_size,
        num_hidden_layers=num_layers,
        num_attention_heads=num_heads,
        intermediate_size=4 * hidden_size,
        max_position_embeddings=512,
        type_vocab_size=2,
    )
    torch.manual_seed(seed)
    model = BertModel(config)
    model.eval()
    model.save_pretrained(target)
    return target
