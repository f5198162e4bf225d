"""Shared fixtures and corpus-building helpers."""

from __future__ import annotations

import numpy as np
import pytest

from shiftlink.corpus import Chain, Corpus, Record

HOUR = 3600.0

# Filled by the acceptance tests; echoed after the run so the PASS/FAIL
# lines survive pytest's fd-level capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def rec(
    rid: str,
    hours: float,
    topic: str = "T",
    text: str = "pumpe geprueft druck normal",
    fl_code: str | None = "A1-B2-C3",
) -> Record:
    """Record at `hours` after epoch with sane defaults."""
    return Record(
        record_id=rid,
        topic_id=topic,
        document_id=f"{topic}-s{int(hours // 8):04d}",
        timestamp=hours * HOUR,
        text=text,
        fl_code=fl_code,
    )


def corpus_of(records, chains=None) -> Corpus:
    return Corpus(records, chains)


@pytest.fixture
def abc_corpus() -> Corpus:
    """One 3-chain A->B->C plus a singleton D, single topic."""
    records = [
        rec("A", 0.0),
        rec("B", 1.0),
        rec("C", 2.0),
        rec("D", 3.0),
    ]
    return Corpus(records, [Chain("c1", ("A", "B", "C"))])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(1234))


def make_toy_examples(arch, dim=16, n=5, seed=5):
    """Synthetic frozen-encoder outputs for scorer tests; no real encoder."""
    from shiftlink.scorer import PairExample

    gen = np.random.default_rng(seed)
    out = []
    for i in range(n):
        ex = PairExample(a=f"a{i}", b=f"b{i}", label=float(i % 2), fl_bin=i % 11)
        if arch.mode in ("cdcr", "nli"):
            ex.cls = gen.standard_normal(dim)
        if arch.mode == "cdcr":
            ex.tokens_a = gen.standard_normal((int(gen.integers(1, 6)), dim))
            ex.tokens_b = gen.standard_normal((int(gen.integers(1, 6)), dim))
        if arch.mode == "sts":
            ex.summary_a = gen.standard_normal(dim)
            ex.summary_b = gen.standard_normal(dim)
        out.append(ex)
    return out


def gradient_relative_error(arch, h=1e-4, dim=16, hidden=(8, 8), n=5):
    """Worst relative error between analytic and central-difference gradients."""
    from shiftlink.flsim import FlConfig
    from shiftlink.scorer import assemble_batch, backward, bce_loss, forward, init_params

    params = init_params(arch, dim, FlConfig(n_bins=11, embed_dim=8),
                         np.random.default_rng(3), hidden)
    examples = make_toy_examples(arch, dim=dim, n=n)
    labels = np.array([e.label for e in examples])
    _, _, grads = backward(arch, params, examples)

    def loss_now():
        features = assemble_batch(arch, params, examples).features
        return bce_loss(forward(params, features), labels)

    worst = 0.0
    for name, tensor in params.trainable_tensors(arch).items():
        analytic = grads.tensors[name].reshape(-1)
        flat = tensor.reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + h
            up = loss_now()
            flat[idx] = orig - h
            down = loss_now()
            flat[idx] = orig
            numeric = (up - down) / (2 * h)
            scale = max(abs(analytic[idx]), abs(numeric), 1e-8)
            worst = max(worst, abs(analytic[idx] - numeric) / scale)
    return worst
