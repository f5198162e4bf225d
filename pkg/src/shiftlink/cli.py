"""Command-line pipeline: gen-synth, split, train, tune, link, evaluate.

One JSON config file drives every stage; --set key.path=value overrides
individual entries. Each command writes a manifest (config hash, library
versions, timestamps) beside its outputs. Outputs themselves are byte-stable
for a fixed config and seed.

Exit codes: 0 success, 1 usage/config error, 2 data validation error,
3 numeric divergence, 4 remote-encoder failure.
"""

from __future__ import annotations

import copy
import hashlib
import json
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np
import scipy

from . import __version__
from .clustering import (
    ClusterParams,
    cluster_window,
    merge_chains,
    tdfs_cluster_detailed,
    threshold_grid,
    tune_threshold,
)
from .corpus import (
    Chain,
    Corpus,
    SplitPolicy,
    build_windows,
    chronological_split,
    clip_chains_to_window,
    corpus_time_stats,
    load_chains,
    load_corpus,
    load_split,
    save_chains,
    save_corpus,
    save_split,
    split_members,
    window_size_for_topic,
)
from .encoding import EncoderConfig, make_encoder
from .errors import ConfigError, ShiftlinkError, ValidationError
from .flsim import FlConfig
from .metrics import aggregate, evaluate_partition
from .pairgen import SamplingConfig
from .scorer import (
    ArchMode,
    TrainConfig,
    check_fingerprint,
    examples_from_windows,
    load_checkpoint,
    predict,
    prepare_split_pairs,
    save_checkpoint,
    select_threshold,
    score_matrix,
    train,
)
from .synthgen import SynthSpec, generate

DEFAULT_CONFIG: dict = {
    "seed": 0,
    "paths": {
        "corpus": None,
        "chains": None,
        "split": None,
        "checkpoint": None,
        "tuning": None,
        "predictions": None,
        "report": None,
    },
    "encoder": {
        "backend": "builtin",
        "dim": 256,
        "max_tokens": 512,
        "seed": 0,
        "remote_url": None,
        "timeout_s": 10.0,
        "retries": 2,
    },
    "arch": {"mode": "cdcr", "use_fl": True},
    "fl": {"n_bins": 11, "embed_dim": 50},
    "train": {
        "learning_rate": 5e-5,
        "weight_decay": 0.1,
        "epsilon": 1e-5,
        "beta1": 0.9,
        "beta2": 0.999,
        "epochs": 5,
        "batch_size": 32,
        "hidden": [1024, 1024],
    },
    "sampling": {"train_neg_ratio": 20, "dev_neg_ratio": 1},
    "clustering": {"algorithm": "tdfs", "stride_fraction": 0.5},
    "split_policy": {"test_quota": 200},
}


# ---------------------------------------------------------------------------
# Config plumbing
# ---------------------------------------------------------------------------

def _deep_update(base: dict, override: dict, where: str = "") -> None:
    for key, value in override.items():
        path = f"{where}.{key}" if where else key
        if key not in base:
            raise ConfigError(f"unknown config key {path!r}")
        if isinstance(base[key], dict) and isinstance(value, dict):
            _deep_update(base[key], value, path)
        else:
            base[key] = value


def _apply_set(cfg: dict, expr: str) -> None:
    if "=" not in expr:
        raise ConfigError(f"--set expects key.path=value, got {expr!r}")
    dotted, raw = expr.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    parts = dotted.split(".")
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            raise ConfigError(f"unknown config section {part!r} in {dotted!r}")
        node = node[part]
    if parts[-1] not in node:
        raise ConfigError(f"unknown config key {dotted!r}")
    node[parts[-1]] = value


def load_config(path, sets: tuple[str, ...] = ()) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                user = json.load(handle)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: malformed config JSON: {exc}")
        if not isinstance(user, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        _deep_update(cfg, user)
    for expr in sets:
        _apply_set(cfg, expr)
    if not isinstance(cfg["seed"], int):
        raise ConfigError("config requires an integer seed")
    return cfg


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def _require_path(cfg: dict, key: str, override=None) -> str:
    value = override if override is not None else cfg["paths"].get(key)
    if not value:
        raise ConfigError(f"no path configured for {key!r} (paths.{key} or option)")
    return str(value)


def write_manifest(out_path, command: str, cfg: dict, inputs: dict, outputs: dict) -> None:
    manifest = {
        "command": command,
        "package": {"name": "shiftlink", "version": __version__},
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "config_hash": config_hash(cfg),
        "config": cfg,
        "inputs": {k: str(v) for k, v in inputs.items()},
        "outputs": {k: str(v) for k, v in outputs.items()},
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    path = Path(str(out_path) + ".manifest.json")
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _encoder_from(cfg: dict):
    e = cfg["encoder"]
    config = EncoderConfig(
        backend=e["backend"],
        dim=int(e["dim"]),
        max_tokens=int(e["max_tokens"]),
        seed=int(e["seed"]),
        remote_url=e.get("remote_url"),
        timeout_s=float(e.get("timeout_s", 10.0)),
        retries=int(e.get("retries", 2)),
    )
    return make_encoder(config)


def _arch_from(cfg: dict) -> ArchMode:
    return ArchMode(mode=cfg["arch"]["mode"], use_fl=bool(cfg["arch"]["use_fl"]))


def _fl_from(cfg: dict) -> FlConfig:
    return FlConfig(n_bins=int(cfg["fl"]["n_bins"]), embed_dim=int(cfg["fl"]["embed_dim"]))


def _train_from(cfg: dict) -> TrainConfig:
    t = cfg["train"]
    return TrainConfig(
        learning_rate=float(t["learning_rate"]),
        weight_decay=float(t["weight_decay"]),
        epsilon=float(t["epsilon"]),
        beta1=float(t["beta1"]),
        beta2=float(t["beta2"]),
        epochs=int(t["epochs"]),
        batch_size=int(t["batch_size"]),
        seed=int(cfg["seed"]),
        hidden=tuple(int(h) for h in t["hidden"]),
    )


def _sampling_from(cfg: dict) -> SamplingConfig:
    s = cfg["sampling"]
    return SamplingConfig(
        train_neg_ratio=int(s["train_neg_ratio"]),
        dev_neg_ratio=int(s["dev_neg_ratio"]),
        seed=int(cfg["seed"]),
    )


def _load_corpus_from(cfg: dict, corpus_path=None, chains_path=None, need_chains=True) -> Corpus:
    records = _require_path(cfg, "corpus", corpus_path)
    chains = chains_path if chains_path is not None else cfg["paths"].get("chains")
    if need_chains and not chains:
        raise ConfigError("no gold-chain path configured (paths.chains or option)")
    return load_corpus(records, chains if chains else None)


def _part_member_set(corpus: Corpus, split_path: str, part: str) -> set[str]:
    split = load_split(split_path)
    members = split_members(corpus, split)
    if part not in members:
        raise ConfigError(f"unknown split part {part!r}")
    return members[part][1]


# ---------------------------------------------------------------------------
# Topic geometry: window width and max gap per topic
# ---------------------------------------------------------------------------

def topic_geometry(corpus: Corpus) -> dict[str, dict[str, float]]:
    """Per-topic window width (hours) and link gap cap (hours) from corpus
    statistics: width from full-chain duration Q3, gap from between-records Q3."""
    stats = corpus_time_stats(corpus)
    all_stats = [stats[t] for t in sorted(stats)]
    return {
        topic: {
            "window_hours": window_size_for_topic(stats[topic], all_stats),
            "max_gap_hours": stats[topic].between_records_hours_q3,
        }
        for topic in sorted(stats)
    }


def _geometry_for(corpus: Corpus, tuning: dict | None) -> dict[str, dict[str, float]]:
    if tuning is not None and "topics" in tuning:
        return {t: dict(v) for t, v in tuning["topics"].items()}
    return topic_geometry(corpus)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@click.group(name="shiftlink")
def cli() -> None:
    """Shift-book record linking pipeline."""


@cli.command("gen-synth")
@click.option("--spec", "spec_path", type=click.Path(), default=None,
              help="JSON file with generator settings; defaults are used when omitted.")
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="Override the generator seed.")
def gen_synth(spec_path, out_dir, seed) -> None:
    """Generate a synthetic corpus with gold chains."""
    spec_obj = {}
    if spec_path is not None:
        try:
            with open(spec_path, "r", encoding="utf-8") as handle:
                spec_obj = json.load(handle)
        except FileNotFoundError:
            raise ConfigError(f"spec file not found: {spec_path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{spec_path}: malformed spec JSON: {exc}")
    if seed is not None:
        spec_obj["seed"] = seed
    spec = SynthSpec.from_dict(spec_obj)
    corpus = generate(spec)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records_path = out / "records.jsonl"
    chains_path = out / "chains.jsonl"
    save_corpus(corpus, records_path, chains_path)
    write_manifest(
        records_path, "gen-synth", {"synth_spec": spec_obj, "seed": spec.seed},
        {}, {"records": records_path, "chains": chains_path},
    )
    n_chains = len(corpus.gold_chains or [])
    click.echo(f"wrote {len(corpus.records)} records, {n_chains} multi-record chains to {out}")


@cli.command("split")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--set", "sets", multiple=True, help="Override config entries: key.path=value.")
@click.option("--out", "out_path", type=click.Path(), default=None)
def split_cmd(config_path, sets, out_path) -> None:
    """Chronological train/dev/test split over gold chains."""
    cfg = load_config(config_path, sets)
    corpus = _load_corpus_from(cfg)
    policy = SplitPolicy(test_quota=int(cfg["split_policy"]["test_quota"]))
    split = chronological_split(corpus, policy)
    out = _require_path(cfg, "split", out_path)
    save_split(split, out)
    write_manifest(out, "split", cfg,
                   {"corpus": cfg["paths"]["corpus"], "chains": cfg["paths"]["chains"]},
                   {"split": out})
    click.echo(
        f"split chains: train {len(split.train)}, dev {len(split.dev)}, test {len(split.test)}"
    )


@cli.command("train")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--set", "sets", multiple=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Checkpoint path; defaults to paths.checkpoint.")
def train_cmd(config_path, sets, out_path) -> None:
    """Train the pair scorer on the train split, checkpoint on best dev loss."""
    cfg = load_config(config_path, sets)
    corpus = _load_corpus_from(cfg)
    split = load_split(_require_path(cfg, "split"))
    members = split_members(corpus, split)
    stats = corpus_time_stats(corpus)
    sampling = _sampling_from(cfg)
    stride = float(cfg["clustering"]["stride_fraction"])

    train_chains, train_ids = members["train"]
    dev_chains, dev_ids = members["dev"]
    if not train_ids or not dev_ids:
        raise ValidationError("train and dev splits must both be non-empty")
    train_windows = prepare_split_pairs(
        corpus, train_chains, train_ids, "train", sampling, stats, stride
    )
    dev_windows = prepare_split_pairs(
        corpus, dev_chains, dev_ids, "dev", sampling, stats, stride
    )

    encoder = _encoder_from(cfg)
    arch = _arch_from(cfg)
    fl_config = _fl_from(cfg)
    dev_examples = examples_from_windows(dev_windows, arch, encoder, corpus.records, fl_config.n_bins)
    result = train(corpus, train_windows, dev_examples, arch, encoder, _train_from(cfg), fl_config)

    for row in result.history:
        click.echo(
            "epoch {epoch}  train_loss {train_loss:.6f}  dev_loss {dev_loss:.6f}  "
            "dev_f1 {dev_f1:.4f}  tau0 {dev_threshold:.4f}".format(**row)
        )
    out = _require_path(cfg, "checkpoint", out_path)
    save_checkpoint(result.checkpoint, out)
    log_path = str(out) + ".log.json"
    with open(log_path, "w", encoding="utf-8") as handle:
        json.dump({"history": result.history, "best_epoch": result.checkpoint.epoch},
                  handle, indent=2, sort_keys=True)
        handle.write("\n")
    write_manifest(out, "train", cfg,
                   {"corpus": cfg["paths"]["corpus"], "chains": cfg["paths"]["chains"],
                    "split": cfg["paths"]["split"]},
                   {"checkpoint": out, "log": log_path})
    click.echo(f"checkpoint (epoch {result.checkpoint.epoch}, dev_loss "
               f"{result.checkpoint.dev_loss:.6f}) -> {out}")


@cli.command("tune")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--set", "sets", multiple=True)
@click.option("--checkpoint", "checkpoint_path", type=click.Path(), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Tuning report path; defaults to paths.tuning.")
def tune_cmd(config_path, sets, checkpoint_path, out_path) -> None:
    """Pick the pair threshold on dev, then the clustering threshold by v-measure."""
    cfg = load_config(config_path, sets)
    corpus = _load_corpus_from(cfg)
    split = load_split(_require_path(cfg, "split"))
    members = split_members(corpus, split)
    stats = corpus_time_stats(corpus)
    sampling = _sampling_from(cfg)
    stride = float(cfg["clustering"]["stride_fraction"])
    algorithm = cfg["clustering"]["algorithm"]

    encoder = _encoder_from(cfg)
    checkpoint = load_checkpoint(_require_path(cfg, "checkpoint", checkpoint_path))
    check_fingerprint(checkpoint, encoder)

    dev_chains, dev_ids = members["dev"]
    if not dev_ids:
        raise ValidationError("dev split is empty")
    dev_windows = prepare_split_pairs(
        corpus, dev_chains, dev_ids, "dev", sampling, stats, stride
    )
    if not dev_windows:
        raise ValidationError("no dev windows with positive pairs")
    dev_examples = examples_from_windows(
        dev_windows, checkpoint.arch, encoder, corpus.records, _fl_from(cfg).n_bins
    )
    probs = predict(checkpoint.arch, checkpoint.params, dev_examples)
    labels = [ex.label for ex in dev_examples]
    tau0 = select_threshold(probs, labels)

    geometry = topic_geometry(corpus)
    dev_by_topic: dict[str, list[str]] = {}
    for rid in dev_ids:
        dev_by_topic.setdefault(corpus.records[rid].topic_id, []).append(rid)
    entries = []
    for topic in sorted(dev_by_topic):
        geo = geometry[topic]
        for window in build_windows(
            corpus, topic, geo["window_hours"], stride, record_ids=dev_by_topic[topic]
        ):
            scores = score_matrix(checkpoint, window, corpus.records, encoder, geo["max_gap_hours"])
            gold = clip_chains_to_window(dev_chains, window)
            entries.append((window, scores, gold, geo["max_gap_hours"]))
    tau_star = tune_threshold(entries, corpus.records, tau0, algorithm)

    full, clipped = threshold_grid(tau0)
    out = _require_path(cfg, "tuning", out_path)
    report = {
        "tau0": tau0,
        "tau_star": tau_star,
        "algorithm": algorithm,
        "grid": {"full": full, "clipped": clipped},
        "topics": geometry,
    }
    with open(out, "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2, sort_keys=True)
        handle.write("\n")
    write_manifest(out, "tune", cfg,
                   {"checkpoint": checkpoint_path or cfg["paths"]["checkpoint"]},
                   {"tuning": out})
    click.echo(f"tau0 {tau0:.6f} -> tau* {tau_star:.6f} ({algorithm})")


@cli.command("link")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--set", "sets", multiple=True)
@click.option("--checkpoint", "checkpoint_path", type=click.Path(), default=None)
@click.option("--tuning", "tuning_path", type=click.Path(), default=None,
              help="Tuning report supplying tau and per-topic geometry.")
@click.option("--tau", type=float, default=None, help="Clustering threshold override.")
@click.option("--split-part", type=click.Choice(["train", "dev", "test"]), default=None,
              help="Restrict linking to one split part (requires paths.split).")
@click.option("--jobs", type=int, default=1,
              help="Worker threads for window scoring; output is identical for any count.")
@click.option("--out", "out_path", type=click.Path(), default=None)
def link_cmd(config_path, sets, checkpoint_path, tuning_path, tau, split_part, jobs,
             out_path) -> None:
    """Score candidate pairs, cluster per window, merge subchains across windows."""
    if jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    cfg = load_config(config_path, sets)
    corpus = _load_corpus_from(cfg, need_chains=False)
    out = _require_path(cfg, "predictions", out_path)

    if not corpus.records:
        save_chains([], out)
        write_manifest(out, "link", cfg, {"corpus": cfg["paths"]["corpus"]},
                       {"predictions": out})
        click.echo("no records to link; wrote empty predictions")
        return

    tuning = None
    tuning_file = tuning_path if tuning_path is not None else cfg["paths"].get("tuning")
    if tuning_file:
        with open(tuning_file, "r", encoding="utf-8") as handle:
            tuning = json.load(handle)
    if tau is None:
        if tuning is None:
            raise ConfigError("link needs --tau or a tuning report with tau_star")
        tau = float(tuning["tau_star"])

    encoder = _encoder_from(cfg)
    checkpoint = load_checkpoint(_require_path(cfg, "checkpoint", checkpoint_path))
    check_fingerprint(checkpoint, encoder)
    algorithm = cfg["clustering"]["algorithm"]
    stride = float(cfg["clustering"]["stride_fraction"])

    wanted = None
    if split_part is not None:
        wanted = _part_member_set(corpus, _require_path(cfg, "split"), split_part)

    geometry = _geometry_for(corpus, tuning)
    window_chains: list[Chain] = []
    chain_windows: dict[str, str] = {}
    chain_links: dict[str, list] = {}
    for topic in sorted(corpus.topics):
        ids = corpus.topics[topic]
        if wanted is not None:
            ids = [r for r in ids if r in wanted]
        if not ids:
            continue
        if topic not in geometry:
            raise ConfigError(f"no window geometry for topic {topic!r}")
        geo = geometry[topic]
        params = ClusterParams(
            score_threshold=tau, max_gap_hours=geo["max_gap_hours"], algorithm=algorithm
        )
        windows = build_windows(corpus, topic, geo["window_hours"], stride, record_ids=ids)
        if jobs > 1 and len(windows) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                score_maps = list(pool.map(
                    lambda w: score_matrix(
                        checkpoint, w, corpus.records, encoder, geo["max_gap_hours"]
                    ),
                    windows,
                ))
        else:
            score_maps = [
                score_matrix(checkpoint, w, corpus.records, encoder, geo["max_gap_hours"])
                for w in windows
            ]
        for w_index, (window, scores) in enumerate(zip(windows, score_maps)):
            window_id = f"{topic}/w{w_index:04d}"
            if algorithm == "tdfs":
                result = tdfs_cluster_detailed(scores, corpus.records, window.record_ids, params)
                chains = result.chains
                links = result.link_scores
            else:
                chains = cluster_window(scores, corpus.records, window, params)
                member_of = {r: c.chain_id for c in chains for r in c.record_ids}
                links = {c.chain_id: [] for c in chains}
                for (a, b), s in scores.items():
                    if s >= tau and member_of.get(a) == member_of.get(b):
                        links[member_of[a]].append((a, b, s))
            for chain in chains:
                scoped = Chain(f"{window_id}/{chain.chain_id}", chain.record_ids)
                window_chains.append(scoped)
                chain_windows[scoped.chain_id] = window_id
                chain_links[scoped.chain_id] = links.get(chain.chain_id, [])

    merged = merge_chains(window_chains, corpus.records)
    merged = [Chain(f"p::{c.record_ids[0]}", c.record_ids) for c in merged]
    merged.sort(key=lambda c: c.chain_id)

    owner: dict[str, str] = {}
    for chain in merged:
        for rid in chain.record_ids:
            owner[rid] = chain.chain_id
    provenance: dict[str, dict] = {
        c.chain_id: {"window_ids": set(), "link_scores": []} for c in merged
    }
    for sub in window_chains:
        target = provenance[owner[sub.record_ids[0]]]
        target["window_ids"].add(chain_windows[sub.chain_id])
        target["link_scores"].extend(
            [a, b, s] for a, b, s in chain_links.get(sub.chain_id, [])
        )
    for obj in provenance.values():
        obj["window_ids"] = sorted(obj["window_ids"])
        obj["link_scores"].sort(key=lambda row: (row[0], row[1]))

    save_chains(merged, out, provenance)
    write_manifest(out, "link", cfg,
                   {"corpus": cfg["paths"]["corpus"],
                    "checkpoint": checkpoint_path or cfg["paths"]["checkpoint"]},
                   {"predictions": out})
    n_multi = sum(1 for c in merged if len(c.record_ids) > 1)
    click.echo(f"linked {len(owner)} records into {len(merged)} chains ({n_multi} multi-record)")


@cli.command("evaluate")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--set", "sets", multiple=True)
@click.option("--predictions", "predictions_path", type=click.Path(), default=None)
@click.option("--split-part", type=click.Choice(["train", "dev", "test"]), default=None,
              help="Evaluate only records of one split part.")
@click.option("--out", "out_path", type=click.Path(), default=None)
def evaluate_cmd(config_path, sets, predictions_path, split_part, out_path) -> None:
    """Coreference metrics of predicted chains against gold chains."""
    cfg = load_config(config_path, sets)
    corpus = _load_corpus_from(cfg)
    predicted = load_chains(_require_path(cfg, "predictions", predictions_path))
    for chain in predicted:
        for rid in chain.record_ids:
            if rid not in corpus.records:
                raise ValidationError(
                    f"predicted chain {chain.chain_id!r} references unknown record {rid!r}"
                )

    gold = list(corpus.gold_chains or [])
    if split_part is not None:
        wanted = _part_member_set(corpus, _require_path(cfg, "split"), split_part)
        gold = _restrict_chains(gold, wanted)
        predicted = _restrict_chains(predicted, wanted)

    overall = evaluate_partition(gold, predicted)
    if overall is None:
        raise ValidationError("gold universe is empty after stripping singletons")

    per_topic = {}
    topic_reports = []
    for topic in sorted(corpus.topics):
        topic_records = set(corpus.topics[topic])
        report = evaluate_partition(
            _restrict_chains(gold, topic_records), _restrict_chains(predicted, topic_records)
        )
        per_topic[topic] = None if report is None else report.to_dict()
        topic_reports.append(report)
    macro = aggregate(topic_reports)

    out = _require_path(cfg, "report", out_path)
    payload = {
        "overall": overall.to_dict(),
        "per_topic": per_topic,
        "macro": {
            "report": None if macro.report is None else macro.report.to_dict(),
            "topics_scored": macro.window_count,
            "topics_excluded": macro.excluded_count,
        },
    }
    with open(out, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    write_manifest(out, "evaluate", cfg,
                   {"corpus": cfg["paths"]["corpus"], "chains": cfg["paths"]["chains"],
                    "predictions": predictions_path or cfg["paths"]["predictions"]},
                   {"report": out})
    click.echo(
        "conll_f1 {conll_f1:.2f}  muc_f1 {muc_f1:.2f}  b3_f1 {b3_f1:.2f}  "
        "ceafe_f1 {ceafe_f1:.2f}  v {v_measure:.4f}".format(**overall.to_dict())
    )


def _restrict_chains(chains: list[Chain], wanted: set[str]) -> list[Chain]:
    out = []
    for chain in chains:
        members = tuple(r for r in chain.record_ids if r in wanted)
        if members:
            out.append(Chain(chain.chain_id, members))
    return out


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        sys.exit(1)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except ShiftlinkError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(exc.exit_code)
    except FileNotFoundError as exc:
        click.echo(f"error: file not found: {exc}", err=True)
        sys.exit(1)
    return 0


if __name__ == "__main__":
    main()
