#!/usr/bin/env python3
"""Run the full pipeline on a synthetic corpus and print a results table.

Generates a corpus, splits it chronologically, trains the pairwise scorer,
tunes the clustering threshold, links the test split, and evaluates the
result. With --ablate-fl the train/tune/link/evaluate stages run a second
time with the machinery-code feature disabled on the same corpus and split,
so the two rows of the table are directly comparable.

Example:
    python3 scripts/run_synthetic_e2e.py --out runs/demo --chains 1000 \
        --signal 0.9 --synth-seed 26 --run-seed 1 --ablate-fl
"""

import argparse
import json
import subprocess
import sys
import time
from pathlib import Path


def sh(*args: str) -> None:
    cmd = [sys.executable, "-m", "shiftlink", *args]
    print("+", " ".join(cmd[2:]), flush=True)
    proc = subprocess.run(cmd)
    if proc.returncode != 0:
        sys.exit(proc.returncode)


def base_config(root: Path, run_seed: int, dim: int, epochs: int,
                test_quota: int) -> dict:
    return {
        "seed": run_seed,
        "paths": {
            "corpus": str(root / "records.jsonl"),
            "chains": str(root / "chains.jsonl"),
            "split": str(root / "split.json"),
            "checkpoint": str(root / "model.ckpt"),
            "tuning": str(root / "tuning.json"),
            "predictions": str(root / "pred.jsonl"),
            "report": str(root / "report.json"),
        },
        "encoder": {"dim": dim},
        "train": {"epochs": epochs},
        "split_policy": {"test_quota": test_quota},
    }


def run_variant(root: Path, tag: str, config: dict, extra_sets: list[str]) -> dict:
    """Train/tune/link/evaluate under `tag`-prefixed artifact names."""
    cfg = json.loads(json.dumps(config))
    for key in ("checkpoint", "tuning", "predictions", "report"):
        cfg["paths"][key] = str(root / f"{tag}.{key}")
    cfg_path = root / f"{tag}.config.json"
    cfg_path.write_text(json.dumps(cfg, indent=2) + "\n", encoding="utf-8")

    sets = []
    for kv in extra_sets:
        sets += ["--set", kv]
    t0 = time.monotonic()
    sh("train", "--config", str(cfg_path), *sets)
    sh("tune", "--config", str(cfg_path), *sets)
    sh("link", "--config", str(cfg_path), *sets, "--split-part", "test")
    sh("evaluate", "--config", str(cfg_path), "--split-part", "test")
    elapsed = time.monotonic() - t0

    log = json.loads(Path(cfg["paths"]["checkpoint"] + ".log.json").read_text())
    best = next(r for r in log["history"] if r["epoch"] == log["best_epoch"])
    tuning = json.loads(Path(cfg["paths"]["tuning"]).read_text())
    overall = json.loads(Path(cfg["paths"]["report"]).read_text())["overall"]
    return {
        "tag": tag,
        "dev_f1": best["dev_f1"],
        "tau_star": tuning["tau_star"],
        "muc_f1": overall["muc_f1"],
        "b3_f1": overall["b3_f1"],
        "ceafe_f1": overall["ceafe_f1"],
        "conll_f1": overall["conll_f1"],
        "seconds": elapsed,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs/synthetic_e2e"))
    ap.add_argument("--topics", type=int, default=1)
    ap.add_argument("--chains", type=int, default=1000, help="chains per topic")
    ap.add_argument("--signal", type=float, default=0.9,
                    help="probability a record carries its chain's theme tokens")
    ap.add_argument("--synth-seed", type=int, default=26)
    ap.add_argument("--run-seed", type=int, default=1)
    ap.add_argument("--dim", type=int, default=256, help="builtin encoder width")
    ap.add_argument("--epochs", type=int, default=5)
    ap.add_argument("--test-quota", type=int, default=200,
                    help="per-topic chain count below which everything is test")
    ap.add_argument("--ablate-fl", action="store_true",
                    help="also run with the machinery-code feature off")
    args = ap.parse_args()

    root = args.out
    root.mkdir(parents=True, exist_ok=True)
    spec = {
        "n_topics": args.topics,
        "chains_per_topic": args.chains,
        "signal_strength": args.signal,
        "seed": args.synth_seed,
    }
    (root / "spec.json").write_text(json.dumps(spec, indent=2) + "\n", encoding="utf-8")
    config = base_config(root, args.run_seed, args.dim, args.epochs,
                         args.test_quota)
    (root / "config.json").write_text(json.dumps(config, indent=2) + "\n",
                                      encoding="utf-8")

    sh("gen-synth", "--spec", str(root / "spec.json"), "--out-dir", str(root))
    sh("split", "--config", str(root / "config.json"))

    rows = [run_variant(root, "fl_on", config, [])]
    if args.ablate_fl:
        rows.append(run_variant(root, "fl_off", config, ["arch.use_fl=false"]))

    header = f"{'variant':8} {'dev_f1':>7} {'tau*':>6} {'muc':>6} {'b3':>6} " \
             f"{'ceafe':>6} {'conll':>6} {'sec':>5}"
    print("\ntest-split results")
    print(header)
    print("-" * len(header))
    for r in rows:
        print(f"{r['tag']:8} {r['dev_f1']:7.4f} {r['tau_star']:6.3f} "
              f"{r['muc_f1']:6.2f} {r['b3_f1']:6.2f} {r['ceafe_f1']:6.2f} "
              f"{r['conll_f1']:6.2f} {r['seconds']:5.0f}")
    (root / "results.json").write_text(json.dumps(rows, indent=2) + "\n",
                                       encoding="utf-8")
    print(f"\nartifacts in {root}")


if __name__ == "__main__":
    main()
