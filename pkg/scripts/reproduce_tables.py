#!/usr/bin/env python3
"""Reproduce the reported corpus statistics and the baseline metric column
from the released SweQUAD-MC files.

Usage:
    python scripts/reproduce_tables.py <dataset dir> [<parses dir>] [<out dir>]

The dataset dir must contain training/development/test split files (JSON as
released, or this toolkit's JSONL). The parses dir is the output of the model
service's `parse` subcommand over the test split; without it only the split
statistics are computed.
"""

from __future__ import annotations

import sys
from pathlib import Path

from disgen.cli import main as disgen

SPLIT_FILES = {
    "training": ("training.json", "training.jsonl", "train.json", "train.jsonl"),
    "development": ("development.json", "development.jsonl", "dev.json", "dev.jsonl"),
    "test": ("test.json", "test.jsonl"),
}


def find_split(root: Path, split: str) -> Path | None:
    for name in SPLIT_FILES[split]:
        for candidate in (root / name, *root.rglob(name)):
            if candidate.exists():
                return candidate
    return None


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__)
        return 2
    data = Path(sys.argv[1])
    parses = Path(sys.argv[2]) if len(sys.argv) > 2 else None
    out = Path(sys.argv[3]) if len(sys.argv) > 3 else Path("repro_out")
    out.mkdir(parents=True, exist_ok=True)

    for split in ("training", "development", "test"):
        path = find_split(data, split)
        if path is None:
            print(f"!! no {split} split found under {data}")
            continue
        print(f"== {split} split statistics ({path.name}) ==")
        disgen(["stats", "--corpus", str(path), "--split", split, "--json", str(out / f"stats_{split}.json")])
        print()

    if parses is None:
        print("no parses dir given; skipping the baseline metric column")
        return 0

    test_path = find_split(data, "test")
    train_path = find_split(data, "training")
    if test_path is None or train_path is None:
        print("!! need both test and training splits for the baseline column")
        return 1

    print("== tree-kernel baseline over the test split ==")
    suggestions = out / "baseline_test.jsonl"
    disgen(
        [
            "baseline",
            "--corpus", str(test_path),
            "--split", "test",
            "--parses", str(parses),
            "--out", str(suggestions),
        ]
    )
    print("\n== baseline metric column ==")
    disgen(
        [
            "metrics",
            "--generated", str(suggestions),
            "--corpus", str(test_path),
            "--train-corpus", str(train_path),
            "--parses", str(parses),
            "--json", str(out / "metrics_baseline_test.json"),
        ]
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
