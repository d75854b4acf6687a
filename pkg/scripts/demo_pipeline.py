#!/usr/bin/env python3
"""End-to-end demo on bundled fixture data, no model service required.

Runs: corpus stats -> tree-kernel baseline -> metric report -> mock-predictor
generation, leaving all outputs under ./demo_out (or the first argument).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from disgen.cli import main as disgen
from disgen.corpus import AnswerSpan, Corpus, Mcq, TextDoc, save_corpus

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

BODY = (
    "Hunden jagade katten i parken. "
    "Katten klättrade upp i trädet. "
    "Fåglarna flög över sjön."
)


def build_demo_corpus(path: Path) -> None:
    text = TextDoc(id="t1", body=BODY)
    mcq = Mcq(
        id="q1",
        text_id="t1",
        stem="Vad jagade hunden?",
        key=AnswerSpan("katten", start=BODY.index("katten"), kind="key"),
        distractors=(
            AnswerSpan("trädet", start=BODY.index("trädet"), kind="distractor"),
            AnswerSpan("sjön", start=BODY.index("sjön"), kind="distractor"),
        ),
    )
    save_corpus(Corpus(split="test", texts=[text], mcqs=[mcq]), path)


def main() -> int:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
    out.mkdir(parents=True, exist_ok=True)
    corpus = out / "corpus.jsonl"
    build_demo_corpus(corpus)

    print("== corpus stats ==")
    disgen(["stats", "--corpus", str(corpus), "--split", "test", "--json", str(out / "stats.json")])

    print("\n== baseline suggestions ==")
    disgen(
        [
            "baseline",
            "--corpus", str(corpus),
            "--parses", str(FIXTURES / "parses_tiny"),
            "--out", str(out / "baseline.jsonl"),
        ]
    )
    print((out / "baseline.jsonl").read_text(encoding="utf-8").strip())

    print("\n== metrics over the baseline output ==")
    disgen(
        [
            "metrics",
            "--generated", str(out / "baseline.jsonl"),
            "--corpus", str(corpus),
            "--parses", str(FIXTURES / "parses_tiny"),
            "--json", str(out / "metrics.json"),
        ]
    )

    print("\n== mock-predictor generation (both variants) ==")
    script = out / "mock.json"
    script.write_text(
        json.dumps(
            {
                "default": {
                    str(p): [[tok, 0.9]]
                    for p, tok in zip(
                        range(22, 28), ["vattnet", "[SEP]", "stranden", "[SEP]", "skogen", "[SEP]"]
                    )
                }
            }
        ),
        encoding="utf-8",
    )
    for variant in ("l2r", "upmlm"):
        disgen(
            [
                "generate",
                "--variant", variant,
                "--order", "sf",
                "--corpus", str(corpus),
                "--predictor", f"mock:{script}",
                "--out", str(out / f"generated_{variant}.jsonl"),
            ]
        )
    print(f"\nall outputs in {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
