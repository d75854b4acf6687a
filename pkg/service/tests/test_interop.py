"""The exported parse layout must drive the generation toolkit unchanged:
baseline suggestions from texts.conllu/keys.conllu, kernel metrics from
keys.conllu/generated.conllu. Drives the toolkit through its CLI, exactly
as a user would."""

from __future__ import annotations

import json
import subprocess
import sys

from predictor_service.parse_export import export_parses

from conftest import ToyBackend, write_corpus

BODY = "Hunden jagade katten. Katten sprang fort. Fågeln satt stilla."


def disgen(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "disgen.cli", *args], capture_output=True, text=True, check=False
    )


def test_exported_parses_drive_baseline_and_metrics(tmp_path):
    corpus = write_corpus(
        tmp_path / "corpus.jsonl",
        texts=[("t1", BODY)],
        mcqs=[{"id": "q1", "text_id": "t1", "key": "katten", "distractors": ["fort", "stilla"]}],
    )
    parses = tmp_path / "parses"
    export_parses(corpus, parses, backend=ToyBackend())

    suggestions = tmp_path / "baseline.jsonl"
    proc = disgen("baseline", "--corpus", str(corpus), "--parses", str(parses), "--out", str(suggestions))
    assert proc.returncode == 0, proc.stderr
    records = [
        json.loads(line)
        for line in suggestions.read_text(encoding="utf-8").splitlines()
        if json.loads(line).get("kind") != "header"
    ]
    assert len(records) == 1
    distractors = records[0]["distractors"]
    # the toy parser roots every sentence at its first word, so the two
    # non-key sentences are the only candidates; the third slot is padding
    assert distractors[0].startswith("Katten")
    assert distractors[1].startswith("Fågeln")
    assert distractors[2] == ""

    # round 2: parse the generated suggestions and compute kernel metrics
    export_parses(corpus, parses, backend=ToyBackend(), suggestions_file=suggestions)
    report_path = tmp_path / "metrics.json"
    proc = disgen(
        "metrics",
        "--generated", str(suggestions),
        "--corpus", str(corpus),
        "--parses", str(parses),
        "--json", str(report_path),
    )
    assert proc.returncode == 0, proc.stderr
    metrics = json.loads(report_path.read_text(encoding="utf-8"))["metrics"]
    assert metrics["ncptk_pairs"] == 2
    assert metrics["ncptk_excluded"] == 1  # the padded empty slot
    assert metrics["mean_ncptk"] is not None
    # whole-sentence candidates carry the punctuation token space-joined
    # ("fort ."), which never substring-matches the raw body: punctuation is
    # kept in subtree text by design, with no silent stripping
    assert metrics["any_dis_in_text"] == 0.0
