from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from predictor_service.parse_export import ParsedSentence, ParsedToken


class ToyBackend:
    """Deterministic stand-in parser: periods split sentences, the first word
    of each sentence is the root and everything else attaches to it."""

    def __init__(self, fail_on: set[str] | None = None):
        self.fail_on = fail_on or set()

    def parse(self, text: str) -> list[ParsedSentence]:
        if text in self.fail_on:
            raise RuntimeError("scripted parser failure")
        sentences = []
        cursor = 0
        for chunk in text.split("."):
            stripped = chunk.strip()
            if not stripped:
                cursor += len(chunk) + 1
                continue
            start = text.index(stripped, cursor)
            end = start + len(stripped)
            has_period = end < len(text) and text[end] == "."
            sentence_text = stripped + ("." if has_period else "")
            words = stripped.split()
            tokens = [
                ParsedToken(
                    form=w,
                    lemma=w.lower(),
                    upos="NOUN" if i else "VERB",
                    feats="_",
                    head=1 if i else 0,
                    deprel="dep" if i else "root",
                )
                for i, w in enumerate(words)
            ]
            if has_period:
                tokens.append(
                    ParsedToken(form=".", lemma=".", upos="PUNCT", feats="_", head=1, deprel="punct")
                )
            sentences.append(
                ParsedSentence(
                    text=sentence_text,
                    start=start,
                    end=end + (1 if has_period else 0),
                    tokens=tuple(tokens),
                )
            )
            cursor = end
        return sentences


@pytest.fixture
def toy_backend():
    return ToyBackend()


def write_corpus(path: Path, texts: list[tuple[str, str]], mcqs: list[dict]) -> Path:
    with path.open("w", encoding="utf-8") as fh:
        for text_id, body in texts:
            fh.write(json.dumps({"kind": "text", "id": text_id, "body": body}, ensure_ascii=False) + "\n")
        for mcq in mcqs:
            choices = [{"surface": mcq["key"], "start": None, "kind": "key"}] + [
                {"surface": d, "start": None, "kind": "distractor"} for d in mcq["distractors"]
            ]
            fh.write(
                json.dumps(
                    {
                        "kind": "mcq",
                        "id": mcq["id"],
                        "text_id": mcq["text_id"],
                        "stem": mcq.get("stem", "vad ?"),
                        "choices": choices,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    return path


def write_examples_file(path: Path, examples: list[dict]) -> Path:
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"kind": "header", "schema_version": 1, "seed": 42}) + "\n")
        for ex in examples:
            fh.write(json.dumps(ex, ensure_ascii=False) + "\n")
    return path


def toy_examples(n: int = 60) -> list[dict]:
    """Tiny repetitive masked-LM task: predictable word after each context."""
    examples = []
    pairs = [("hunden", "springer"), ("katten", "sover"), ("fågeln", "flyger")]
    for i in range(n):
        subject, verb = pairs[i % len(pairs)]
        inp = ["[CLS]", "om", subject, "[SEP]", subject, "[MASK]"]
        examples.append(
            {
                "mcq_id": f"m{i}",
                "distractor_index": 0,
                "input": inp,
                "mask_positions": [5],
                "targets": [[5, verb]],
            }
        )
    return examples
