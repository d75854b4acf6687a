"""Minimal readers for the toolkit's corpus and suggestions files.

Only the fields the service needs are read; the authoritative format
definitions live with the generation toolkit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class CorpusIoError(Exception):
    pass


@dataclass(frozen=True)
class TextEntry:
    id: str
    body: str


@dataclass(frozen=True)
class McqEntry:
    id: str
    text_id: str
    key: str
    distractors: tuple[str, ...]


def read_corpus(path: str | Path) -> tuple[list[TextEntry], list[McqEntry]]:
    raw = Path(path).read_text(encoding="utf-8")
    stripped = raw.lstrip()
    if stripped.startswith("{") and '"data"' in stripped[:2000]:
        obj = json.loads(raw)
        if isinstance(obj, dict) and "data" in obj:
            return _read_released(obj)
    return _read_records(raw, path)


def _read_records(raw: str, path) -> tuple[list[TextEntry], list[McqEntry]]:
    texts: list[TextEntry] = []
    mcqs: list[McqEntry] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        obj = json.loads(line)
        kind = obj.get("kind")
        if kind == "header":
            continue
        if kind == "text":
            texts.append(TextEntry(id=str(obj["id"]), body=obj["body"]))
        elif kind == "mcq":
            key = None
            distractors = []
            for choice in obj["choices"]:
                if choice["kind"] == "key":
                    key = choice["surface"]
                else:
                    distractors.append(choice["surface"])
            if key is None:
                raise CorpusIoError(f"{path}:{lineno}: MCQ without a key choice")
            mcqs.append(
                McqEntry(id=str(obj["id"]), text_id=str(obj["text_id"]), key=key, distractors=tuple(distractors))
            )
        else:
            raise CorpusIoError(f"{path}:{lineno}: unknown record kind {kind!r}")
    return texts, mcqs


def _read_released(obj: dict) -> tuple[list[TextEntry], list[McqEntry]]:
    texts: list[TextEntry] = []
    mcqs: list[McqEntry] = []
    for ti, entry in enumerate(obj["data"]):
        body = entry.get("context") or entry.get("text")
        text_id = str(entry.get("id", f"t{ti:04d}"))
        texts.append(TextEntry(id=text_id, body=body))
        for qi, qa in enumerate(entry.get("qas", [])):
            key = None
            distractors = []
            for choice in qa.get("choices", []):
                ctype = str(choice.get("type", "")).strip().lower()
                surface = choice.get("text", "")
                if ctype in ("correct answer", "key", "answer"):
                    key = surface
                elif surface:
                    distractors.append(surface)
            if key:
                mcqs.append(
                    McqEntry(
                        id=str(qa.get("id", f"{text_id}-q{qi:02d}")),
                        text_id=text_id,
                        key=key,
                        distractors=tuple(distractors),
                    )
                )
    return texts, mcqs


def read_suggestions(path: str | Path) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        if obj.get("kind") == "header":
            continue
        out[str(obj["mcq_id"])] = list(obj["distractors"])
    return out
