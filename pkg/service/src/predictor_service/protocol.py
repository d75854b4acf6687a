"""Wire protocol spoken with the generation toolkit (vendored schema).

Newline-delimited JSON over TCP. Prediction requests carry no "op" field:

    {"id": 1, "tokens": [...], "positions": [3, 7], "top_k": 5}
    -> {"id": 1, "predictions": [{"position": 3,
                                  "candidates": [{"token": "...", "p": 0.9}, ...]}]}

Auxiliary operations:

    {"id": 2, "op": "tokenize", "text": "..."}   -> {"id": 2, "tokens": [...]}
    {"id": 3, "op": "detokenize", "tokens": []}  -> {"id": 3, "text": "..."}

Candidates are sorted by descending probability. Failures are answered with
{"id": <echoed>, "error": "..."} and the connection stays open.
"""

from __future__ import annotations

import json

PROTOCOL_VERSION = 1

REQUEST_SCHEMA = {
    "type": "object",
    "required": ["id"],
    "properties": {
        "id": {"type": "integer"},
        "op": {"enum": ["tokenize", "detokenize"]},
        "tokens": {"type": "array", "items": {"type": "string"}},
        "positions": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "top_k": {"type": "integer", "minimum": 1},
        "text": {"type": "string"},
    },
    "oneOf": [
        {"required": ["op"]},
        {"required": ["tokens", "positions"], "not": {"required": ["op"]}},
    ],
}

REPLY_SCHEMA = {
    "type": "object",
    "required": ["id"],
    "properties": {
        "id": {"type": "integer"},
        "error": {"type": "string"},
        "tokens": {"type": "array", "items": {"type": "string"}},
        "text": {"type": "string"},
        "predictions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["position", "candidates"],
                "properties": {
                    "position": {"type": "integer", "minimum": 0},
                    "candidates": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["token", "p"],
                            "properties": {
                                "token": {"type": "string"},
                                "p": {"type": "number", "minimum": 0.0, "maximum": 1.0},
                            },
                        },
                    },
                },
            },
        },
    },
}


class ProtocolError(Exception):
    pass


def encode(obj: dict) -> bytes:
    return (json.dumps(obj, ensure_ascii=False) + "\n").encode("utf-8")


def decode(line: bytes | str) -> dict:
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise ProtocolError(f"malformed message: {e.msg}") from None
    if not isinstance(obj, dict):
        raise ProtocolError("message must be a JSON object")
    return obj
