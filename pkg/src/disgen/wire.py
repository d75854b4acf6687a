"""Newline-delimited JSON wire protocol for remote predictors.

Prediction request and reply:

    {"id": 1, "tokens": [...], "positions": [3, 7], "top_k": 5}
    {"id": 1, "predictions": [{"position": 3,
                               "candidates": [{"token": "hund", "p": 0.9}, ...]}]}

Auxiliary operations:

    {"id": 2, "op": "tokenize", "text": "hunden springer"} -> {"id": 2, "tokens": [...]}
    {"id": 3, "op": "detokenize", "tokens": [...]}         -> {"id": 3, "text": "..."}

Errors come back as {"id": ..., "error": "..."} with the request id echoed.
The serving side lives in the model service; this module provides the
client plus the message schema both sides share.
"""

from __future__ import annotations

import json
import socket
from typing import Iterable

from .generation import Candidate, PositionPrediction, Predictor, PredictorError, PredictorQuery

PROTOCOL_VERSION = 1


def encode_message(obj: dict) -> bytes:
    return (json.dumps(obj, ensure_ascii=False) + "\n").encode("utf-8")


def decode_message(line: bytes | str) -> dict:
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise PredictorError(f"malformed protocol line: {e.msg}") from None
    if not isinstance(obj, dict):
        raise PredictorError("protocol message must be a JSON object")
    return obj


def parse_predictions(obj: dict) -> list[PositionPrediction]:
    if "error" in obj:
        raise PredictorError(f"predictor error: {obj['error']}")
    try:
        preds = [
            PositionPrediction(
                position=int(entry["position"]),
                candidates=tuple(
                    Candidate(token=c["token"], p=float(c["p"])) for c in entry["candidates"]
                ),
            )
            for entry in obj["predictions"]
        ]
    except (KeyError, TypeError, ValueError) as e:
        raise PredictorError(f"malformed prediction reply: {e}") from None
    for pr in preds:
        ps = [c.p for c in pr.candidates]
        if ps != sorted(ps, reverse=True):
            raise PredictorError(f"candidates at position {pr.position} not sorted by probability")
    return preds


class RemotePredictor(Predictor):
    """Predictor client over a local TCP socket speaking NDJSON."""

    def __init__(self, host: str, port: int, timeout: float = 60.0) -> None:
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._file = self._sock.makefile("rwb")
        self._next_id = 0

    def close(self) -> None:
        try:
            self._file.close()
        finally:
            self._sock.close()

    def __enter__(self) -> "RemotePredictor":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _roundtrip(self, payload: dict) -> dict:
        self._next_id += 1
        payload = {"id": self._next_id, **payload}
        try:
            self._file.write(encode_message(payload))
            self._file.flush()
            line = self._file.readline()
        except OSError as e:
            raise PredictorError(f"predictor transport failure: {e}") from None
        if not line:
            raise PredictorError("predictor closed the connection")
        reply = decode_message(line)
        if reply.get("id") != payload["id"]:
            raise PredictorError(f"reply id {reply.get('id')!r} does not match request {payload['id']}")
        if "error" in reply:
            raise PredictorError(f"predictor error: {reply['error']}")
        return reply

    def predict(self, query: PredictorQuery) -> list[PositionPrediction]:
        reply = self._roundtrip(
            {"tokens": list(query.tokens), "positions": list(query.positions), "top_k": query.top_k}
        )
        return parse_predictions(reply)

    def tokenize(self, text: str) -> list[str]:
        reply = self._roundtrip({"op": "tokenize", "text": text})
        try:
            return [str(t) for t in reply["tokens"]]
        except (KeyError, TypeError) as e:
            raise PredictorError(f"malformed tokenize reply: {e}") from None

    def detokenize(self, tokens: Iterable[str]) -> str:
        reply = self._roundtrip({"op": "detokenize", "tokens": list(tokens)})
        try:
            return str(reply["text"])
        except KeyError as e:
            raise PredictorError(f"malformed detokenize reply: {e}") from None


def connect(address: str, timeout: float = 60.0) -> RemotePredictor:
    """Open a predictor connection from an ``host:port`` address string."""
    host, _, port = address.rpartition(":")
    if not host or not port.isdigit():
        raise PredictorError(f"bad predictor address {address!r}, expected host:port")
    return RemotePredictor(host, int(port), timeout=timeout)
