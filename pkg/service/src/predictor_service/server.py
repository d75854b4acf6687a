"""NDJSON predictor server over a local TCP socket.

Each connection is handled on its own thread with requests processed
sequentially; the model is read-only during serving and inference runs in
eval mode under no_grad, so identical requests get identical replies.
"""

from __future__ import annotations

import logging
import socketserver

import torch

from .model import MaskedLm
from .protocol import ProtocolError, decode, encode
from .vocab import MASK, Vocab, detokenize, tokenize

log = logging.getLogger(__name__)


class PredictorBackend:
    """Answers protocol requests from a loaded model + vocabulary."""

    def __init__(self, model: MaskedLm, vocab: Vocab) -> None:
        self.model = model.eval()
        self.vocab = vocab

    def handle(self, request: dict) -> dict:
        req_id = request.get("id")
        try:
            if "op" in request:
                return self._aux(request, req_id)
            return self._predict(request, req_id)
        except ProtocolError as e:
            return {"id": req_id, "error": str(e)}
        except Exception as e:  # noqa: BLE001 - a bad request must not kill the server
            log.exception("request failed")
            return {"id": req_id, "error": f"{type(e).__name__}: {e}"}

    def _aux(self, request: dict, req_id) -> dict:
        op = request["op"]
        if op == "tokenize":
            if "text" not in request:
                raise ProtocolError("tokenize needs a 'text' field")
            return {"id": req_id, "tokens": tokenize(request["text"])}
        if op == "detokenize":
            if "tokens" not in request:
                raise ProtocolError("detokenize needs a 'tokens' field")
            return {"id": req_id, "text": detokenize(request["tokens"])}
        raise ProtocolError(f"unknown op {op!r}")

    def _predict(self, request: dict, req_id) -> dict:
        try:
            tokens = list(request["tokens"])
            positions = [int(p) for p in request["positions"]]
        except (KeyError, TypeError, ValueError):
            raise ProtocolError("predict needs 'tokens' and 'positions'") from None
        top_k = int(request.get("top_k", 1))
        if top_k < 1:
            raise ProtocolError("top_k must be >= 1")
        if len(tokens) > self.model.config.max_len:
            raise ProtocolError(
                f"sequence of {len(tokens)} tokens exceeds model maximum {self.model.config.max_len}"
            )
        for pos in positions:
            if not (0 <= pos < len(tokens)) or tokens[pos] != MASK:
                raise ProtocolError(f"position {pos} does not hold a mask token")
        ids = torch.tensor([self.vocab.encode(tokens)], dtype=torch.long)
        attn = torch.ones_like(ids, dtype=torch.bool)
        with torch.no_grad():
            logits = self.model.logits(ids, attn)[0]
            probs = torch.softmax(logits, dim=-1)
        k = min(top_k, len(self.vocab))
        predictions = []
        for pos in positions:
            top = torch.topk(probs[pos], k)
            predictions.append(
                {
                    "position": pos,
                    "candidates": [
                        {"token": self.vocab.token_of(int(i)), "p": float(p)}
                        for p, i in zip(top.values, top.indices)
                    ],
                }
            )
        return {"id": req_id, "predictions": predictions}


class _Handler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        backend: PredictorBackend = self.server.backend  # type: ignore[attr-defined]
        while True:
            line = self.rfile.readline()
            if not line:
                return
            try:
                request = decode(line)
            except ProtocolError as e:
                self.wfile.write(encode({"id": None, "error": str(e)}))
                continue
            self.wfile.write(encode(backend.handle(request)))


class PredictorServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address: tuple[str, int], backend: PredictorBackend) -> None:
        super().__init__(address, _Handler)
        self.backend = backend

    @property
    def port(self) -> int:
        return self.socket.getsockname()[1]


def serve(checkpoint: str, host: str = "127.0.0.1", port: int = 9000) -> None:
    """Blocking entry point: load the checkpoint and answer requests."""
    from .model import load_checkpoint

    model, vocab, _ = load_checkpoint(checkpoint)
    server = PredictorServer((host, port), PredictorBackend(model, vocab))
    log.info("serving %s on %s:%d", checkpoint, host, server.port)
    print(f"serving on {host}:{server.port}")
    server.serve_forever()
