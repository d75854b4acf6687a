"""Generation controllers for both decoding variants.

Controllers talk to any predictor exposing ``predict``/``tokenize``/
``detokenize``. Left-to-right decoding commits the argmax token behind a
trailing mask until a separator is generated or the 20-token cap is hit.
Arbitrary-order decoding places the planned number of masks and repeatedly
commits the argmax at the position whose top candidate is most probable
(ties resolve leftmost); the inter-distractor separator is always appended
by the controller, never generated. Finished distractors become part of the
context for the following ones in both variants.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

from .corpus import Mcq
from .extraction import MASK, SEP, Tokenizer


class PredictorError(Exception):
    """Transport or protocol failure while querying a predictor."""


class MockScriptError(PredictorError):
    """The mock predictor received a query its script does not cover."""


@dataclass(frozen=True)
class Candidate:
    token: str
    p: float


@dataclass(frozen=True)
class PositionPrediction:
    position: int
    candidates: tuple[Candidate, ...]  # sorted by descending probability

    @property
    def top(self) -> Candidate:
        return self.candidates[0]


@dataclass(frozen=True)
class PredictorQuery:
    tokens: tuple[str, ...]
    positions: tuple[int, ...]
    top_k: int = 1

    def __post_init__(self) -> None:
        for pos in self.positions:
            if self.tokens[pos] != MASK:
                raise PredictorError(f"queried position {pos} holds {self.tokens[pos]!r}, not a mask")


class Predictor(Protocol):
    def predict(self, query: PredictorQuery) -> list[PositionPrediction]: ...

    def tokenize(self, text: str) -> list[str]: ...

    def detokenize(self, tokens: Iterable[str]) -> str: ...


@dataclass(frozen=True)
class GenerationPlan:
    lengths: tuple[int, ...]
    order_mode: str = "sf"  # "sf" | "lf" | "rnd"
    seed: int = 42

    def __post_init__(self) -> None:
        if any(n < 1 for n in self.lengths):
            raise ValueError("planned lengths must be positive")


@dataclass(frozen=True)
class GenConfig:
    max_len: int = 20
    variant: str = "upmlm"

    def __post_init__(self) -> None:
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")


@dataclass(frozen=True)
class GeneratedDistractor:
    tokens: tuple[str, ...]
    stop_reason: str  # "sep" | "length" | "planned"


def plan_lengths(mcq: Mcq, tokenizer: Tokenizer) -> list[int]:
    """Token lengths to generate: the reference distractors' plus the key's,
    or a deterministic spread around the key length when no references exist."""
    key_len = max(1, len(tokenizer.tokenize(mcq.key.surface)))
    if mcq.distractors:
        return [len(tokenizer.tokenize(d.surface)) for d in mcq.distractors] + [key_len]
    return [max(1, key_len - 1), key_len, key_len + 1]


def order_lengths(lengths: Sequence[int], mode: str, seed: int = 42) -> list[int]:
    """sf: ascending, lf: descending, rnd: seeded shuffle; sorts are stable."""
    out = list(lengths)
    if mode == "sf":
        return sorted(out)
    if mode == "lf":
        return sorted(out, key=lambda n: -n)
    if mode == "rnd":
        import random

        random.Random(seed).shuffle(out)
        return out
    raise ValueError(f"unknown order mode {mode!r}")


def generate_l2r(
    ctx: Sequence[str],
    predictor: Predictor,
    config: GenConfig = GenConfig(variant="l2r"),
    n_distractors: int = 3,
    top_k: int = 1,
) -> list[GeneratedDistractor]:
    seq = list(ctx)
    out: list[GeneratedDistractor] = []
    for _ in range(n_distractors):
        seq.append(SEP)
        tokens: list[str] = []
        reason = "length"
        while len(tokens) < config.max_len:
            pos = len(seq)
            seq.append(MASK)
            preds = predictor.predict(PredictorQuery(tuple(seq), (pos,), top_k))
            token = preds[0].top.token
            if token == SEP:
                seq.pop()  # the separator opens the next distractor instead
                reason = "sep"
                break
            seq[pos] = token
            tokens.append(token)
        out.append(GeneratedDistractor(tokens=tuple(tokens), stop_reason=reason))
    return out


def generate_upmlm(
    ctx: Sequence[str],
    predictor: Predictor,
    lengths: Sequence[int],
    config: GenConfig = GenConfig(variant="upmlm"),
    top_k: int = 1,
) -> list[GeneratedDistractor]:
    seq = list(ctx)
    out: list[GeneratedDistractor] = []
    for length in lengths:
        seq.append(SEP)
        base = len(seq)
        seq.extend([MASK] * length)
        remaining = set(range(base, base + length))
        for _ in range(length):
            positions = tuple(sorted(remaining))
            preds = predictor.predict(PredictorQuery(tuple(seq), positions, top_k))
            best = max(preds, key=lambda pr: (pr.top.p, -pr.position))
            seq[best.position] = best.top.token
            remaining.remove(best.position)
        out.append(GeneratedDistractor(tokens=tuple(seq[base : base + length]), stop_reason="planned"))
    return out


class MockPredictor:
    """Deterministic scripted predictor, recording every query.

    ``script`` maps an exact token-tuple fingerprint to a per-position list
    of (token, p) candidates; ``default`` answers any context not in the
    script. A query for a position absent from the matched entry fails.
    """

    def __init__(
        self,
        script: dict[tuple[str, ...], dict[int, list[tuple[str, float]]]] | None = None,
        default: dict[int, list[tuple[str, float]]] | None = None,
    ) -> None:
        self.script = script or {}
        self.default = default
        self.query_log: list[PredictorQuery] = []

    def predict(self, query: PredictorQuery) -> list[PositionPrediction]:
        self.query_log.append(query)
        entry = self.script.get(query.tokens, self.default)
        if entry is None:
            raise MockScriptError(f"no script entry for context of {len(query.tokens)} tokens")
        preds = []
        for pos in query.positions:
            if pos not in entry:
                raise MockScriptError(f"no scripted candidates for position {pos}")
            cands = tuple(Candidate(token=t, p=p) for t, p in entry[pos])
            if any(not (0.0 <= c.p <= 1.0) for c in cands):
                raise MockScriptError(f"scripted probability out of [0, 1] at position {pos}")
            preds.append(PositionPrediction(position=pos, candidates=cands))
        return preds

    def tokenize(self, text: str) -> list[str]:
        return text.split()

    def detokenize(self, tokens: Iterable[str]) -> str:
        return " ".join(tokens)
