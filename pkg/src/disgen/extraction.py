"""Training-datapoint extraction for the two model variants.

Left-to-right extraction emits one datapoint per distractor token plus a
closing separator target (teacher forcing). The arbitrary-order variant
draws a masking ratio r ~ Uniform(0,1) min(len, MAX_MASKINGS) times per
distractor and masks each of its tokens independently with probability r;
draws that mask nothing are discarded. In both variants earlier distractors
are fully visible and closed by a separator, and the current one is never
followed by a separator in the arbitrary-order variant.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Protocol

from . import SCHEMA_VERSION
from .corpus import Corpus, Mcq

CLS = "[CLS]"
SEP = "[SEP]"
MASK = "[MASK]"

MAX_INPUT_LEN = 512


class ExtractionError(Exception):
    pass


class Tokenizer(Protocol):
    def tokenize(self, text: str) -> list[str]: ...

    def detokenize(self, tokens: Iterable[str]) -> str: ...


class WhitespaceTokenizer:
    """Word-level test tokenizer; production tokenization is served by the
    model service over the wire protocol."""

    def tokenize(self, text: str) -> list[str]:
        return text.split()

    def detokenize(self, tokens: Iterable[str]) -> str:
        return " ".join(tokens)


@dataclass(frozen=True)
class ExtractionConfig:
    variant: str = "upmlm"  # "l2r" | "upmlm"
    max_maskings: int = 20
    context_limit: int = 384
    seed: int = 42
    max_input_len: int = MAX_INPUT_LEN

    def __post_init__(self) -> None:
        if self.variant not in ("l2r", "upmlm"):
            raise ExtractionError(f"unknown variant {self.variant!r}")
        if self.max_maskings < 1:
            raise ExtractionError("max_maskings must be >= 1")
        if self.context_limit < 1:
            raise ExtractionError("context_limit must be >= 1")


@dataclass(frozen=True)
class TrainingExample:
    mcq_id: str
    distractor_index: int
    input: tuple[str, ...]
    targets: tuple[tuple[int, str], ...]  # (position in input, token)

    @property
    def mask_positions(self) -> tuple[int, ...]:
        return tuple(pos for pos, _ in self.targets)

    def to_record(self) -> dict:
        return {
            "mcq_id": self.mcq_id,
            "distractor_index": self.distractor_index,
            "input": list(self.input),
            "mask_positions": list(self.mask_positions),
            "targets": [[pos, tok] for pos, tok in self.targets],
        }

    @classmethod
    def from_record(cls, obj: dict) -> "TrainingExample":
        return cls(
            mcq_id=obj["mcq_id"],
            distractor_index=obj["distractor_index"],
            input=tuple(obj["input"]),
            targets=tuple((int(p), t) for p, t in obj["targets"]),
        )


def build_context(
    text_tokens: list[str],
    stem_tokens: list[str],
    key_tokens: list[str],
    limit: int = 384,
) -> list[str]:
    """[CLS] + first ``limit`` text tokens + [SEP] + stem + [SEP] + key."""
    if not stem_tokens:
        raise ExtractionError("stem must not be empty")
    if not key_tokens:
        raise ExtractionError("key must not be empty")
    return [CLS, *text_tokens[:limit], SEP, *stem_tokens, SEP, *key_tokens]


def _context_for(mcq: Mcq, text_body: str, tokenizer: Tokenizer, config: ExtractionConfig) -> list[str]:
    return build_context(
        tokenizer.tokenize(text_body),
        tokenizer.tokenize(mcq.stem),
        tokenizer.tokenize(mcq.key.surface),
        limit=config.context_limit,
    )


def _check_len(example_len: int, mcq: Mcq, config: ExtractionConfig) -> None:
    if example_len > config.max_input_len:
        raise ExtractionError(
            f"MCQ {mcq.id!r}: datapoint of {example_len} tokens exceeds the "
            f"{config.max_input_len}-token input limit"
        )


def extract_l2r(
    mcq: Mcq, text_body: str, tokenizer: Tokenizer, config: ExtractionConfig
) -> list[TrainingExample]:
    """Teacher-forced left-to-right datapoints; exactly sum(len(D)+1) rows."""
    ctx = _context_for(mcq, text_body, tokenizer, config)
    prior: list[str] = [SEP]
    out: list[TrainingExample] = []
    for dx, d in enumerate(mcq.distractors):
        toks = tokenizer.tokenize(d.surface)
        for i, target in enumerate([*toks, SEP]):
            inp = (*ctx, *prior, *toks[:i], MASK)
            _check_len(len(inp), mcq, config)
            out.append(
                TrainingExample(
                    mcq_id=mcq.id,
                    distractor_index=dx,
                    input=inp,
                    targets=((len(inp) - 1, target),),
                )
            )
        prior.extend([*toks, SEP])
    return out


def extract_upmlm(
    mcq: Mcq,
    text_body: str,
    tokenizer: Tokenizer,
    config: ExtractionConfig,
    rng: random.Random,
) -> list[TrainingExample]:
    """Uniform-ratio masking datapoints; at most sum(min(len(D), MAX)) rows."""
    ctx = _context_for(mcq, text_body, tokenizer, config)
    prior: list[str] = [SEP]
    out: list[TrainingExample] = []
    for dx, d in enumerate(mcq.distractors):
        toks = tokenizer.tokenize(d.surface)
        if not toks:
            continue
        draws = min(len(toks), config.max_maskings)
        for _ in range(draws):
            r = rng.random()
            masked = [rng.random() < r for _ in toks]
            if not any(masked):
                continue  # discarded, not redrawn
            base = len(ctx) + len(prior)
            inp = (*ctx, *prior, *(MASK if m else t for m, t in zip(masked, toks)))
            _check_len(len(inp), mcq, config)
            targets = tuple((base + i, t) for i, (m, t) in enumerate(zip(masked, toks)) if m)
            out.append(
                TrainingExample(mcq_id=mcq.id, distractor_index=dx, input=inp, targets=targets)
            )
        prior.extend([*toks, SEP])
    return out


def rng_for_mcq(seed: int, mcq_id: str) -> random.Random:
    """Stable per-MCQ stream so corpora can be processed in any order."""
    digest = hashlib.sha256(f"{seed}:{mcq_id}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def extract_corpus(
    corpus: Corpus, tokenizer: Tokenizer, config: ExtractionConfig
) -> Iterator[TrainingExample]:
    """All datapoints of a corpus, MCQs in dataset order."""
    for mcq in corpus.mcqs:
        body = corpus.text_of(mcq).body
        if config.variant == "l2r":
            yield from extract_l2r(mcq, body, tokenizer, config)
        else:
            yield from extract_upmlm(mcq, body, tokenizer, config, rng_for_mcq(config.seed, mcq.id))


def write_examples(examples: Iterable[TrainingExample], path: str | Path, config: ExtractionConfig) -> int:
    """JSONL: a header record, then one record per datapoint. Returns count."""
    path = Path(path)
    n = 0
    with path.open("w", encoding="utf-8") as fh:
        header = {
            "kind": "header",
            "schema_version": SCHEMA_VERSION,
            "seed": config.seed,
            "variant": config.variant,
            "max_maskings": config.max_maskings,
            "context_limit": config.context_limit,
        }
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for ex in examples:
            fh.write(json.dumps(ex.to_record(), ensure_ascii=False) + "\n")
            n += 1
    return n


def read_examples(path: str | Path) -> list[TrainingExample]:
    out = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("kind") == "header":
                continue
            out.append(TrainingExample.from_record(obj))
    return out
