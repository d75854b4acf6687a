"""Training-datapoint files: reading, validation and batching.

The input format is the extraction toolkit's JSONL (a header record, then
one record per datapoint with input tokens, mask positions and targets).
Examples longer than the model's maximum input length are rejected and
logged with their MCQ id rather than silently truncated.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path

import torch

from .vocab import MASK, Vocab

log = logging.getLogger(__name__)


class DataError(Exception):
    pass


@dataclass(frozen=True)
class Example:
    mcq_id: str
    input_tokens: tuple[str, ...]
    targets: tuple[tuple[int, str], ...]


def read_examples(path: str | Path, max_len: int = 512) -> list[Example]:
    examples: list[Example] = []
    rejected = 0
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("kind") == "header":
                continue
            try:
                ex = Example(
                    mcq_id=str(obj["mcq_id"]),
                    input_tokens=tuple(obj["input"]),
                    targets=tuple((int(p), str(t)) for p, t in obj["targets"]),
                )
            except KeyError as e:
                raise DataError(f"{path}:{lineno}: datapoint misses field {e}") from None
            if len(ex.input_tokens) > max_len:
                rejected += 1
                log.warning("rejecting datapoint of MCQ %s: %d tokens > %d", ex.mcq_id, len(ex.input_tokens), max_len)
                continue
            if not ex.targets:
                raise DataError(f"{path}:{lineno}: datapoint without targets")
            for pos, _ in ex.targets:
                if not (0 <= pos < len(ex.input_tokens)) or ex.input_tokens[pos] != MASK:
                    raise DataError(f"{path}:{lineno}: target position {pos} does not hold a mask")
            examples.append(ex)
    if rejected:
        log.warning("rejected %d over-length datapoints from %s", rejected, path)
    if not examples:
        raise DataError(f"{path}: no usable training datapoints")
    return examples


def build_vocab(example_sets: list[list[Example]]) -> Vocab:
    streams = []
    for examples in example_sets:
        for ex in examples:
            streams.append(ex.input_tokens)
            streams.append(t for _, t in ex.targets)
    return Vocab.build(streams)


@dataclass
class Batch:
    input_ids: torch.Tensor  # (B, L) padded
    attention_mask: torch.Tensor  # (B, L) 1 = real token
    target_positions: list[list[int]]
    target_ids: list[list[int]]


def batches(
    examples: list[Example],
    vocab: Vocab,
    batch_size: int,
    seed: int,
    epoch: int,
    shuffle: bool = True,
) -> list[Batch]:
    """Deterministic batch sequence for (seed, epoch)."""
    order = list(range(len(examples)))
    if shuffle:
        random.Random(f"{seed}:{epoch}").shuffle(order)
    out: list[Batch] = []
    pad_id = vocab.id_of("[PAD]")
    for start in range(0, len(order), batch_size):
        chunk = [examples[i] for i in order[start : start + batch_size]]
        width = max(len(ex.input_tokens) for ex in chunk)
        ids = torch.full((len(chunk), width), pad_id, dtype=torch.long)
        attn = torch.zeros((len(chunk), width), dtype=torch.bool)
        t_pos: list[list[int]] = []
        t_ids: list[list[int]] = []
        for row, ex in enumerate(chunk):
            encoded = vocab.encode(ex.input_tokens)
            ids[row, : len(encoded)] = torch.tensor(encoded, dtype=torch.long)
            attn[row, : len(encoded)] = True
            t_pos.append([p for p, _ in ex.targets])
            t_ids.append([vocab.id_of(t) for _, t in ex.targets])
        out.append(Batch(input_ids=ids, attention_mask=attn, target_positions=t_pos, target_ids=t_ids))
    return out
