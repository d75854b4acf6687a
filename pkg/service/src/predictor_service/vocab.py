"""Word-level vocabulary and tokenizer for the service model.

Tokens are whitespace-delimited words plus the special sentinels; unseen
words fall back to [UNK] at the id level while the wire protocol keeps
exchanging strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

PAD = "[PAD]"
UNK = "[UNK]"
CLS = "[CLS]"
SEP = "[SEP]"
MASK = "[MASK]"

SPECIALS = (PAD, UNK, CLS, SEP, MASK)


@dataclass
class Vocab:
    tokens: list[str]

    def __post_init__(self) -> None:
        self.index = {t: i for i, t in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def id_of(self, token: str) -> int:
        return self.index.get(token, self.index[UNK])

    def token_of(self, idx: int) -> str:
        return self.tokens[idx]

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self.id_of(t) for t in tokens]

    @classmethod
    def build(cls, token_streams: Iterable[Iterable[str]]) -> "Vocab":
        seen: dict[str, None] = {}
        for stream in token_streams:
            for token in stream:
                if token not in seen:
                    seen[token] = None
        words = sorted(t for t in seen if t not in SPECIALS)
        return cls(tokens=list(SPECIALS) + words)


def tokenize(text: str) -> list[str]:
    return text.split()


def detokenize(tokens: Iterable[str]) -> str:
    return " ".join(tokens)
