"""Masked-LM model: a transformer encoder under a two-linear-layer head with
layer normalization in the middle and a softmax over the vocabulary.

Pretrained encoder weights can be brought in from an earlier checkpoint;
otherwise the encoder trains from scratch at a configurable small scale (the
usual mode in offline environments). The loss is cross-entropy at masked
positions only.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch import nn

from .data import Batch
from .vocab import Vocab


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    max_len: int = 512
    hidden: int = 64
    layers: int = 2
    heads: int = 2
    ffn: int = 128
    dropout: float = 0.1


class MaskedLm(nn.Module):
    def __init__(self, config: ModelConfig) -> None:
        super().__init__()
        self.config = config
        self.token_emb = nn.Embedding(config.vocab_size, config.hidden)
        self.pos_emb = nn.Embedding(config.max_len, config.hidden)
        encoder_layer = nn.TransformerEncoderLayer(
            d_model=config.hidden,
            nhead=config.heads,
            dim_feedforward=config.ffn,
            dropout=config.dropout,
            batch_first=True,
            activation="gelu",
        )
        self.encoder = nn.TransformerEncoder(encoder_layer, num_layers=config.layers)
        # prediction head: linear -> layer norm in the middle -> linear,
        # softmax applied by the loss / the server
        self.head = nn.Sequential(
            nn.Linear(config.hidden, config.hidden),
            nn.GELU(),
            nn.LayerNorm(config.hidden),
            nn.Linear(config.hidden, config.vocab_size),
        )

    def logits(self, input_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(input_ids.shape[1], device=input_ids.device)
        x = self.token_emb(input_ids) + self.pos_emb(positions)[None, :, :]
        x = self.encoder(x, src_key_padding_mask=~attention_mask)
        return self.head(x)


def masked_loss(logits: torch.Tensor, batch: Batch) -> torch.Tensor:
    """Cross-entropy over masked positions only; everything else is ignored."""
    rows: list[torch.Tensor] = []
    targets: list[int] = []
    for row, (positions, ids) in enumerate(zip(batch.target_positions, batch.target_ids)):
        for pos, tid in zip(positions, ids):
            rows.append(logits[row, pos])
            targets.append(tid)
    stacked = torch.stack(rows)
    return nn.functional.cross_entropy(stacked, torch.tensor(targets, dtype=torch.long))


def save_checkpoint(path: str | Path, model: MaskedLm, vocab: Vocab, extra: dict | None = None) -> None:
    torch.save(
        {
            "config": asdict(model.config),
            "state_dict": model.state_dict(),
            "vocab": vocab.tokens,
            "extra": extra or {},
        },
        path,
    )


def load_checkpoint(path: str | Path) -> tuple[MaskedLm, Vocab, dict]:
    blob = torch.load(path, map_location="cpu", weights_only=True)
    config = ModelConfig(**blob["config"])
    model = MaskedLm(config)
    model.load_state_dict(blob["state_dict"])
    model.eval()
    vocab = Vocab(tokens=list(blob["vocab"]))
    return model, vocab, blob.get("extra", {})
