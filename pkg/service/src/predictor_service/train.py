"""Fine-tuning loop with masked-position-only loss.

Checkpoints are written every ``checkpoint_every`` optimizer steps and at
the end; a run manifest records the data order seed and the optimizer
settings. Example order is deterministic given the seed.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import asdict, dataclass
from pathlib import Path

import torch

from .data import batches, build_vocab, read_examples
from .model import MaskedLm, ModelConfig, masked_loss, save_checkpoint

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FineTuneConfig:
    base_model: str = "scratch"  # "scratch" or a checkpoint path to continue from
    epochs: int = 6
    batch_size: int = 4
    seed: int = 42
    max_len: int = 512
    hidden: int = 64
    layers: int = 2
    heads: int = 2
    ffn: int = 128
    learning_rate: float = 5e-4
    checkpoint_every: int = 2000
    max_steps: int | None = None  # cap for smoke runs

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass
class TrainResult:
    checkpoint: Path
    steps: int
    first_loss: float
    last_loss: float
    dev_loss: float | None
    losses: list[float]


def finetune(
    train_file: str | Path,
    dev_file: str | Path | None,
    out_dir: str | Path,
    config: FineTuneConfig = FineTuneConfig(),
) -> TrainResult:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_examples = read_examples(train_file, max_len=config.max_len)
    dev_examples = read_examples(dev_file, max_len=config.max_len) if dev_file else []

    torch.manual_seed(config.seed)
    random.seed(config.seed)

    if config.base_model != "scratch":
        from .model import load_checkpoint

        model, vocab, _ = load_checkpoint(config.base_model)
        model.train()
    else:
        vocab = build_vocab([train_examples, dev_examples])
        model = MaskedLm(
            ModelConfig(
                vocab_size=len(vocab),
                max_len=config.max_len,
                hidden=config.hidden,
                layers=config.layers,
                heads=config.heads,
                ffn=config.ffn,
            )
        )
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)

    losses: list[float] = []
    step = 0
    done = False
    for epoch in range(config.epochs):
        for batch in batches(train_examples, vocab, config.batch_size, config.seed, epoch):
            optimizer.zero_grad()
            loss = masked_loss(model.logits(batch.input_ids, batch.attention_mask), batch)
            loss.backward()
            optimizer.step()
            step += 1
            losses.append(float(loss.item()))
            log.info("step %d loss %.4f", step, losses[-1])
            if step % config.checkpoint_every == 0:
                save_checkpoint(out_dir / f"checkpoint-{step}.pt", model, vocab, {"step": step})
            if config.max_steps is not None and step >= config.max_steps:
                done = True
                break
        if done:
            break

    dev_loss = None
    if dev_examples:
        model.eval()
        with torch.no_grad():
            dev_batches = batches(dev_examples, vocab, config.batch_size, config.seed, 0, shuffle=False)
            total = sum(
                float(masked_loss(model.logits(b.input_ids, b.attention_mask), b).item())
                for b in dev_batches
            )
            dev_loss = total / len(dev_batches)
        model.train()

    model.eval()
    final = out_dir / "checkpoint-final.pt"
    save_checkpoint(final, model, vocab, {"step": step})
    manifest = {
        "config": asdict(config),
        "optimizer": "AdamW",
        "steps": step,
        "n_train_examples": len(train_examples),
        "n_dev_examples": len(dev_examples),
        "first_loss": losses[0],
        "last_loss": losses[-1],
        "dev_loss": dev_loss,
        "vocab_size": len(vocab),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return TrainResult(
        checkpoint=final,
        steps=step,
        first_loss=losses[0],
        last_loss=losses[-1],
        dev_loss=dev_loss,
        losses=losses,
    )
