"""Service command line: finetune, serve, parse."""

from __future__ import annotations

import argparse
import logging
import sys

from .data import DataError
from .parse_export import ParseExportError, export_parses
from .train import FineTuneConfig, finetune


def cmd_finetune(args) -> int:
    config = FineTuneConfig(
        base_model=args.base_model,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
        hidden=args.hidden,
        layers=args.layers,
        heads=args.heads,
        learning_rate=args.learning_rate,
        checkpoint_every=args.checkpoint_every,
        max_steps=args.max_steps,
    )
    result = finetune(args.train, args.dev, args.out, config)
    print(
        f"{result.steps} steps, loss {result.first_loss:.3f} -> {result.last_loss:.3f}"
        + (f", dev {result.dev_loss:.3f}" if result.dev_loss is not None else "")
    )
    print(f"checkpoint: {result.checkpoint}")
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    serve(args.checkpoint, host=args.host, port=args.port)
    return 0


def cmd_parse(args) -> int:
    report = export_parses(args.corpus, args.out, suggestions_file=args.generated)
    print(
        f"parsed {report.texts} texts ({report.sentences} sentences), "
        f"{report.keys} keys, {report.refs} reference distractors, "
        f"{report.generated} generated distractors; {len(report.skipped)} skipped"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="predictor-service", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finetune", help="fine-tune the masked LM on extracted datapoints")
    p.add_argument("--train", required=True)
    p.add_argument("--dev")
    p.add_argument("--out", required=True)
    p.add_argument("--base-model", default="scratch", help="'scratch' or a checkpoint to continue")
    p.add_argument("--epochs", type=int, default=6)
    p.add_argument("--batch-size", type=int, default=4)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--heads", type=int, default=2)
    p.add_argument("--learning-rate", type=float, default=5e-4)
    p.add_argument("--checkpoint-every", type=int, default=2000)
    p.add_argument("--max-steps", type=int, default=None)
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("serve", help="answer predictor protocol requests")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=9000)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("parse", help="export CoNLL-U parses for a corpus file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--generated", help="suggestions file to parse into generated.conllu")
    p.set_defaults(func=cmd_parse)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (DataError, ParseExportError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
