"""Command-line entry point wiring the pipeline together.

Subcommands: stats, baseline, extract, generate, metrics, humaneval,
model-select, kernel. Every output file is JSON (or JSONL with a header
record) carrying the schema version and the seed it was produced with;
re-running a subcommand with identical inputs and seed writes byte-identical
files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import SCHEMA_VERSION
from .baseline import BaselineError, run_baseline
from .corpus import CorpusError, corpus_stats, load_corpus
from .extraction import (
    ExtractionConfig,
    ExtractionError,
    WhitespaceTokenizer,
    build_context,
    extract_corpus,
    write_examples,
)
from .generation import (
    GenConfig,
    MockPredictor,
    PredictorError,
    generate_l2r,
    generate_upmlm,
    order_lengths,
    plan_lengths,
)
from .grct import BracketParseError, parse_bracketed
from .humaneval import (
    HumanEvalError,
    acceptance_summary,
    entropy_buckets,
    entropy_report,
    gamma_n,
    iqr_outliers,
    lf_dis,
    load_judgments,
    load_responses,
    one_sample_ttest,
)
from .kernel import KernelError, KernelParams, ncptk, ptk
from .metrics import MetricReport, MetricsError, evaluate, format_report, load_generated
from .model_select import ModelSelectError, model_select
from .parses import load_parse_dir
from .udtree import ConlluError

KNOWN_ERRORS = (
    BaselineError,
    BracketParseError,
    ConlluError,
    CorpusError,
    ExtractionError,
    HumanEvalError,
    KernelError,
    MetricsError,
    ModelSelectError,
    PredictorError,
    FileNotFoundError,
)


def _dump_json(obj: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def _header(seed: int, **extra) -> dict:
    return {"kind": "header", "schema_version": SCHEMA_VERSION, "seed": seed, **extra}


def _write_suggestions(path: Path, records: list[dict], seed: int, **extra) -> None:
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps(_header(seed, **extra), ensure_ascii=False) + "\n")
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def _open_predictor(address: str):
    if address.startswith("mock:"):
        script_path = address[len("mock:") :]
        obj = json.loads(Path(script_path).read_text(encoding="utf-8"))
        default = {int(k): [tuple(c) for c in v] for k, v in (obj.get("default") or {}).items()}
        script = {
            tuple(entry["tokens"]): {int(k): [tuple(c) for c in v] for k, v in entry["positions"].items()}
            for entry in obj.get("contexts", [])
        }
        return MockPredictor(script=script or None, default=default or None)
    from .wire import connect

    return connect(address)


# ---------------------------------------------------------------- commands


def cmd_stats(args) -> int:
    corpus = load_corpus(args.corpus, args.split)
    stats = corpus_stats(corpus, sample_sd=not args.population_sd)
    width = max(len(label) for label, _ in stats.rows())
    print(f"split: {stats.split}")
    for label, value in stats.rows():
        print(f"{label:<{width}}  {value}")
    if args.json:
        _dump_json(
            {"schema_version": SCHEMA_VERSION, "seed": args.seed, "stats": stats.to_dict()},
            args.json,
        )
    return 0


def cmd_baseline(args) -> int:
    corpus = load_corpus(args.corpus, args.split)
    parses = load_parse_dir(args.parses)
    params = KernelParams(lam=args.lam, mu=args.mu)
    suggestions = run_baseline(corpus, parses, k=args.k, params=params)
    records = [
        {
            "mcq_id": mcq_id,
            "distractors": [s.surface for s in suggs],
            "scores": [s.score for s in suggs],
        }
        for mcq_id, suggs in suggestions.items()
    ]
    _write_suggestions(Path(args.out), records, args.seed, generator="baseline", k=args.k)
    print(f"baseline suggestions for {len(records)} MCQs -> {args.out}")
    return 0


def cmd_extract(args) -> int:
    corpus = load_corpus(args.corpus, args.split)
    config = ExtractionConfig(
        variant=args.variant,
        max_maskings=args.max_maskings,
        context_limit=args.context_limit,
        seed=args.seed,
    )
    n = write_examples(extract_corpus(corpus, WhitespaceTokenizer(), config), args.out, config)
    print(f"{n} {args.variant} training datapoints -> {args.out}")
    return 0


def cmd_generate(args) -> int:
    corpus = load_corpus(args.corpus, args.split)
    predictor = _open_predictor(args.predictor)
    config = GenConfig(max_len=args.max_len, variant=args.variant)
    records = []
    try:
        for mcq in sorted(corpus.mcqs, key=lambda m: m.id):
            body = corpus.text_of(mcq).body
            ctx = build_context(
                predictor.tokenize(body),
                predictor.tokenize(mcq.stem),
                predictor.tokenize(mcq.key.surface),
                limit=args.context_limit,
            )
            if args.variant == "l2r":
                outs = generate_l2r(ctx, predictor, config, n_distractors=3, top_k=args.top_k)
            else:
                lengths = plan_lengths(mcq, predictor)[:3]
                ordered = order_lengths(lengths, args.order, seed=args.seed)
                outs = generate_upmlm(ctx, predictor, ordered, config, top_k=args.top_k)
            records.append(
                {
                    "mcq_id": mcq.id,
                    "distractors": [predictor.detokenize(d.tokens) for d in outs],
                    "stop_reasons": [d.stop_reason for d in outs],
                }
            )
    finally:
        if hasattr(predictor, "close"):
            predictor.close()
    _write_suggestions(
        Path(args.out), records, args.seed, generator=args.variant, order=args.order
    )
    print(f"{args.variant} distractors for {len(records)} MCQs -> {args.out}")
    return 0


def cmd_metrics(args) -> int:
    corpus = load_corpus(args.corpus, args.split)
    generated = load_generated(args.generated)
    train = load_corpus(args.train_corpus, "training") if args.train_corpus else None
    parses = load_parse_dir(args.parses) if args.parses else None
    report = evaluate(
        generated, corpus, train_corpus=train, parses=parses,
        params=KernelParams(lam=args.lam, mu=args.mu),
    )
    print(format_report(report))
    if args.json:
        _dump_json(
            {"schema_version": SCHEMA_VERSION, "seed": args.seed, "metrics": report.to_dict()},
            args.json,
        )
    return 0


def cmd_humaneval_students(args) -> int:
    responses = load_responses(args.responses)
    rows = entropy_report(responses)
    lf = lf_dis(responses, threshold=args.lf_threshold)
    correct = responses.correct_counts()
    mu0 = args.mu0 if args.mu0 is not None else 0.25 * len(responses.mcq_ids)
    ttest = one_sample_ttest(correct, mu0)
    mild = iqr_outliers(correct, multiplier=1.5)
    extreme = iqr_outliers(correct, multiplier=3.0)
    out = {
        "schema_version": SCHEMA_VERSION,
        "seed": args.seed,
        "n_subjects": responses.n_subjects,
        "n_mcqs": len(responses.mcq_ids),
        "entropy": [
            {
                "mcq_id": r.mcq_id,
                "p_key": r.p_key,
                "p_distractors": r.p_distractors,
                "entropy": r.entropy,
                "slot_shares": list(r.slot_shares),
            }
            for r in rows
        ],
        "lf_dis": {
            "threshold": lf.threshold,
            "flags": [[m, s, bool(f)] for (m, s), f in sorted(lf.flags.items())],
            "flagged_share": lf.flagged_share,
            "mcqs_losing_any": lf.mcqs_losing_any,
            "mcqs_losing_all": lf.mcqs_losing_all,
            "mcqs_keeping_all": lf.mcqs_keeping_all,
            "pct_losing_any": lf.pct(lf.mcqs_losing_any),
            "pct_losing_all": lf.pct(lf.mcqs_losing_all),
            "pct_keeping_all": lf.pct(lf.mcqs_keeping_all),
        },
        "ttest": {
            "mu0": mu0,
            "n": ttest.n,
            "mean": ttest.mean,
            "se": ttest.se,
            "t": ttest.t,
            "df": ttest.df,
            "p_two_tailed": ttest.p_two_tailed,
            "effect_r": ttest.effect_r,
        },
        "outliers": {
            "mild": [s for s, f in zip(responses.subjects, mild) if f],
            "extreme": [s for s, f in zip(responses.subjects, extreme) if f],
        },
    }
    print(
        f"n={ttest.n} mean={ttest.mean:.2f} se={ttest.se:.2f} "
        f"t({ttest.df})={ttest.t:.2f} p={ttest.p_two_tailed:.3g} r={ttest.effect_r:.2f}"
    )
    print(
        f"LF-DIS: {lf.flagged_share:.1f}% of distractors flagged; "
        f"{lf.mcqs_losing_any} MCQs lose >=1, {lf.mcqs_losing_all} lose all, "
        f"{lf.mcqs_keeping_all} keep all"
    )
    if args.out:
        _dump_json(out, args.out)
    return 0


def cmd_humaneval_teachers(args) -> int:
    judgments = load_judgments(args.judgments)
    lf_flags = None
    if args.lf_flags:
        students = json.loads(Path(args.lf_flags).read_text(encoding="utf-8"))
        lf_flags = {(m, s): f for m, s, f in students["lf_dis"]["flags"]}
    agreement = gamma_n(judgments)
    summary = acceptance_summary(judgments, lf_flags=lf_flags)
    out = {
        "schema_version": SCHEMA_VERSION,
        "seed": args.seed,
        "gamma_n": agreement,
        "n_mcqs": summary.n_mcqs,
        "n_teachers": summary.n_teachers,
        "mean_accepted_per_mcq_per_teacher": summary.mean_accepted_per_mcq_per_teacher,
        "pct_all_teachers_accept_any": summary.pct_all_teachers_accept_any,
        "pct_majority_accept_any": summary.pct_majority_accept_any,
        "pct_all_teachers_accept_all": summary.pct_all_teachers_accept_all,
        "pct_all_teachers_reject_all": summary.pct_all_teachers_reject_all,
        "pct_majority_accept_all": summary.pct_majority_accept_all,
        "pct_majority_reject_all": summary.pct_majority_reject_all,
        "rejection_reasons": dict(sorted(summary.rejection_reasons.items())),
        "mcqs_with_lf": summary.mcqs_with_lf,
        "lf_cross_table": None
        if summary.lf_cross_table is None
        else [[a, r, c] for (a, r), c in sorted(summary.lf_cross_table.items())],
    }
    print(f"gamma_N = {agreement:.2f} over {summary.n_mcqs} MCQs x {summary.n_teachers} teachers")
    print(f"mean accepted per MCQ per teacher: {summary.mean_accepted_per_mcq_per_teacher:.2f}")
    if args.out:
        _dump_json(out, args.out)
    return 0


def cmd_humaneval_sample(args) -> int:
    students = json.loads(Path(args.entropy_report).read_text(encoding="utf-8"))
    entropies = {row["mcq_id"]: row["entropy"] for row in students["entropy"]}
    sample = entropy_buckets(
        entropies, n_buckets=args.buckets, per_bucket=args.per_bucket, seed=args.seed
    )
    print("\n".join(sample))
    if args.out:
        _dump_json(
            {"schema_version": SCHEMA_VERSION, "seed": args.seed, "sampled_mcq_ids": sample},
            args.out,
        )
    return 0


def cmd_model_select(args) -> int:
    names = args.names or [Path(p).stem for p in args.reports]
    if len(names) != len(args.reports):
        raise ModelSelectError("--names must match the number of reports")
    dicts = []
    for path in args.reports:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        dicts.append(obj.get("metrics", obj))
    if len({frozenset(d.keys()) for d in dicts}) > 1:
        raise ModelSelectError("reports carry mismatched metric keys")
    try:
        loaded = [MetricReport.from_dict(d) for d in dicts]
    except KeyError as e:
        raise ModelSelectError(f"reports miss metric key {e}") from None
    result = model_select(list(zip(names, loaded)))
    print(result.format_table())
    if args.out:
        _dump_json(
            {
                "schema_version": SCHEMA_VERSION,
                "seed": args.seed,
                "names": list(result.names),
                "wins": list(result.wins),
                "ranking": [[r, n, w] for r, n, w in result.ranking],
            },
            args.out,
        )
    return 0


def cmd_kernel(args) -> int:
    params = KernelParams(lam=args.lam, mu=args.mu)
    t1 = parse_bracketed(args.a)
    t2 = parse_bracketed(args.b)
    result = {
        "schema_version": SCHEMA_VERSION,
        "seed": args.seed,
        "ptk": ptk(t1, t2, params),
        "ncptk": ncptk(t1, t2, params),
        "lam": params.lam,
        "mu": params.mu,
    }
    print(json.dumps(result, ensure_ascii=False, indent=2))
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="disgen", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="seed echoed into outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name: str, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add_parser("stats", help="descriptive corpus statistics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--population-sd", action="store_true")
    p.add_argument("--json", help="also write the report as JSON")
    p.set_defaults(func=cmd_stats)

    p = add_parser("baseline", help="tree-kernel baseline suggestions")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--parses", required=True, help="directory with exported parses")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline)

    p = add_parser("extract", help="build training datapoints")
    p.add_argument("--variant", choices=("l2r", "upmlm"), required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", default="training")
    p.add_argument("--out", required=True)
    p.add_argument("--max-maskings", type=int, default=20)
    p.add_argument("--context-limit", type=int, default=384)
    p.set_defaults(func=cmd_extract)

    p = add_parser("generate", help="generate distractors against a predictor")
    p.add_argument("--variant", choices=("l2r", "upmlm"), required=True)
    p.add_argument("--order", choices=("sf", "lf", "rnd"), default="sf")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--predictor", required=True, help="host:port or mock:<script.json>")
    p.add_argument("--out", required=True)
    p.add_argument("--max-len", type=int, default=20)
    p.add_argument("--context-limit", type=int, default=384)
    p.add_argument("--top-k", type=int, default=1)
    p.set_defaults(func=cmd_generate)

    p = add_parser("metrics", help="evaluate a generated-distractor file")
    p.add_argument("--generated", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--train-corpus")
    p.add_argument("--parses")
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--json", help="also write the report as JSON")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("humaneval", help="human evaluation statistics")
    hsub = p.add_subparsers(dest="stage", required=True)

    ps = hsub.add_parser("students", parents=[common], help="entropy, LF-DIS, t-test, outliers")
    ps.add_argument("--responses", required=True)
    ps.add_argument("--mu0", type=float, default=None, help="default: 0.25 * number of MCQs")
    ps.add_argument("--lf-threshold", type=float, default=0.05)
    ps.add_argument("--out", help="write the full report as JSON")
    ps.set_defaults(func=cmd_humaneval_students)

    pt = hsub.add_parser("teachers", parents=[common], help="agreement and acceptance summary")
    pt.add_argument("--judgments", required=True)
    pt.add_argument("--lf-flags", help="students JSON for the LF cross-table")
    pt.add_argument("--out")
    pt.set_defaults(func=cmd_humaneval_teachers)

    pp = hsub.add_parser("sample", parents=[common], help="entropy-bucket sampling of MCQ ids")
    pp.add_argument("--entropy-report", required=True, help="students JSON output")
    pp.add_argument("--buckets", type=int, default=5)
    pp.add_argument("--per-bucket", type=int, default=9)
    pp.add_argument("--out")
    pp.set_defaults(func=cmd_humaneval_sample)

    p = add_parser("model-select", help="rank metric reports by wins")
    p.add_argument("--reports", nargs="+", required=True)
    p.add_argument("--names", nargs="*")
    p.add_argument("--out")
    p.set_defaults(func=cmd_model_select)

    p = add_parser("kernel", help="kernel values for two bracketed trees")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.set_defaults(func=cmd_kernel)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KNOWN_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
