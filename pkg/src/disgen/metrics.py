"""Quantitative metric suite over generated-distractor sets.

String matching is NFKC-normalized, whitespace-collapsed and case-folded
everywhere except the capitalization metric, which by construction needs raw
case. Percentages are over MCQs; the kernel statistics aggregate normalized
tree-kernel values of every (generated distractor, key) parse pair, GRCT
without lexical nodes, with the mode taken after rounding to 2 decimals.
"""

from __future__ import annotations

import json
import re
import statistics
import unicodedata
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .corpus import Corpus
from .grct import to_grct
from .kernel import KernelParams, ncptk
from .parses import ParseIndex

_SPECIAL_TOKENS = re.compile(r"\[(?:CLS|SEP|MASK|PAD|UNK)\]")


class MetricsError(Exception):
    pass


def strip_special_tokens(s: str) -> str:
    return _SPECIAL_TOKENS.sub(" ", s)


def norm_match(s: str) -> str:
    """Canonical form used for all equality and substring checks."""
    s = unicodedata.normalize("NFKC", s)
    return " ".join(s.split()).casefold()


@dataclass
class GeneratedSet:
    """Exactly three generated distractor strings per MCQ id."""

    by_mcq: dict[str, tuple[str, str, str]]

    def __post_init__(self) -> None:
        for mcq_id, distractors in self.by_mcq.items():
            if len(distractors) != 3:
                raise MetricsError(f"MCQ {mcq_id!r}: expected 3 distractors, got {len(distractors)}")

    def __getitem__(self, mcq_id: str) -> tuple[str, str, str]:
        return self.by_mcq[mcq_id]

    def __contains__(self, mcq_id: str) -> bool:
        return mcq_id in self.by_mcq


def load_generated(path: str | Path) -> GeneratedSet:
    """Read a suggestions file: header record plus {"mcq_id", "distractors"}."""
    by_mcq: dict[str, tuple[str, str, str]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("kind") == "header":
                continue
            try:
                by_mcq[str(obj["mcq_id"])] = tuple(obj["distractors"])
            except KeyError as e:
                raise MetricsError(f"{path}:{lineno}: suggestions record misses {e}") from None
    return GeneratedSet(by_mcq=by_mcq)


@dataclass(frozen=True)
class ModeStat:
    value: float  # rounded to 2 decimals
    share: float  # percentage of pairs in that bin


@dataclass
class MetricReport:
    n_mcqs: int
    dis_recall: float
    any_dis_ref_match: float
    any_dis_in_text: float
    key_in_dis: float
    any_same_dis: float
    all_same_dis: float
    any_dis_rep: float
    any_dis_empty: float
    any_dis_from_train_dis: float | None  # None = NA (no training corpus)
    mean_ncptk: float | None
    median_ncptk: float | None
    mode_ncptk: ModeStat | None
    ncptk_pairs: int
    ncptk_excluded: int
    # extended metric set
    any_dis_cap_diff: float
    any_dis_is_train_dis: float | None
    any_dis_in_any_train_text: float | None
    any_dis_in_train_text_not_own: float | None
    all_dis_in_text: float
    all_dis_in_train_text: float | None
    all_dis_are_train_dis: float | None

    def to_dict(self) -> dict:
        def mode_dict(m: ModeStat | None):
            return None if m is None else {"value": m.value, "share": m.share}

        return {
            "n_mcqs": self.n_mcqs,
            "dis_recall": self.dis_recall,
            "any_dis_ref_match": self.any_dis_ref_match,
            "any_dis_in_text": self.any_dis_in_text,
            "key_in_dis": self.key_in_dis,
            "any_same_dis": self.any_same_dis,
            "all_same_dis": self.all_same_dis,
            "any_dis_rep": self.any_dis_rep,
            "any_dis_empty": self.any_dis_empty,
            "any_dis_from_train_dis": self.any_dis_from_train_dis,
            "mean_ncptk": self.mean_ncptk,
            "median_ncptk": self.median_ncptk,
            "mode_ncptk": mode_dict(self.mode_ncptk),
            "ncptk_pairs": self.ncptk_pairs,
            "ncptk_excluded": self.ncptk_excluded,
            "any_dis_cap_diff": self.any_dis_cap_diff,
            "any_dis_is_train_dis": self.any_dis_is_train_dis,
            "any_dis_in_any_train_text": self.any_dis_in_any_train_text,
            "any_dis_in_train_text_not_own": self.any_dis_in_train_text_not_own,
            "all_dis_in_text": self.all_dis_in_text,
            "all_dis_in_train_text": self.all_dis_in_train_text,
            "all_dis_are_train_dis": self.all_dis_are_train_dis,
        }

    @staticmethod
    def from_dict(obj: Mapping) -> "MetricReport":
        mode = obj.get("mode_ncptk")
        return MetricReport(
            n_mcqs=obj["n_mcqs"],
            dis_recall=obj["dis_recall"],
            any_dis_ref_match=obj["any_dis_ref_match"],
            any_dis_in_text=obj["any_dis_in_text"],
            key_in_dis=obj["key_in_dis"],
            any_same_dis=obj["any_same_dis"],
            all_same_dis=obj["all_same_dis"],
            any_dis_rep=obj["any_dis_rep"],
            any_dis_empty=obj["any_dis_empty"],
            any_dis_from_train_dis=obj.get("any_dis_from_train_dis"),
            mean_ncptk=obj.get("mean_ncptk"),
            median_ncptk=obj.get("median_ncptk"),
            mode_ncptk=None if mode is None else ModeStat(value=mode["value"], share=mode["share"]),
            ncptk_pairs=obj.get("ncptk_pairs", 0),
            ncptk_excluded=obj.get("ncptk_excluded", 0),
            any_dis_cap_diff=obj.get("any_dis_cap_diff", 0.0),
            any_dis_is_train_dis=obj.get("any_dis_is_train_dis"),
            any_dis_in_any_train_text=obj.get("any_dis_in_any_train_text"),
            any_dis_in_train_text_not_own=obj.get("any_dis_in_train_text_not_own"),
            all_dis_in_text=obj.get("all_dis_in_text", 0.0),
            all_dis_in_train_text=obj.get("all_dis_in_train_text"),
            all_dis_are_train_dis=obj.get("all_dis_are_train_dis"),
        )


def _case_class(ch: str) -> str:
    if ch.isupper():
        return "upper"
    if ch.islower():
        return "lower"
    return "other"


def _has_contiguous_repeat(s: str) -> bool:
    words = norm_match(s).split()
    return any(a == b for a, b in zip(words, words[1:]))


def evaluate(
    generated: GeneratedSet,
    corpus: Corpus,
    train_corpus: Corpus | None = None,
    parses: ParseIndex | None = None,
    params: KernelParams = KernelParams(),
) -> MetricReport:
    """Compute the full metric suite for one evaluated split."""
    missing = [m.id for m in corpus.mcqs if m.id not in generated]
    if missing:
        raise MetricsError(f"generated set misses MCQs: {', '.join(sorted(missing))}")

    n = len(corpus.mcqs)
    if n == 0:
        raise MetricsError("empty corpus")

    train_dis: set[str] = set()
    train_texts: list[tuple[str, str]] = []  # (text_id, normalized body)
    if train_corpus is not None:
        train_dis = {norm_match(d.surface) for m in train_corpus.mcqs for d in m.distractors}
        train_texts = [(t.id, norm_match(t.body)) for t in train_corpus.texts]

    total_refs = 0
    recalled_refs = 0
    counts = Counter()
    ncptk_values: list[float] = []
    ncptk_excluded = 0

    for mcq in corpus.mcqs:
        raw = generated[mcq.id]
        cleaned = [strip_special_tokens(s) for s in raw]
        normed = [norm_match(s) for s in cleaned]
        nonempty = [s for s in normed if s]
        body_norm = norm_match(corpus.text_of(mcq).body)
        key_norm = norm_match(mcq.key.surface)
        refs = [norm_match(d.surface) for d in mcq.distractors]

        total_refs += len(refs)
        recalled_refs += sum(1 for ref in refs if ref in normed)
        if any(g in refs for g in normed):
            counts["any_dis_ref_match"] += 1
        in_text = [g for g in nonempty if g in body_norm]
        if in_text:
            counts["any_dis_in_text"] += 1
        if len(nonempty) == 3 and len(in_text) == 3:
            counts["all_dis_in_text"] += 1
        if key_norm in normed:
            counts["key_in_dis"] += 1
        if len(set(normed)) < 3:
            counts["any_same_dis"] += 1
        if len(set(normed)) == 1:
            counts["all_same_dis"] += 1
        if any(_has_contiguous_repeat(s) for s in cleaned):
            counts["any_dis_rep"] += 1
        if any(not s for s in normed):
            counts["any_dis_empty"] += 1

        # capitalization difference uses raw case, skipping empty strings
        key_case = _case_class(mcq.key.surface[0])
        leading = [s.strip() for s in cleaned if s.strip()]
        if any(_case_class(s[0]) != key_case for s in leading):
            counts["any_dis_cap_diff"] += 1

        if train_corpus is not None:
            is_train = [g in train_dis for g in nonempty]
            if any(is_train):
                counts["any_dis_is_train_dis"] += 1
            if len(nonempty) == 3 and all(is_train):
                counts["all_dis_are_train_dis"] += 1
            if any(g in train_dis and g not in body_norm for g in nonempty):
                counts["any_dis_from_train_dis"] += 1
            in_any_train = [any(g in body for _, body in train_texts) for g in nonempty]
            if any(in_any_train):
                counts["any_dis_in_any_train_text"] += 1
            if len(nonempty) == 3 and all(in_any_train):
                counts["all_dis_in_train_text"] += 1
            if any(
                hit and g not in body_norm for g, hit in zip(nonempty, in_any_train)
            ):
                counts["any_dis_in_train_text_not_own"] += 1

        if parses is not None:
            key_tree = parses.key_tree(mcq.id)
            for slot, s in enumerate(raw):
                if not norm_match(strip_special_tokens(s)):
                    ncptk_excluded += 1
                    continue
                gen_tree = parses.generated_tree(mcq.id, slot)
                if gen_tree is None or key_tree is None:
                    ncptk_excluded += 1
                    continue
                # a stale parse (text comment disagreeing with the generated
                # string) counts as unparsed rather than scoring a wrong tree
                if gen_tree.text is not None and norm_match(gen_tree.text) != norm_match(s):
                    ncptk_excluded += 1
                    continue
                ncptk_values.append(
                    ncptk(
                        to_grct(gen_tree, include_lexicals=False),
                        to_grct(key_tree, include_lexicals=False),
                        params,
                    )
                )

    def pct(name: str) -> float:
        return 100.0 * counts[name] / n

    def pct_or_na(name: str) -> float | None:
        return None if train_corpus is None else pct(name)

    mean_v = median_v = None
    mode_v = None
    if ncptk_values:
        mean_v = statistics.fmean(ncptk_values)
        median_v = statistics.median(ncptk_values)
        bins = Counter(round(v, 2) for v in ncptk_values)
        top_count = max(bins.values())
        best = max(v for v, c in bins.items() if c == top_count)
        mode_v = ModeStat(value=best, share=100.0 * top_count / len(ncptk_values))

    return MetricReport(
        n_mcqs=n,
        dis_recall=100.0 * recalled_refs / total_refs if total_refs else 0.0,
        any_dis_ref_match=pct("any_dis_ref_match"),
        any_dis_in_text=pct("any_dis_in_text"),
        key_in_dis=pct("key_in_dis"),
        any_same_dis=pct("any_same_dis"),
        all_same_dis=pct("all_same_dis"),
        any_dis_rep=pct("any_dis_rep"),
        any_dis_empty=pct("any_dis_empty"),
        any_dis_from_train_dis=pct_or_na("any_dis_from_train_dis"),
        mean_ncptk=mean_v,
        median_ncptk=median_v,
        mode_ncptk=mode_v,
        ncptk_pairs=len(ncptk_values),
        ncptk_excluded=ncptk_excluded,
        any_dis_cap_diff=pct("any_dis_cap_diff"),
        any_dis_is_train_dis=pct_or_na("any_dis_is_train_dis"),
        any_dis_in_any_train_text=pct_or_na("any_dis_in_any_train_text"),
        any_dis_in_train_text_not_own=pct_or_na("any_dis_in_train_text_not_own"),
        all_dis_in_text=pct("all_dis_in_text"),
        all_dis_in_train_text=pct_or_na("all_dis_in_train_text"),
        all_dis_are_train_dis=pct_or_na("all_dis_are_train_dis"),
    )


MAIN_METRIC_ROWS: list[tuple[str, str, str]] = [
    # (field, printable label, better direction)
    ("dis_recall", "DisRecall", "up"),
    ("any_dis_ref_match", "AnyDisRefMatch", "up"),
    ("any_dis_in_text", "AnyDisInText", "up"),
    ("key_in_dis", "KeyInDis", "down"),
    ("any_same_dis", "AnySameDis", "down"),
    ("all_same_dis", "AllSameDis", "down"),
    ("any_dis_rep", "AnyDisRep", "down"),
    ("any_dis_empty", "AnyDisEmpty", "down"),
    ("any_dis_from_train_dis", "AnyDisFromTrainDis", "down"),
    ("mean_ncptk", "MeanNCPTK", "up"),
    ("median_ncptk", "MedianNCPTK", "up"),
    ("mode_ncptk", "ModeNCPTK", "up"),
]


def format_report(report: MetricReport) -> str:
    """Aligned two-column table of the main and extended metrics."""

    def fmt(field_name: str) -> str:
        v = getattr(report, field_name)
        if v is None:
            return "NA"
        if isinstance(v, ModeStat):
            return f"{v.value:.2f} ({v.share:.2f}%)"
        if field_name in ("mean_ncptk", "median_ncptk"):
            return f"{v:.2f}"
        return f"{v:.2f}%"

    rows = [(label, fmt(name)) for name, label, _ in MAIN_METRIC_ROWS]
    rows += [
        ("AnyDisCapDiff", fmt("any_dis_cap_diff")),
        ("AnyDisIsTrainDis", fmt("any_dis_is_train_dis")),
        ("AnyDisInAnyTrainText", fmt("any_dis_in_any_train_text")),
        ("AnyDisInTrainTextNotOwn", fmt("any_dis_in_train_text_not_own")),
        ("AllDisInText", fmt("all_dis_in_text")),
        ("AllDisInTrainText", fmt("all_dis_in_train_text")),
        ("AllDisAreTrainDis", fmt("all_dis_are_train_dis")),
    ]
    width = max(len(label) for label, _ in rows)
    return "\n".join(f"{label:<{width}}  {value}" for label, value in rows)
