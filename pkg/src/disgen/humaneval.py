"""Statistics for the two-stage human evaluation.

Student stage: per-question entropy between key and distractor-group choice
probabilities (natural log), low-frequency distractor flags at the strict 5%
threshold, a one-sample two-tailed t-test on per-subject correct counts, and
IQR outlier flags. Teacher stage: acceptance summaries and the multirater
concordant/discordant-pair agreement coefficient over accept/reject ranks.

Responses CSV: ``subject_id,mcq_id,choice`` with choice in key|d1|d2|d3.
Judgments CSV: ``teacher_id,mcq_id,slot,verdict,reason_category,reason_text``.
"""

from __future__ import annotations

import csv
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy import special

SLOTS = ("d1", "d2", "d3")
CHOICES = ("key",) + SLOTS


class HumanEvalError(Exception):
    pass


@dataclass
class ResponseMatrix:
    """subjects x MCQs table of chosen option index (0 = key, 1..3 = slot)."""

    subjects: tuple[str, ...]
    mcq_ids: tuple[str, ...]
    choices: dict[tuple[str, str], int]

    def __post_init__(self) -> None:
        for subject in self.subjects:
            for mcq_id in self.mcq_ids:
                if (subject, mcq_id) not in self.choices:
                    raise HumanEvalError(f"missing response: subject {subject!r}, MCQ {mcq_id!r}")
        for (subject, mcq_id), idx in self.choices.items():
            if idx not in (0, 1, 2, 3):
                raise HumanEvalError(f"subject {subject!r}, MCQ {mcq_id!r}: choice index {idx} invalid")

    @property
    def n_subjects(self) -> int:
        return len(self.subjects)

    def counts(self, mcq_id: str) -> Counter:
        return Counter(self.choices[(s, mcq_id)] for s in self.subjects)

    def correct_counts(self) -> list[int]:
        """Number of key choices per subject, in subject order."""
        return [
            sum(1 for m in self.mcq_ids if self.choices[(s, m)] == 0) for s in self.subjects
        ]


def load_responses(path: str | Path) -> ResponseMatrix:
    choices: dict[tuple[str, str], int] = {}
    subjects: list[str] = []
    mcq_ids: list[str] = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"subject_id", "mcq_id", "choice"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise HumanEvalError(f"{path}: responses header must contain {sorted(required)}")
        for row in reader:
            subject, mcq_id, choice = row["subject_id"], row["mcq_id"], row["choice"].strip().lower()
            if choice not in CHOICES:
                raise HumanEvalError(f"{path}: unknown choice {choice!r} (expected one of {CHOICES})")
            if subject not in subjects:
                subjects.append(subject)
            if mcq_id not in mcq_ids:
                mcq_ids.append(mcq_id)
            key = (subject, mcq_id)
            if key in choices:
                raise HumanEvalError(f"{path}: duplicate response for {key}")
            choices[key] = CHOICES.index(choice)
    return ResponseMatrix(subjects=tuple(subjects), mcq_ids=tuple(mcq_ids), choices=choices)


@dataclass(frozen=True)
class EntropyRow:
    mcq_id: str
    p_key: float
    p_distractors: float
    entropy: float  # nats, between the key and the distractor group
    slot_shares: tuple[float, float, float]


def question_entropy(responses: ResponseMatrix, mcq_id: str) -> EntropyRow:
    counts = responses.counts(mcq_id)
    n = sum(counts.values())
    if n == 0:
        raise HumanEvalError(f"MCQ {mcq_id!r}: no responses")
    p_key = counts[0] / n
    p_dis = 1.0 - p_key

    def term(p: float) -> float:
        return 0.0 if p == 0.0 else -p * math.log(p)

    return EntropyRow(
        mcq_id=mcq_id,
        p_key=p_key,
        p_distractors=p_dis,
        entropy=term(p_key) + term(p_dis),
        slot_shares=tuple(counts[i] / n for i in (1, 2, 3)),
    )


def entropy_report(responses: ResponseMatrix) -> list[EntropyRow]:
    return [question_entropy(responses, m) for m in responses.mcq_ids]


@dataclass
class LfDisReport:
    threshold: float
    flags: dict[tuple[str, int], bool]  # (mcq_id, slot 1..3) -> is low-frequency
    n_mcqs: int
    mcqs_losing_any: int
    mcqs_losing_all: int
    mcqs_keeping_all: int
    flagged_share: float  # share of all distractor slots flagged

    def pct(self, count: int) -> float:
        return 100.0 * count / self.n_mcqs


def lf_dis(responses: ResponseMatrix, threshold: float = 0.05) -> LfDisReport:
    """Flag distractors chosen by strictly less than ``threshold`` of subjects."""
    flags: dict[tuple[str, int], bool] = {}
    losing_any = losing_all = keeping_all = 0
    for mcq_id in responses.mcq_ids:
        counts = responses.counts(mcq_id)
        n = sum(counts.values())
        row = [counts[slot] / n < threshold for slot in (1, 2, 3)]
        for slot, flagged in zip((1, 2, 3), row):
            flags[(mcq_id, slot)] = flagged
        losing_any += any(row)
        losing_all += all(row)
        keeping_all += not any(row)
    total = len(flags)
    return LfDisReport(
        threshold=threshold,
        flags=flags,
        n_mcqs=len(responses.mcq_ids),
        mcqs_losing_any=losing_any,
        mcqs_losing_all=losing_all,
        mcqs_keeping_all=keeping_all,
        flagged_share=100.0 * sum(flags.values()) / total if total else 0.0,
    )


@dataclass(frozen=True)
class TTestResult:
    n: int
    mean: float
    se: float
    t: float
    df: int
    p_two_tailed: float
    effect_r: float


def _ttest(n: int, mean: float, se: float, mu0: float) -> TTestResult:
    df = n - 1
    t = (mean - mu0) / se
    # two-tailed p via the regularized incomplete beta on df/(df + t^2)
    p = float(special.betainc(df / 2.0, 0.5, df / (df + t * t))) if t != 0.0 else 1.0
    r = math.sqrt(t * t / (t * t + df))
    return TTestResult(n=n, mean=mean, se=se, t=t, df=df, p_two_tailed=p, effect_r=r)


def one_sample_ttest(values: Sequence[float], mu0: float) -> TTestResult:
    if len(values) < 2:
        raise HumanEvalError("t-test needs at least 2 observations")
    n = len(values)
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1))
    if sd == 0.0:
        raise HumanEvalError("t-test undefined for zero sample variance")
    return _ttest(n, mean, sd / math.sqrt(n), mu0)


def ttest_from_summary(n: int, mean: float, se: float, mu0: float) -> TTestResult:
    """Same test from already-aggregated sample statistics."""
    if n < 2:
        raise HumanEvalError("t-test needs at least 2 observations")
    if se <= 0.0:
        raise HumanEvalError("standard error must be positive")
    return _ttest(n, mean, se, mu0)


def iqr_outliers(values: Sequence[float], multiplier: float = 1.5) -> list[bool]:
    """Flag values outside Q1 - m*IQR .. Q3 + m*IQR, quartiles by linear
    interpolation."""
    if len(values) < 4:
        raise HumanEvalError("outlier check needs at least 4 observations")
    q1, q3 = np.percentile(values, [25, 75], method="linear")
    iqr = q3 - q1
    lo, hi = q1 - multiplier * iqr, q3 + multiplier * iqr
    return [v < lo or v > hi for v in values]


@dataclass(frozen=True)
class Judgment:
    verdict: str  # "accept" | "reject"
    reason_category: str = ""
    reason_text: str = ""


@dataclass
class JudgmentMatrix:
    """teachers x (MCQ, slot) table of accept/reject decisions."""

    teachers: tuple[str, ...]
    mcq_ids: tuple[str, ...]
    slots: tuple[int, ...]  # slot numbers, typically (1, 2, 3)
    cells: dict[tuple[str, str, int], Judgment]

    def __post_init__(self) -> None:
        for teacher in self.teachers:
            for mcq_id in self.mcq_ids:
                for slot in self.slots:
                    if (teacher, mcq_id, slot) not in self.cells:
                        raise HumanEvalError(
                            f"missing judgment: teacher {teacher!r}, MCQ {mcq_id!r}, slot {slot}"
                        )

    def verdict(self, teacher: str, mcq_id: str, slot: int) -> str:
        return self.cells[(teacher, mcq_id, slot)].verdict

    def accepted(self, teacher: str, mcq_id: str, slot: int) -> bool:
        return self.verdict(teacher, mcq_id, slot) == "accept"


def load_judgments(path: str | Path) -> JudgmentMatrix:
    cells: dict[tuple[str, str, int], Judgment] = {}
    teachers: list[str] = []
    mcq_ids: list[str] = []
    slots: set[int] = set()
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"teacher_id", "mcq_id", "slot", "verdict"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise HumanEvalError(f"{path}: judgments header must contain {sorted(required)}")
        for row in reader:
            teacher, mcq_id = row["teacher_id"], row["mcq_id"]
            raw_slot = row["slot"].strip().lower()
            slot = int(raw_slot[1:]) if raw_slot.startswith("d") else int(raw_slot)
            verdict = row["verdict"].strip().lower()
            if verdict not in ("accept", "reject"):
                raise HumanEvalError(f"{path}: unknown verdict {verdict!r}")
            if teacher not in teachers:
                teachers.append(teacher)
            if mcq_id not in mcq_ids:
                mcq_ids.append(mcq_id)
            slots.add(slot)
            cells[(teacher, mcq_id, slot)] = Judgment(
                verdict=verdict,
                reason_category=(row.get("reason_category") or "").strip(),
                reason_text=(row.get("reason_text") or "").strip(),
            )
    return JudgmentMatrix(
        teachers=tuple(teachers), mcq_ids=tuple(mcq_ids), slots=tuple(sorted(slots)), cells=cells
    )


def gamma_n(judgments: JudgmentMatrix) -> float:
    """Multirater agreement: (C - D) / (C + D) over concordant/discordant
    item-pair orderings, summed over every rater pair and every MCQ.
    Accepted ranks 1, rejected 2; ties are skipped."""
    concordant = discordant = 0
    rank = {"accept": 1, "reject": 2}
    teachers = judgments.teachers
    for mcq_id in judgments.mcq_ids:
        for a in range(len(teachers)):
            for b in range(a + 1, len(teachers)):
                for i_idx in range(len(judgments.slots)):
                    for j_idx in range(i_idx + 1, len(judgments.slots)):
                        si, sj = judgments.slots[i_idx], judgments.slots[j_idx]
                        da = rank[judgments.verdict(teachers[a], mcq_id, si)] - rank[
                            judgments.verdict(teachers[a], mcq_id, sj)
                        ]
                        db = rank[judgments.verdict(teachers[b], mcq_id, si)] - rank[
                            judgments.verdict(teachers[b], mcq_id, sj)
                        ]
                        if da == 0 or db == 0:
                            continue
                        if (da > 0) == (db > 0):
                            concordant += 1
                        else:
                            discordant += 1
    if concordant + discordant == 0:
        raise HumanEvalError("agreement undefined: no strictly ordered item pairs")
    return (concordant - discordant) / (concordant + discordant)


def entropy_buckets(
    entropies: Mapping[str, float],
    n_buckets: int = 5,
    per_bucket: int = 9,
    seed: int = 42,
) -> list[str]:
    """Sort MCQs by entropy, split into contiguous size-balanced buckets
    (remainder spread over the first ones), sample per_bucket ids from each."""
    ids = sorted(entropies.keys(), key=lambda k: (entropies[k], k))
    n = len(ids)
    if n < n_buckets * per_bucket:
        raise HumanEvalError(
            f"need at least {n_buckets * per_bucket} MCQs to sample, got {n}"
        )
    base, remainder = divmod(n, n_buckets)
    rng = random.Random(seed)
    sampled: list[str] = []
    start = 0
    for b in range(n_buckets):
        size = base + (1 if b < remainder else 0)
        bucket = ids[start : start + size]
        start += size
        sampled.extend(sorted(rng.sample(bucket, per_bucket)))
    return sampled


@dataclass
class AcceptanceSummary:
    n_mcqs: int
    n_teachers: int
    mean_accepted_per_mcq_per_teacher: float
    pct_all_teachers_accept_any: float
    pct_majority_accept_any: float
    pct_all_teachers_accept_all: float
    pct_all_teachers_reject_all: float
    pct_majority_accept_all: float
    pct_majority_reject_all: float
    rejection_reasons: dict[str, int]
    # cross-table over MCQs with >=1 low-frequency distractor: keys are
    # (n LF slots accepted by majority, n LF slots rejected by majority)
    lf_cross_table: dict[tuple[int, int], int] | None = None
    mcqs_with_lf: int | None = None


def acceptance_summary(
    judgments: JudgmentMatrix,
    lf_flags: Mapping[tuple[str, int], bool] | None = None,
) -> AcceptanceSummary:
    n_mcqs = len(judgments.mcq_ids)
    n_teachers = len(judgments.teachers)
    majority = n_teachers / 2.0  # strictly more than half

    total_accepts = sum(
        1 for cell in judgments.cells.values() if cell.verdict == "accept"
    )
    all_any = maj_any = all_acc_all = all_rej_all = maj_acc_all = maj_rej_all = 0
    for mcq_id in judgments.mcq_ids:
        per_teacher_any = [
            any(judgments.accepted(t, mcq_id, s) for s in judgments.slots) for t in judgments.teachers
        ]
        per_teacher_all = [
            all(judgments.accepted(t, mcq_id, s) for s in judgments.slots) for t in judgments.teachers
        ]
        per_teacher_none = [
            not any(judgments.accepted(t, mcq_id, s) for s in judgments.slots)
            for t in judgments.teachers
        ]
        all_any += all(per_teacher_any)
        maj_any += sum(per_teacher_any) > majority
        all_acc_all += all(per_teacher_all)
        all_rej_all += all(per_teacher_none)
        maj_acc_all += sum(per_teacher_all) > majority
        maj_rej_all += sum(per_teacher_none) > majority

    reasons = Counter(
        cell.reason_category
        for cell in judgments.cells.values()
        if cell.verdict == "reject" and cell.reason_category
    )

    lf_table: dict[tuple[int, int], int] | None = None
    mcqs_with_lf: int | None = None
    if lf_flags is not None:
        lf_table = defaultdict(int)
        mcqs_with_lf = 0
        for mcq_id in judgments.mcq_ids:
            lf_slots = [s for s in judgments.slots if lf_flags.get((mcq_id, s), False)]
            if not lf_slots:
                continue
            mcqs_with_lf += 1
            accepted = rejected = 0
            for s in lf_slots:
                votes = sum(judgments.accepted(t, mcq_id, s) for t in judgments.teachers)
                if votes > majority:
                    accepted += 1
                else:
                    rejected += 1
            lf_table[(accepted, rejected)] += 1
        lf_table = dict(lf_table)

    pct = lambda c: 100.0 * c / n_mcqs
    return AcceptanceSummary(
        n_mcqs=n_mcqs,
        n_teachers=n_teachers,
        mean_accepted_per_mcq_per_teacher=total_accepts / (n_mcqs * n_teachers),
        pct_all_teachers_accept_any=pct(all_any),
        pct_majority_accept_any=pct(maj_any),
        pct_all_teachers_accept_all=pct(all_acc_all),
        pct_all_teachers_reject_all=pct(all_rej_all),
        pct_majority_accept_all=pct(maj_acc_all),
        pct_majority_reject_all=pct(maj_rej_all),
        rejection_reasons=dict(reasons),
        lf_cross_table=lf_table,
        mcqs_with_lf=mcqs_with_lf,
    )
