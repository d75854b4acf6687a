"""MCQ corpus model: loading, validation and descriptive statistics.

A corpus file is UTF-8 JSON lines, one object per record:

    {"kind": "text", "id": "...", "body": "..."}
    {"kind": "mcq", "id": "...", "text_id": "...", "stem": "...",
     "choices": [{"surface": "...", "start": 12, "kind": "key"}, ...]}

``load_corpus`` also accepts the released SweQUAD-MC JSON layout (a single
object with a ``data`` list of contexts and their questions) and maps it into
the record model above.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

SPLITS = ("training", "development", "test")


class CorpusError(Exception):
    """Base error for corpus loading and validation."""


class CorpusFormatError(CorpusError):
    """Malformed corpus file; message carries line/record context."""


class CorpusValidationError(CorpusError):
    """A record violates a corpus invariant; message names the offending id."""


@dataclass(frozen=True)
class TextDoc:
    id: str
    body: str


@dataclass(frozen=True)
class AnswerSpan:
    """One answer option. ``start`` is a character offset into the base text,
    absent when the annotated surface was reformulated away from the text."""

    surface: str
    start: int | None = None
    kind: str = "distractor"  # "key" | "distractor"


@dataclass(frozen=True)
class Mcq:
    id: str
    text_id: str
    stem: str
    key: AnswerSpan
    distractors: tuple[AnswerSpan, ...]


@dataclass
class Corpus:
    split: str
    texts: list[TextDoc]
    mcqs: list[Mcq]
    _by_id: dict[str, TextDoc] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._by_id = {t.id: t for t in self.texts}

    def text_of(self, mcq: Mcq) -> TextDoc:
        return self._by_id[mcq.text_id]

    def text_by_id(self, text_id: str) -> TextDoc:
        return self._by_id[text_id]


@dataclass(frozen=True)
class MeanSd:
    mean: float
    sd: float

    def rounded(self, ndigits: int = 1) -> tuple[float, float]:
        return round(self.mean, ndigits), round(self.sd, ndigits)


@dataclass(frozen=True)
class StatsReport:
    """Descriptive statistics of one corpus split, lengths in whitespace words."""

    split: str
    n_texts: int
    n_mcqs: int
    distractor_count: MeanSd
    text_len: MeanSd
    key_len: MeanSd
    distractor_len: MeanSd
    key_distractor_gap: MeanSd  # |Len(key) - Len(distractor)| over all pairs

    def rows(self) -> list[tuple[str, str]]:
        def ms(v: MeanSd) -> str:
            return f"{v.mean:.1f} ± {v.sd:.1f}"

        return [
            ("# of texts", str(self.n_texts)),
            ("# of MCQs", str(self.n_mcqs)),
            ("# of D", ms(self.distractor_count)),
            ("Len(Text)", ms(self.text_len)),
            ("Len(A)", ms(self.key_len)),
            ("Len(D)", ms(self.distractor_len)),
            ("|Len(A) - Len(D)|", ms(self.key_distractor_gap)),
        ]

    def to_dict(self) -> dict:
        return {
            "split": self.split,
            "n_texts": self.n_texts,
            "n_mcqs": self.n_mcqs,
            "distractor_count": {"mean": self.distractor_count.mean, "sd": self.distractor_count.sd},
            "text_len": {"mean": self.text_len.mean, "sd": self.text_len.sd},
            "key_len": {"mean": self.key_len.mean, "sd": self.key_len.sd},
            "distractor_len": {"mean": self.distractor_len.mean, "sd": self.distractor_len.sd},
            "key_distractor_gap": {"mean": self.key_distractor_gap.mean, "sd": self.key_distractor_gap.sd},
        }


def word_len(s: str) -> int:
    """Length in words = number of maximal non-whitespace runs."""
    return len(s.split())


def _span_from_obj(obj: dict, mcq_id: str, record_no: int) -> AnswerSpan:
    try:
        surface = obj["surface"]
        kind = obj["kind"]
    except KeyError as e:
        raise CorpusFormatError(f"record {record_no}: choice of MCQ {mcq_id!r} misses field {e}") from None
    start = obj.get("start")
    if kind not in ("key", "distractor"):
        raise CorpusFormatError(f"record {record_no}: MCQ {mcq_id!r} has unknown choice kind {kind!r}")
    if not isinstance(surface, str) or not surface:
        raise CorpusValidationError(f"MCQ {mcq_id!r}: empty choice surface")
    if start is not None and (not isinstance(start, int) or start < 0):
        raise CorpusFormatError(f"record {record_no}: MCQ {mcq_id!r} has invalid start {start!r}")
    return AnswerSpan(surface=surface, start=start, kind=kind)


def _validate_mcq(mcq: Mcq, texts: dict[str, TextDoc]) -> None:
    if mcq.text_id not in texts:
        raise CorpusValidationError(f"MCQ {mcq.id!r}: unknown text_id {mcq.text_id!r}")
    if not mcq.stem:
        raise CorpusValidationError(f"MCQ {mcq.id!r}: empty stem")
    if mcq.key.kind != "key":
        raise CorpusValidationError(f"MCQ {mcq.id!r}: key span has kind {mcq.key.kind!r}")
    for d in mcq.distractors:
        if d.kind != "distractor":
            raise CorpusValidationError(f"MCQ {mcq.id!r}: distractor span has kind {d.kind!r}")
    body = texts[mcq.text_id].body
    for span in (mcq.key, *mcq.distractors):
        if span.start is not None:
            got = body[span.start : span.start + len(span.surface)]
            if got != span.surface:
                raise CorpusValidationError(
                    f"MCQ {mcq.id!r}: offset {span.start} reads {got!r}, expected {span.surface!r}"
                )


def load_corpus(path: str | Path, split: str) -> Corpus:
    """Load a corpus file (JSONL records or released SweQUAD-MC JSON)."""
    path = Path(path)
    raw = path.read_text(encoding="utf-8")
    stripped = raw.lstrip()
    if not stripped:
        raise CorpusFormatError(f"{path}: empty corpus file")
    if stripped.startswith("{") and '"data"' in stripped[:2000]:
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError:
            obj = None
        if isinstance(obj, dict) and "data" in obj:
            return _corpus_from_released(obj, split)
    return _corpus_from_records(raw, split, path)


def _corpus_from_records(raw: str, split: str, path: Path) -> Corpus:
    texts: list[TextDoc] = []
    seen_text_ids: dict[str, int] = {}
    mcq_objs: list[tuple[int, dict]] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorpusFormatError(f"{path}:{lineno}: invalid JSON ({e.msg})") from None
        kind = obj.get("kind")
        if kind == "header":
            continue
        if kind == "text":
            try:
                doc = TextDoc(id=str(obj["id"]), body=obj["body"])
            except KeyError as e:
                raise CorpusFormatError(f"{path}:{lineno}: text record misses field {e}") from None
            if not doc.body:
                raise CorpusValidationError(f"text {doc.id!r}: empty body")
            if doc.id in seen_text_ids:
                raise CorpusValidationError(
                    f"text {doc.id!r}: duplicate id (lines {seen_text_ids[doc.id]} and {lineno})"
                )
            seen_text_ids[doc.id] = lineno
            texts.append(doc)
        elif kind == "mcq":
            mcq_objs.append((lineno, obj))
        else:
            raise CorpusFormatError(f"{path}:{lineno}: unknown record kind {kind!r}")

    by_id = {t.id: t for t in texts}
    mcqs: list[Mcq] = []
    for lineno, obj in mcq_objs:
        try:
            mcq_id = str(obj["id"])
            choices = [_span_from_obj(c, mcq_id, lineno) for c in obj["choices"]]
            keys = [c for c in choices if c.kind == "key"]
            if len(keys) != 1:
                raise CorpusFormatError(f"{path}:{lineno}: MCQ {mcq_id!r} has {len(keys)} key choices")
            mcq = Mcq(
                id=mcq_id,
                text_id=str(obj["text_id"]),
                stem=obj["stem"],
                key=keys[0],
                distractors=tuple(c for c in choices if c.kind == "distractor"),
            )
        except KeyError as e:
            raise CorpusFormatError(f"{path}:{lineno}: mcq record misses field {e}") from None
        _validate_mcq(mcq, by_id)
        mcqs.append(mcq)
    return Corpus(split=split, texts=texts, mcqs=mcqs)


def _corpus_from_released(obj: dict, split: str) -> Corpus:
    """Adapter for the released dataset layout: a ``data`` list of contexts,
    each with ``qas`` whose choices carry ``text``, ``start`` and a ``type``
    naming the correct answer or a distractor. Offsets that do not match the
    context (reformulated phrases) are dropped, not rejected."""
    texts: list[TextDoc] = []
    mcqs: list[Mcq] = []
    for ti, entry in enumerate(obj["data"]):
        body = entry.get("context") or entry.get("text")
        if not body:
            raise CorpusFormatError(f"data[{ti}]: no context text")
        text_id = str(entry.get("id", f"{split}-t{ti:04d}"))
        texts.append(TextDoc(id=text_id, body=body))
        for qi, qa in enumerate(entry.get("qas", [])):
            mcq_id = str(qa.get("id", f"{text_id}-q{qi:02d}"))
            stem = qa.get("question", "")
            key: AnswerSpan | None = None
            distractors: list[AnswerSpan] = []
            for choice in qa.get("choices", []):
                surface = choice.get("text", "")
                if not surface:
                    continue
                ctype = str(choice.get("type", "")).strip().lower()
                kind = "key" if ctype in ("correct answer", "key", "answer") else "distractor"
                start = choice.get("start")
                if not isinstance(start, int) or body[start : start + len(surface)] != surface:
                    start = None
                span = AnswerSpan(surface=surface, start=start, kind=kind)
                if kind == "key":
                    key = span
                else:
                    distractors.append(span)
            if key is None:
                raise CorpusFormatError(f"MCQ {mcq_id!r}: no correct-answer choice")
            mcqs.append(Mcq(id=mcq_id, text_id=text_id, stem=stem, key=key, distractors=tuple(distractors)))
    corpus = Corpus(split=split, texts=texts, mcqs=mcqs)
    for mcq in corpus.mcqs:
        _validate_mcq(mcq, corpus._by_id)
    return corpus


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Serialize to the JSONL record format; load(save(c)) == c."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for t in corpus.texts:
            fh.write(json.dumps({"kind": "text", "id": t.id, "body": t.body}, ensure_ascii=False) + "\n")
        for m in corpus.mcqs:
            choices = [
                {"surface": s.surface, "start": s.start, "kind": s.kind} for s in (m.key, *m.distractors)
            ]
            fh.write(
                json.dumps(
                    {"kind": "mcq", "id": m.id, "text_id": m.text_id, "stem": m.stem, "choices": choices},
                    ensure_ascii=False,
                )
                + "\n"
            )


def check_disjoint_texts(corpora: Iterable[Corpus]) -> None:
    """Text id sets of different splits must not overlap."""
    seen: dict[str, str] = {}
    for corpus in corpora:
        for t in corpus.texts:
            if t.id in seen and seen[t.id] != corpus.split:
                raise CorpusValidationError(f"text {t.id!r} appears in splits {seen[t.id]!r} and {corpus.split!r}")
            seen[t.id] = corpus.split


def _mean_sd(values: list[float], sample_sd: bool) -> MeanSd:
    if not values:
        raise CorpusError("no values to aggregate")
    mean = statistics.fmean(values)
    if len(values) < 2:
        sd = 0.0
    elif sample_sd:
        sd = statistics.stdev(values)
    else:
        sd = statistics.pstdev(values)
    return MeanSd(mean=mean, sd=sd)


def corpus_stats(corpus: Corpus, sample_sd: bool = True) -> StatsReport:
    """Descriptive statistics over one split.

    The key/distractor length gap is averaged over every (key, distractor)
    pair. ``sample_sd`` selects the n-1 denominator (default) over n.
    """
    if not corpus.texts or not corpus.mcqs:
        raise CorpusError(f"split {corpus.split!r}: empty corpus")
    dis_counts = [float(len(m.distractors)) for m in corpus.mcqs]
    text_lens = [float(word_len(t.body)) for t in corpus.texts]
    key_lens = [float(word_len(m.key.surface)) for m in corpus.mcqs]
    dis_lens = [float(word_len(d.surface)) for m in corpus.mcqs for d in m.distractors]
    gaps = [
        float(abs(word_len(m.key.surface) - word_len(d.surface)))
        for m in corpus.mcqs
        for d in m.distractors
    ]
    return StatsReport(
        split=corpus.split,
        n_texts=len(corpus.texts),
        n_mcqs=len(corpus.mcqs),
        distractor_count=_mean_sd(dis_counts, sample_sd),
        text_len=_mean_sd(text_lens, sample_sd),
        key_len=_mean_sd(key_lens, sample_sd),
        distractor_len=_mean_sd(dis_lens, sample_sd),
        key_distractor_gap=_mean_sd(gaps, sample_sd),
    )
