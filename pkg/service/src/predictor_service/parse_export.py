"""Dependency-parse export in the layout the baseline and metrics consume.

Writes, under the output directory:

    texts.conllu      one document per base text (# newdoc id), sentences
                      carrying # text and # char_span comments
    keys.conllu       one block per MCQ key (# mcq_id)
    refs.conllu       one block per reference distractor (# mcq_id, # ref)
    generated.conllu  one block per generated distractor when a suggestions
                      file is supplied (# mcq_id, # slot, # text)

The UD parser is a pluggable backend; the default uses Stanza when it is
installed (with its Swedish models downloaded). Sentences the backend fails
on are skipped and logged, never silently dropped.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .corpusio import read_corpus, read_suggestions

log = logging.getLogger(__name__)


class ParseExportError(Exception):
    pass


@dataclass(frozen=True)
class ParsedToken:
    form: str
    lemma: str
    upos: str
    feats: str  # "_" or "A=B|C=D"
    head: int
    deprel: str


@dataclass(frozen=True)
class ParsedSentence:
    text: str
    start: int  # character span within the parsed string
    end: int
    tokens: tuple[ParsedToken, ...]


class UdParserBackend(Protocol):
    def parse(self, text: str) -> list[ParsedSentence]: ...


class StanzaBackend:
    """Stanza-based backend; requires the stanza package and its models."""

    def __init__(self, lang: str = "sv") -> None:
        try:
            import stanza
        except ImportError as e:
            raise ParseExportError(
                "stanza is not installed; install the service with the [parse] "
                "extra and download the language models, or inject another backend"
            ) from e
        self._pipeline = stanza.Pipeline(
            lang=lang, processors="tokenize,pos,lemma,depparse", verbose=False
        )

    def parse(self, text: str) -> list[ParsedSentence]:
        doc = self._pipeline(text)
        out = []
        for sent in doc.sentences:
            words = sent.words
            tokens = tuple(
                ParsedToken(
                    form=w.text,
                    lemma=w.lemma or "_",
                    upos=w.upos or "X",
                    feats=w.feats or "_",
                    head=w.head,
                    deprel=w.deprel or "dep",
                )
                for w in words
            )
            start = sent.tokens[0].start_char
            end = sent.tokens[-1].end_char
            out.append(ParsedSentence(text=sent.text, start=start, end=end, tokens=tokens))
        return out


def _render_block(sentence: ParsedSentence, comments: list[str]) -> str:
    lines = [f"# {c}" for c in comments]
    for i, t in enumerate(sentence.tokens, start=1):
        lines.append(
            "\t".join(
                [str(i), t.form, t.lemma, t.upos, "_", t.feats, str(t.head), t.deprel, "_", "_"]
            )
        )
    return "\n".join(lines) + "\n\n"


@dataclass
class ExportReport:
    texts: int = 0
    sentences: int = 0
    keys: int = 0
    refs: int = 0
    generated: int = 0
    skipped: list[str] = field(default_factory=list)


def _parse_phrase(backend: UdParserBackend, phrase: str, what: str, report: ExportReport) -> ParsedSentence | None:
    try:
        sentences = backend.parse(phrase)
    except Exception as e:  # noqa: BLE001 - backend failures must not abort the export
        log.warning("parser failed on %s: %s", what, e)
        report.skipped.append(what)
        return None
    if not sentences:
        report.skipped.append(what)
        return None
    if len(sentences) > 1:
        log.warning("%s parsed into %d sentences; keeping the first", what, len(sentences))
    return sentences[0]


def export_parses(
    corpus_file: str | Path,
    out_dir: str | Path,
    backend: UdParserBackend | None = None,
    suggestions_file: str | Path | None = None,
) -> ExportReport:
    backend = backend or StanzaBackend()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    texts, mcqs = read_corpus(corpus_file)
    report = ExportReport()

    with (out_dir / "texts.conllu").open("w", encoding="utf-8") as fh:
        for text in texts:
            try:
                sentences = backend.parse(text.body)
            except Exception as e:  # noqa: BLE001
                log.warning("parser failed on text %s: %s", text.id, e)
                report.skipped.append(f"text:{text.id}")
                continue
            fh.write(f"# newdoc id = {text.id}\n")
            report.texts += 1
            for sent in sentences:
                fh.write(
                    _render_block(
                        sent,
                        [f"text = {sent.text}", f"char_span = {sent.start} {sent.end}"],
                    )
                )
                report.sentences += 1

    with (out_dir / "keys.conllu").open("w", encoding="utf-8") as fh:
        for mcq in mcqs:
            sent = _parse_phrase(backend, mcq.key, f"key:{mcq.id}", report)
            if sent is None:
                continue
            fh.write(_render_block(sent, [f"mcq_id = {mcq.id}", f"text = {mcq.key}"]))
            report.keys += 1

    with (out_dir / "refs.conllu").open("w", encoding="utf-8") as fh:
        for mcq in mcqs:
            for i, ref in enumerate(mcq.distractors):
                sent = _parse_phrase(backend, ref, f"ref:{mcq.id}:{i}", report)
                if sent is None:
                    continue
                fh.write(_render_block(sent, [f"mcq_id = {mcq.id}", f"ref = {i}", f"text = {ref}"]))
                report.refs += 1

    if suggestions_file is not None:
        suggestions = read_suggestions(suggestions_file)
        with (out_dir / "generated.conllu").open("w", encoding="utf-8") as fh:
            for mcq_id, distractors in suggestions.items():
                for slot, surface in enumerate(distractors):
                    if not surface.strip():
                        continue
                    sent = _parse_phrase(backend, surface, f"gen:{mcq_id}:{slot}", report)
                    if sent is None:
                        continue
                    fh.write(
                        _render_block(
                            sent, [f"mcq_id = {mcq_id}", f"slot = {slot}", f"text = {surface}"]
                        )
                    )
                    report.generated += 1
    return report
