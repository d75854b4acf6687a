from __future__ import annotations

import json

import pytest

from predictor_service.parse_export import export_parses
from predictor_service.corpusio import read_corpus

from conftest import ToyBackend, write_corpus

BODY = "Hunden jagade katten. Katten sprang fort."


def make_corpus(tmp_path):
    return write_corpus(
        tmp_path / "corpus.jsonl",
        texts=[("t1", BODY)],
        mcqs=[
            {"id": "q1", "text_id": "t1", "key": "katten", "distractors": ["fort", "hunden idag"]}
        ],
    )


def test_layout_and_comments(tmp_path, toy_backend):
    corpus = make_corpus(tmp_path)
    out = tmp_path / "parses"
    report = export_parses(corpus, out, backend=toy_backend)
    assert report.texts == 1
    assert report.sentences == 2
    assert report.keys == 1
    assert report.refs == 2

    texts = (out / "texts.conllu").read_text(encoding="utf-8")
    assert "# newdoc id = t1" in texts
    assert "# text = Hunden jagade katten." in texts
    # char spans index into the source body
    for line in texts.splitlines():
        if line.startswith("# char_span"):
            start, end = map(int, line.split("=")[1].split())
            sentence_line = texts.splitlines()[texts.splitlines().index(line) - 1]
            assert BODY[start:end].strip().startswith(sentence_line.split("= ")[1].split()[0])

    keys = (out / "keys.conllu").read_text(encoding="utf-8")
    assert "# mcq_id = q1" in keys
    assert "1\tkatten\tkatten" in keys

    refs = (out / "refs.conllu").read_text(encoding="utf-8")
    assert "# ref = 0" in refs and "# ref = 1" in refs


def test_skip_and_log_on_parser_failure(tmp_path, caplog):
    corpus = make_corpus(tmp_path)
    backend = ToyBackend(fail_on={"fort"})
    with caplog.at_level("WARNING"):
        report = export_parses(corpus, tmp_path / "parses", backend=backend)
    assert report.refs == 1
    assert report.skipped == ["ref:q1:0"]
    assert "parser failed" in caplog.text


def test_generated_file_export(tmp_path, toy_backend):
    corpus = make_corpus(tmp_path)
    suggestions = tmp_path / "gen.jsonl"
    suggestions.write_text(
        json.dumps({"kind": "header", "schema_version": 1, "seed": 42}) + "\n"
        + json.dumps({"mcq_id": "q1", "distractors": ["hunden", "", "sprang fort"]}) + "\n",
        encoding="utf-8",
    )
    report = export_parses(corpus, tmp_path / "parses", backend=toy_backend, suggestions_file=suggestions)
    assert report.generated == 2  # the empty slot is skipped
    generated = (tmp_path / "parses" / "generated.conllu").read_text(encoding="utf-8")
    assert "# slot = 0" in generated and "# slot = 2" in generated
    assert "# slot = 1" not in generated
    assert "# text = sprang fort" in generated


def test_key_multi_sentence_keeps_first(tmp_path, toy_backend, caplog):
    corpus = write_corpus(
        tmp_path / "corpus.jsonl",
        texts=[("t1", "En mening.")],
        mcqs=[{"id": "q1", "text_id": "t1", "key": "två. meningar", "distractors": []}],
    )
    with caplog.at_level("WARNING"):
        report = export_parses(corpus, tmp_path / "parses", backend=toy_backend)
    assert report.keys == 1
    assert "keeping the first" in caplog.text


def test_released_format_reader(tmp_path):
    released = tmp_path / "released.json"
    released.write_text(
        json.dumps(
            {
                "data": [
                    {
                        "context": "en text",
                        "qas": [
                            {
                                "id": "Q1",
                                "question": "?",
                                "choices": [
                                    {"text": "svar", "type": "Correct answer"},
                                    {"text": "fel", "type": "Distractor"},
                                ],
                            }
                        ],
                    }
                ]
            },
            ensure_ascii=False,
        ),
        encoding="utf-8",
    )
    texts, mcqs = read_corpus(released)
    assert len(texts) == 1 and len(mcqs) == 1
    assert mcqs[0].key == "svar"
    assert mcqs[0].distractors == ("fel",)


def test_stanza_backend_missing_gives_clear_error(tmp_path):
    corpus = make_corpus(tmp_path)
    try:
        import stanza  # noqa: F401

        pytest.skip("stanza installed; the missing-dependency path is not reachable")
    except ImportError:
        pass
    from predictor_service.parse_export import ParseExportError

    with pytest.raises(ParseExportError, match="stanza"):
        export_parses(corpus, tmp_path / "parses")
