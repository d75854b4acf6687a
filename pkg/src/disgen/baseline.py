"""Tree-kernel baseline distractor generator.

For each MCQ the sentence containing the key is dropped from the base text;
in the remaining sentences every subtree whose root shares the key root's
UPOS and features becomes a candidate, scored by the normalized kernel
between its GRCT and the key's GRCT (both without lexical nodes). The top-k
candidate texts are the suggestions, padded with empty ones when the text
offers fewer than k.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Corpus, Mcq
from .grct import to_grct
from .kernel import KernelParams, ncptk
from .parses import ParseIndex
from .udtree import DepTree, subtree_text, subtrees_matching


class BaselineError(Exception):
    pass


@dataclass(frozen=True)
class DistractorSuggestion:
    surface: str  # empty when padded
    score: float
    source_sentence: int  # index into the sentence list, -1 when padded
    source_root: int  # token index of the subtree root, -1 when padded


PAD = DistractorSuggestion(surface="", score=0.0, source_sentence=-1, source_root=-1)


def _overlaps(a_start: int, a_end: int, b_start: int, b_end: int) -> bool:
    return a_start < b_end and b_start < a_end


def _key_sentence_indices(mcq: Mcq, sentences: list[DepTree]) -> set[int]:
    """Sentences to exclude: span overlap with the key, else first sentence
    whose text contains the key surface."""
    key = mcq.key
    hits: set[int] = set()
    if key.start is not None:
        k_start, k_end = key.start, key.start + len(key.surface)
        for i, sent in enumerate(sentences):
            span = sent.char_span
            if span is not None and _overlaps(k_start, k_end, span[0], span[1]):
                hits.add(i)
    if hits:
        return hits
    for i, sent in enumerate(sentences):
        hay = sent.text if sent.text is not None else " ".join(t.form for t in sent.tokens)
        if key.surface in hay:
            return {i}
    return set()


def generate_baseline(
    mcq: Mcq,
    sentences: list[DepTree],
    key_tree: DepTree,
    k: int = 3,
    params: KernelParams = KernelParams(),
    pad: bool = True,
) -> list[DistractorSuggestion]:
    """Top-k kernel-scored subtree suggestions for one MCQ.

    Ties break toward the earlier sentence, then the leftmost subtree root.
    With fewer than k candidates the tail is empty-surface padding (disable
    with pad=False).
    """
    if key_tree is None or not key_tree.tokens:
        raise BaselineError(f"MCQ {mcq.id!r}: key parse missing or empty")
    excluded = _key_sentence_indices(mcq, sentences)
    key_root = key_tree.token(key_tree.root)
    key_grct = to_grct(key_tree, include_lexicals=False)

    scored: list[tuple[float, int, int, str]] = []
    for si, sent in enumerate(sentences):
        if si in excluded:
            continue
        for sub in subtrees_matching(sent, key_root.upos, key_root.feats):
            score = ncptk(to_grct(sub.as_tree(), include_lexicals=False), key_grct, params)
            scored.append((score, si, sub.root_index, subtree_text(sub)))

    scored.sort(key=lambda item: (-item[0], item[1], item[2]))
    out = [
        DistractorSuggestion(surface=text, score=score, source_sentence=si, source_root=ri)
        for score, si, ri, text in scored[:k]
    ]
    if pad:
        while len(out) < k:
            out.append(PAD)
    return out


def run_baseline(
    corpus: Corpus,
    parses: ParseIndex,
    k: int = 3,
    params: KernelParams = KernelParams(),
    pad: bool = True,
) -> dict[str, list[DistractorSuggestion]]:
    """Baseline over a whole corpus; results keyed and ordered by MCQ id."""
    out: dict[str, list[DistractorSuggestion]] = {}
    for mcq in sorted(corpus.mcqs, key=lambda m: m.id):
        sentences = parses.text_sentences(mcq.text_id)
        if sentences is None:
            raise BaselineError(f"MCQ {mcq.id!r}: no parsed sentences for text {mcq.text_id!r}")
        key_tree = parses.key_tree(mcq.id)
        if key_tree is None:
            raise BaselineError(f"MCQ {mcq.id!r}: no key parse")
        out[mcq.id] = generate_baseline(mcq, sentences, key_tree, k=k, params=params, pad=pad)
    return out
