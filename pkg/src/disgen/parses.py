"""Loading of exported dependency parses from a directory layout.

Layout produced by the companion parser-export tool:

    <dir>/texts.conllu      one document per base text, announced by a
                            ``# newdoc id = <text_id>`` comment; every
                            sentence carries ``# text`` and ``# char_span``
    <dir>/keys.conllu       one sentence block per MCQ key, announced by
                            ``# mcq_id = <id>``
    <dir>/generated.conllu  parses of generated distractors, announced by
                            ``# mcq_id = <id>`` and ``# slot = <0|1|2>``

Any of the files may be absent; lookups then simply miss.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .udtree import ConlluError, DepTree, parse_conllu


@dataclass
class ParseIndex:
    texts: dict[str, list[DepTree]] = field(default_factory=dict)
    keys: dict[str, DepTree] = field(default_factory=dict)
    generated: dict[tuple[str, int], DepTree] = field(default_factory=dict)
    duplicate_key_blocks: int = 0  # extra sentence blocks per key, first one kept

    def text_sentences(self, text_id: str) -> list[DepTree] | None:
        return self.texts.get(text_id)

    def key_tree(self, mcq_id: str) -> DepTree | None:
        return self.keys.get(mcq_id)

    def generated_tree(self, mcq_id: str, slot: int) -> DepTree | None:
        return self.generated.get((mcq_id, slot))


def load_parse_dir(path: str | Path) -> ParseIndex:
    path = Path(path)
    index = ParseIndex()

    texts_file = path / "texts.conllu"
    if texts_file.exists():
        current: str | None = None
        for tree in parse_conllu(texts_file.read_text(encoding="utf-8")):
            doc_id = tree.meta.get("newdoc id")
            if doc_id is not None:
                current = doc_id
            if current is None:
                raise ConlluError(f"{texts_file}: sentence before any 'newdoc id' comment")
            index.texts.setdefault(current, []).append(tree)

    keys_file = path / "keys.conllu"
    if keys_file.exists():
        for tree in parse_conllu(keys_file.read_text(encoding="utf-8")):
            mcq_id = tree.meta.get("mcq_id")
            if mcq_id is None:
                raise ConlluError(f"{keys_file}: sentence block without 'mcq_id' comment")
            if mcq_id in index.keys:
                # a key phrase the parser split into several sentences
                index.duplicate_key_blocks += 1
                continue
            index.keys[mcq_id] = tree

    gen_file = path / "generated.conllu"
    if gen_file.exists():
        for tree in parse_conllu(gen_file.read_text(encoding="utf-8")):
            mcq_id = tree.meta.get("mcq_id")
            slot = tree.meta.get("slot")
            if mcq_id is None or slot is None:
                raise ConlluError(f"{gen_file}: sentence block without 'mcq_id'/'slot' comments")
            key = (mcq_id, int(slot))
            if key not in index.generated:
                index.generated[key] = tree

    return index
