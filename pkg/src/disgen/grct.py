"""Grammatical-relation-centered trees.

A dependency tree is rewritten so that every grammatical relation becomes a
node whose child is the token's POS tag, which in turn (optionally) carries
the word form as a leaf. Children of a GR node are ordered by surface
position, the head's own POS node interleaved at the head's position, so the
structure stays order-sensitive for the tree kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .udtree import DepTree

GR = "GR"
POS = "POS"
LEX = "LEX"


@dataclass
class GrctNode:
    kind: str
    label: str
    children: list["GrctNode"] = field(default_factory=list)

    def iter_nodes(self) -> Iterator["GrctNode"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def node_count(self) -> int:
        return sum(1 for _ in self.iter_nodes())

    def __str__(self) -> str:
        return to_bracketed(self)


def to_grct(tree: DepTree, include_lexicals: bool = True) -> GrctNode:
    """Transform a dependency tree into its GRCT."""

    def build(index: int) -> GrctNode:
        token = tree.token(index)
        pos_node = GrctNode(POS, token.upos)
        if include_lexicals:
            pos_node.children.append(GrctNode(LEX, token.form))
        ordered: list[tuple[int, GrctNode]] = [(index, pos_node)]
        for child in tree.children(index):
            ordered.append((child, build(child)))
        ordered.sort(key=lambda item: item[0])
        return GrctNode(GR, token.deprel, [node for _, node in ordered])

    return build(tree.root)


def _escape(label: str) -> str:
    return label.replace("\\", "\\\\").replace("(", "\\(").replace(")", "\\)").replace(" ", "\\ ")


def to_bracketed(node: GrctNode) -> str:
    """Debug serialization, e.g. ``(root (nsubj (NOUN (hunden))) (VERB (springer)))``."""
    if not node.children:
        return f"({_escape(node.label)})"
    inner = " ".join(to_bracketed(c) for c in node.children)
    return f"({_escape(node.label)} {inner})"


class BracketParseError(ValueError):
    pass


def parse_bracketed(text: str, kind: str = "N") -> GrctNode:
    """Parse a bracketed tree into nodes of a uniform ``kind``.

    Intended for kernel debugging; kinds are not reconstructed, so trees
    parsed here only compare meaningfully against each other.
    """
    pos = 0
    n = len(text)

    def skip_ws() -> None:
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def parse_node() -> GrctNode:
        nonlocal pos
        skip_ws()
        if pos >= n or text[pos] != "(":
            raise BracketParseError(f"expected '(' at position {pos}")
        pos += 1
        skip_ws()
        label_chars: list[str] = []
        while pos < n and text[pos] not in "() \t\n":
            if text[pos] == "\\" and pos + 1 < n:
                pos += 1
            label_chars.append(text[pos])
            pos += 1
        if not label_chars:
            raise BracketParseError(f"empty label at position {pos}")
        node = GrctNode(kind, "".join(label_chars))
        skip_ws()
        while pos < n and text[pos] == "(":
            node.children.append(parse_node())
            skip_ws()
        if pos >= n or text[pos] != ")":
            raise BracketParseError(f"expected ')' at position {pos}")
        pos += 1
        return node

    root = parse_node()
    skip_ws()
    if pos != n:
        raise BracketParseError(f"trailing input at position {pos}")
    return root
