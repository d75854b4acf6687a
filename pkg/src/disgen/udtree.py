"""CoNLL-U ingestion, dependency trees, and subtree matching by UPOS + feats.

Only the plain ten-column format is consumed: multiword-token ranges and
empty nodes are skipped, comment lines are kept as sentence metadata.
Recognized metadata comments: ``# text = ...``, ``# sent_id = ...`` and
``# char_span = <start> <end>`` (character offsets into the source document,
used to locate sentences inside an MCQ base text).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, TextIO


class ConlluError(Exception):
    """Parse or validation failure; message names the sentence and line."""


@dataclass(frozen=True)
class UdToken:
    index: int  # 1-based surface position
    form: str
    lemma: str
    upos: str
    feats: tuple[str, ...]  # sorted "Attr=Val" pairs, empty for "_"
    head: int  # 0 = root
    deprel: str
    misc: str = "_"


@dataclass
class DepTree:
    tokens: list[UdToken]
    meta: dict[str, str] = field(default_factory=dict)

    _children: dict[int, list[int]] = field(init=False, repr=False)
    _root: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        children: dict[int, list[int]] = {t.index: [] for t in self.tokens}
        roots = []
        for t in self.tokens:
            if t.head == 0:
                roots.append(t.index)
            else:
                children[t.head].append(t.index)
        if len(roots) != 1:
            raise ConlluError(f"tree has {len(roots)} roots, expected exactly 1")
        self._children = children
        self._root = roots[0]

    @property
    def root(self) -> int:
        return self._root

    def token(self, index: int) -> UdToken:
        return self.tokens[index - 1]

    def children(self, index: int) -> list[int]:
        return self._children[index]

    def descendants(self, index: int) -> list[int]:
        """The subtree rooted at ``index`` (root included), ascending order."""
        out = [index]
        stack = list(self._children[index])
        while stack:
            i = stack.pop()
            out.append(i)
            stack.extend(self._children[i])
        return sorted(out)

    @property
    def text(self) -> str | None:
        return self.meta.get("text")

    @property
    def char_span(self) -> tuple[int, int] | None:
        raw = self.meta.get("char_span")
        if raw is None:
            return None
        try:
            start, end = raw.split()
            return int(start), int(end)
        except ValueError:
            raise ConlluError(f"malformed char_span comment: {raw!r}") from None


@dataclass(frozen=True)
class DepSubtree:
    tree: DepTree
    root_index: int
    members: tuple[int, ...]  # root and all descendants, ascending

    def as_tree(self) -> DepTree:
        """Detach as a standalone tree, members reindexed in surface order."""
        remap = {old: new for new, old in enumerate(self.members, start=1)}
        tokens = []
        for old in self.members:
            t = self.tree.token(old)
            head = 0 if old == self.root_index else remap[t.head]
            tokens.append(
                UdToken(
                    index=remap[old],
                    form=t.form,
                    lemma=t.lemma,
                    upos=t.upos,
                    feats=t.feats,
                    head=head,
                    deprel="root" if old == self.root_index else t.deprel,
                    misc=t.misc,
                )
            )
        return DepTree(tokens=tokens, meta={})


def parse_feats(raw: str, where: str = "") -> tuple[str, ...]:
    """Parse a FEATS column into a sorted tuple of ``Attr=Val`` strings."""
    if raw == "_" or raw == "":
        return ()
    pairs = []
    seen = set()
    for item in raw.split("|"):
        if "=" not in item:
            raise ConlluError(f"{where}malformed feature {item!r}")
        attr = item.split("=", 1)[0]
        if attr in seen:
            raise ConlluError(f"{where}duplicate feature key {attr!r}")
        seen.add(attr)
        pairs.append(item)
    return tuple(sorted(pairs))


def _check_connected(tokens: list[UdToken], where: str) -> None:
    # every token must reach the root without revisiting a node
    heads = {t.index: t.head for t in tokens}
    for t in tokens:
        seen = set()
        i = t.index
        while i != 0:
            if i in seen:
                raise ConlluError(f"{where}cycle through token {t.index}")
            seen.add(i)
            i = heads[i]


def parse_conllu(source: str | TextIO) -> list[DepTree]:
    """Parse CoNLL-U text (or a stream) into one DepTree per sentence block."""
    if hasattr(source, "read"):
        source = source.read()
    trees: list[DepTree] = []
    meta: dict[str, str] = {}
    tokens: list[UdToken] = []
    sent_no = 1

    def flush(lineno: int) -> None:
        nonlocal meta, tokens, sent_no
        if not tokens:
            meta = {}
            return
        where = f"sentence {sent_no} (ending line {lineno}): "
        n = len(tokens)
        for t in tokens:
            if t.head < 0 or t.head > n:
                raise ConlluError(f"{where}token {t.index} has head {t.head} outside 1..{n}")
            if t.head == t.index:
                raise ConlluError(f"{where}token {t.index} is its own head")
        _check_connected(tokens, where)
        try:
            trees.append(DepTree(tokens=tokens, meta=meta))
        except ConlluError as e:
            raise ConlluError(f"{where}{e}") from None
        sent_no += 1
        meta = {}
        tokens = []

    lines = source.splitlines()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            flush(lineno)
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            else:
                meta.setdefault(body, "")
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(f"line {lineno}: expected 10 tab-separated columns, got {len(cols)}")
        idx, form, lemma, upos, _xpos, feats, head, deprel, _deps, misc = cols
        if "-" in idx or "." in idx:
            continue  # multiword-token range or empty node
        where = f"sentence {sent_no}, line {lineno}: "
        try:
            index = int(idx)
        except ValueError:
            raise ConlluError(f"{where}non-integer token id {idx!r}") from None
        try:
            head_i = int(head)
        except ValueError:
            raise ConlluError(f"{where}non-integer head {head!r}") from None
        if index != len(tokens) + 1:
            raise ConlluError(f"{where}token id {index} out of sequence")
        if not deprel or deprel == "_":
            raise ConlluError(f"{where}empty deprel")
        tokens.append(
            UdToken(
                index=index,
                form=form,
                lemma=lemma,
                upos=upos,
                feats=parse_feats(feats, where),
                head=head_i,
                deprel=deprel,
                misc=misc,
            )
        )
    flush(len(lines))
    return trees


def subtrees_matching(
    tree: DepTree,
    upos: str,
    feats: Iterable[str],
    feats_mode: str = "exact",
) -> list[DepSubtree]:
    """All subtrees whose root token has the given UPOS and features.

    ``feats_mode='exact'`` requires set equality of Attr=Val pairs (an empty
    query matches only featureless tokens); ``'subset'`` requires the query
    features to be contained in the token's.
    """
    want = frozenset(feats)
    out = []
    for t in tree.tokens:
        have = frozenset(t.feats)
        if t.upos != upos:
            continue
        if feats_mode == "exact":
            ok = have == want
        elif feats_mode == "subset":
            ok = want <= have
        else:
            raise ValueError(f"unknown feats_mode {feats_mode!r}")
        if ok:
            out.append(DepSubtree(tree=tree, root_index=t.index, members=tuple(tree.descendants(t.index))))
    return out


def subtree_text(sub: DepSubtree) -> str:
    """Member forms joined in ascending surface order."""
    return " ".join(sub.tree.token(i).form for i in sub.members)


def tree_to_conllu(tree: DepTree) -> str:
    """Render one sentence block (inverse of parse_conllu for plain trees)."""
    lines = [f"# {k} = {v}" if v else f"# {k}" for k, v in tree.meta.items()]
    for t in tree.tokens:
        feats = "|".join(t.feats) if t.feats else "_"
        lines.append(
            "\t".join(
                [str(t.index), t.form, t.lemma, t.upos, "_", feats, str(t.head), t.deprel, "_", t.misc]
            )
        )
    return "\n".join(lines) + "\n"
