from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from disgen.corpus import AnswerSpan, Corpus, Mcq, TextDoc
from disgen.grct import GrctNode
from disgen.udtree import DepTree, UdToken

FIXTURES = Path(__file__).parent / "fixtures"


def random_tree(rng: random.Random, max_nodes: int, labels: list[tuple[str, str]]) -> GrctNode:
    """Random ordered labeled tree with 1..max_nodes nodes."""
    n = rng.randint(1, max_nodes)
    kind, label = rng.choice(labels)
    root = GrctNode(kind, label)
    nodes = [root]
    for _ in range(n - 1):
        parent = rng.choice(nodes)
        kind, label = rng.choice(labels)
        child = GrctNode(kind, label)
        parent.children.append(child)
        nodes.append(child)
    return root


def random_dep_tree(rng: random.Random, n_tokens: int) -> DepTree:
    """Random dependency tree over a tiny tag vocabulary; always a valid tree."""
    upos_pool = ["NOUN", "VERB", "ADJ"]
    deprel_pool = ["nsubj", "obj", "amod", "advmod"]
    feats_pool = [(), ("Number=Sing",), ("Number=Plur",)]
    forms = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta"]
    root_idx = rng.randint(1, n_tokens)
    heads = {root_idx: 0}
    attached = [root_idx]
    others = [i for i in range(1, n_tokens + 1) if i != root_idx]
    rng.shuffle(others)
    for i in others:
        heads[i] = rng.choice(attached)
        attached.append(i)
    tokens = [
        UdToken(
            index=i,
            form=rng.choice(forms),
            lemma="_",
            upos=rng.choice(upos_pool),
            feats=rng.choice(feats_pool),
            head=heads[i],
            deprel="root" if heads[i] == 0 else rng.choice(deprel_pool),
        )
        for i in range(1, n_tokens + 1)
    ]
    return DepTree(tokens=tokens)


def random_projective_dep_tree(rng: random.Random, n_tokens: int) -> DepTree:
    """Random projective dependency tree (descendants occupy contiguous spans)."""
    upos_pool = ["NOUN", "VERB", "ADJ"]
    deprel_pool = ["nsubj", "obj", "amod", "advmod"]
    forms = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta"]
    heads: dict[int, int] = {}

    def segments(lo: int, hi: int) -> list[tuple[int, int]]:
        if lo > hi:
            return []
        cuts = sorted(rng.sample(range(lo, hi), k=rng.randint(0, hi - lo))) if hi > lo else []
        segs, prev = [], lo
        for c in cuts:
            segs.append((prev, c))
            prev = c + 1
        segs.append((prev, hi))
        return segs

    def build(lo: int, hi: int, head: int) -> None:
        r = rng.randint(lo, hi)
        heads[r] = head
        for a, b in segments(lo, r - 1):
            build(a, b, r)
        for a, b in segments(r + 1, hi):
            build(a, b, r)

    build(1, n_tokens, 0)
    tokens = [
        UdToken(
            index=i,
            form=rng.choice(forms),
            lemma="_",
            upos=rng.choice(upos_pool),
            feats=(),
            head=heads[i],
            deprel="root" if heads[i] == 0 else rng.choice(deprel_pool),
        )
        for i in range(1, n_tokens + 1)
    ]
    return DepTree(tokens=tokens)


TINY_BODY = (
    "Hunden jagade katten i parken. "
    "Katten klättrade upp i trädet. "
    "Fåglarna flög över sjön."
)


@pytest.fixture
def tiny_corpus() -> Corpus:
    text = TextDoc(id="t1", body=TINY_BODY)
    mcq = Mcq(
        id="q1",
        text_id="t1",
        stem="Vad jagade hunden?",
        key=AnswerSpan(surface="katten", start=TINY_BODY.index("katten"), kind="key"),
        distractors=(
            AnswerSpan(surface="trädet", start=TINY_BODY.index("trädet"), kind="distractor"),
            AnswerSpan(surface="sjön", start=TINY_BODY.index("sjön"), kind="distractor"),
        ),
    )
    return Corpus(split="test", texts=[text], mcqs=[mcq])
