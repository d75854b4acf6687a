from __future__ import annotations

import random
from collections import Counter

from hypothesis import given, settings
from hypothesis import strategies as st

from disgen.grct import GrctNode, parse_bracketed, to_bracketed, to_grct
from disgen.udtree import parse_conllu

from conftest import random_dep_tree, random_projective_dep_tree

SINGLE = "1\tx\t_\tX\t_\t_\t0\troot\t_\t_\n"
TWO = (
    "1\thunden\thund\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
    "2\tspringer\tspringa\tVERB\t_\t_\t0\troot\t_\t_\n"
)


def test_single_token_with_lexicals():
    grct = to_grct(parse_conllu(SINGLE)[0], include_lexicals=True)
    assert to_bracketed(grct) == "(root (X (x)))"
    assert grct.kind == "GR"
    assert grct.children[0].kind == "POS"
    assert grct.children[0].children[0].kind == "LEX"


def test_single_token_without_lexicals():
    grct = to_grct(parse_conllu(SINGLE)[0], include_lexicals=False)
    assert to_bracketed(grct) == "(root (X))"


def test_two_token_tree_order():
    grct = to_grct(parse_conllu(TWO)[0], include_lexicals=False)
    assert to_bracketed(grct) == "(root (nsubj (NOUN)) (VERB))"


def test_head_pos_interleaved_at_surface_position():
    blob = (
        "1\ta\t_\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
        "2\tser\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
        "3\tb\t_\tNOUN\t_\t_\t2\tobj\t_\t_\n"
    )
    grct = to_grct(parse_conllu(blob)[0], include_lexicals=False)
    assert to_bracketed(grct) == "(root (nsubj (NOUN)) (VERB) (obj (NOUN)))"


def test_node_counts():
    rng = random.Random(31)
    for _ in range(40):
        tree = random_dep_tree(rng, rng.randint(1, 10))
        n = len(tree.tokens)
        assert to_grct(tree, include_lexicals=True).node_count() == 3 * n
        assert to_grct(tree, include_lexicals=False).node_count() == 2 * n


def test_label_multisets_match():
    rng = random.Random(37)
    for _ in range(40):
        tree = random_dep_tree(rng, rng.randint(1, 10))
        grct = to_grct(tree, include_lexicals=True)
        kinds = Counter()
        labels = {"GR": Counter(), "POS": Counter(), "LEX": Counter()}
        for node in grct.iter_nodes():
            kinds[node.kind] += 1
            labels[node.kind][node.label] += 1
        assert labels["GR"] == Counter(t.deprel for t in tree.tokens)
        assert labels["POS"] == Counter(t.upos for t in tree.tokens)
        assert labels["LEX"] == Counter(t.form for t in tree.tokens)


def test_lex_leaves_in_surface_order():
    # holds for projective trees, where every subtree spans a contiguous range
    rng = random.Random(41)
    for _ in range(40):
        tree = random_projective_dep_tree(rng, rng.randint(1, 10))
        grct = to_grct(tree, include_lexicals=True)
        leaves = []

        def walk(node):
            if node.kind == "LEX":
                leaves.append(node.label)
            for c in node.children:
                walk(c)

        walk(grct)
        assert leaves == [t.form for t in tree.tokens]


def test_structural_invariants():
    rng = random.Random(43)
    for _ in range(40):
        tree = random_dep_tree(rng, rng.randint(1, 8))
        grct = to_grct(tree, include_lexicals=True)
        for node in grct.iter_nodes():
            if node.kind == "LEX":
                assert not node.children
            elif node.kind == "POS":
                assert len(node.children) <= 1
                assert all(c.kind == "LEX" for c in node.children)
            else:
                assert all(c.kind in ("GR", "POS") for c in node.children)


def test_bracketed_round_trip_escaping():
    node = GrctNode("N", "a(b) c", [GrctNode("N", "d\\e")])
    text = to_bracketed(node)
    again = parse_bracketed(text)
    assert again.label == "a(b) c"
    assert again.children[0].label == "d\\e"


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10**9), st.integers(min_value=1, max_value=8))
def test_bracketed_round_trip_random(seed, n):
    tree = random_dep_tree(random.Random(seed), n)
    grct = to_grct(tree, include_lexicals=True)
    text = to_bracketed(grct)
    again = parse_bracketed(text)

    def shape(node):
        return (node.label, tuple(shape(c) for c in node.children))

    assert shape(again) == shape(grct)
