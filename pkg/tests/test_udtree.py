from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disgen.udtree import (
    ConlluError,
    DepSubtree,
    parse_conllu,
    parse_feats,
    subtree_text,
    subtrees_matching,
    tree_to_conllu,
)

from conftest import random_dep_tree

TWO_TOKEN = """# text = Hunden springer
1\tHunden\thund\tNOUN\t_\tNumber=Sing\t2\tnsubj\t_\t_
2\tspringer\tspringa\tVERB\t_\t_\t0\troot\t_\t_
"""

FIVE_TOKEN = """# text = Hunden jagade katten i parken
# char_span = 0 29
1\tHunden\thund\tNOUN\t_\tDefinite=Def|Number=Sing\t2\tnsubj\t_\t_
2\tjagade\tjaga\tVERB\t_\tTense=Past\t0\troot\t_\t_
3\tkatten\tkatt\tNOUN\t_\tDefinite=Def|Number=Sing\t2\tobj\t_\t_
4\ti\ti\tADP\t_\t_\t5\tcase\t_\t_
5\tparken\tpark\tNOUN\t_\tDefinite=Def|Number=Sing\t2\tobl\t_\t_
"""


def test_parse_two_token_sentence():
    trees = parse_conllu(TWO_TOKEN)
    assert len(trees) == 1
    tree = trees[0]
    assert tree.root == 2
    assert tree.text == "Hunden springer"
    assert tree.token(1).feats == ("Number=Sing",)


def test_multiple_sentences_and_counts():
    blob = TWO_TOKEN + "\n" + FIVE_TOKEN + "\n" + TWO_TOKEN
    trees = parse_conllu(blob)
    assert [len(t.tokens) for t in trees] == [2, 5, 2]


def test_char_span_metadata():
    tree = parse_conllu(FIVE_TOKEN)[0]
    assert tree.char_span == (0, 29)


def test_two_roots_rejected():
    bad = "1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n2\tb\t_\tX\t_\t_\t0\troot\t_\t_\n"
    with pytest.raises(ConlluError, match="roots"):
        parse_conllu(bad)


def test_zero_roots_rejected():
    bad = "1\ta\t_\tX\t_\t_\t2\tdep\t_\t_\n2\tb\t_\tX\t_\t_\t1\tdep\t_\t_\n"
    with pytest.raises(ConlluError):
        parse_conllu(bad)


def test_cycle_rejected():
    bad = (
        "1\ta\t_\tX\t_\t_\t2\tdep\t_\t_\n"
        "2\tb\t_\tX\t_\t_\t1\tdep\t_\t_\n"
        "3\tc\t_\tX\t_\t_\t0\troot\t_\t_\n"
    )
    with pytest.raises(ConlluError, match="cycle"):
        parse_conllu(bad)


def test_non_integer_head_names_line():
    bad = "1\ta\t_\tX\t_\t_\tx\troot\t_\t_\n"
    with pytest.raises(ConlluError, match="line 1"):
        parse_conllu(bad)


def test_mwt_ranges_and_empty_nodes_skipped():
    blob = (
        "1-2\tdet\t_\t_\t_\t_\t_\t_\t_\t_\n"
        "1\ta\t_\tX\t_\t_\t2\tdep\t_\t_\n"
        "2\tb\t_\tX\t_\t_\t0\troot\t_\t_\n"
        "2.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_\n"
    )
    tree = parse_conllu(blob)[0]
    assert len(tree.tokens) == 2


def test_duplicate_feature_keys_rejected():
    with pytest.raises(ConlluError, match="duplicate"):
        parse_feats("Number=Sing|Number=Plur")


def test_subtrees_matching_exact_feats():
    tree = parse_conllu(FIVE_TOKEN)[0]
    subs = subtrees_matching(tree, "NOUN", ("Definite=Def", "Number=Sing"))
    assert [s.root_index for s in subs] == [1, 3, 5]
    # non-matching feature set yields nothing
    assert subtrees_matching(tree, "NOUN", ("Number=Plur",)) == []
    # empty query matches only featureless tokens
    assert [s.root_index for s in subtrees_matching(tree, "ADP", ())] == [4]


def test_subtrees_matching_root_gives_whole_tree():
    tree = parse_conllu(FIVE_TOKEN)[0]
    subs = subtrees_matching(tree, "VERB", ("Tense=Past",))
    assert len(subs) == 1
    assert subs[0].members == (1, 2, 3, 4, 5)


def test_subset_mode():
    tree = parse_conllu(FIVE_TOKEN)[0]
    subs = subtrees_matching(tree, "NOUN", ("Number=Sing",), feats_mode="subset")
    assert [s.root_index for s in subs] == [1, 3, 5]


def test_subtree_text_order_and_membership():
    tree = parse_conllu(FIVE_TOKEN)[0]
    sub = subtrees_matching(tree, "NOUN", ("Definite=Def", "Number=Sing"))[2]
    assert sub.root_index == 5
    assert sub.members == (4, 5)
    assert subtree_text(sub) == "i parken"


def test_subtree_as_tree_reindexes():
    tree = parse_conllu(FIVE_TOKEN)[0]
    sub = subtrees_matching(tree, "NOUN", ("Definite=Def", "Number=Sing"))[2]
    detached = sub.as_tree()
    assert [t.form for t in detached.tokens] == ["i", "parken"]
    assert detached.root == 2
    assert detached.token(1).head == 2


def test_edge_count_property():
    rng = random.Random(23)
    for _ in range(50):
        tree = random_dep_tree(rng, rng.randint(1, 12))
        non_root_edges = sum(1 for t in tree.tokens if t.head != 0)
        assert non_root_edges == len(tree.tokens) - 1


def test_descendant_closure_matches_bruteforce():
    rng = random.Random(29)
    for _ in range(30):
        tree = random_dep_tree(rng, rng.randint(1, 10))
        for t in tree.tokens:
            sub = DepSubtree(tree, t.index, tuple(tree.descendants(t.index)))
            brute = {t.index}
            changed = True
            while changed:
                changed = False
                for tok in tree.tokens:
                    if tok.head in brute and tok.index not in brute:
                        brute.add(tok.index)
                        changed = True
            assert set(sub.members) == brute


def test_round_trip_render():
    tree = parse_conllu(FIVE_TOKEN)[0]
    again = parse_conllu(tree_to_conllu(tree))[0]
    assert again.tokens == tree.tokens
    assert again.text == tree.text


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10**9), st.integers(min_value=1, max_value=9))
def test_subtree_text_is_ordered_subsequence(seed, n):
    tree = random_dep_tree(random.Random(seed), n)
    sentence = [t.form for t in tree.tokens]
    for t in tree.tokens:
        sub = DepSubtree(tree, t.index, tuple(tree.descendants(t.index)))
        words = subtree_text(sub).split()
        positions = [i - 1 for i in sub.members]
        assert words == [sentence[i] for i in positions]
        assert positions == sorted(positions)
