import math
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dscompress.channel import (ExpansionTable, TemplatePair, dump_expansion, dump_stars,
                                estimate_expansion, extract_discourse_templates,
                                extract_syntax_templates, load_expansion, load_stars,
                                load_syntax_pairs, propagate_stars, score_expansion)
from dscompress.errors import AlignmentError, DataError, ParseError
from dscompress.synth import random_deletion, random_dstree, random_syntax
from dscompress.tree import Rule, parse_syntax, serialize_syntax

from oracles import all_alignments

GOLDEN = Path(__file__).parent / "golden"


def R(text):
    return Rule.parse(text)


def test_figure1_templates_golden(fig1):
    pairs = extract_discourse_templates(fig1, propagate_stars(fig1, {1, 4}))
    got = [str(p) for p in pairs]
    assert got == (GOLDEN / "figure1_templates.txt").read_text().splitlines()
    non_identity = {p for p in pairs if not p.is_identity}
    assert non_identity == {
        TemplatePair(R("Root=Span -> Sat=Background Nuc=Span"), R("Root=Span -> Nuc=Span")),
        TemplatePair(R("Nuc=Contrast -> Nuc=Span Sat=evaluation"),
                     R("Nuc=Contrast -> Nuc=Span")),
        TemplatePair(R("Nuc=Contrast -> Sat=condition Nuc=Span"),
                     R("Nuc=Contrast -> Nuc=Span")),
    }


def test_figure1_star_closure(fig1):
    marked = propagate_stars(fig1, {1, 4})
    assert marked == {(), (1,), (1, 0), (1, 0, 0), (1, 1), (1, 1, 1)}
    with pytest.raises(DataError):
        propagate_stars(fig1, {5})


@pytest.mark.parametrize("seed", range(60))
def test_star_propagation_closure(seed):
    rng = random.Random(seed)
    tree = random_dstree(rng, max_edus=6)
    nodes = dict(tree.root.iter_nodes())
    n_leaves = len(tree.root.leaves())
    stars = {i for i in range(n_leaves) if rng.random() < 0.4}
    marked = propagate_stars(tree, stars)
    leaf_paths = [p for p, n in tree.root.iter_nodes() if n.is_leaf]
    for path, node in nodes.items():
        below = {i for i, lp in enumerate(leaf_paths) if lp[:len(path)] == path}
        assert (path in marked) == bool(below & stars)
    # closed upward
    for path in marked:
        assert path[:-1] in marked or path == ()
    for pair in extract_discourse_templates(tree, marked):
        pair.check()


def test_syntax_example():
    long = parse_syntax("(VP (VBZ is) (ADVP (RB now)) (VP (VBG looking)))")
    short = parse_syntax("(VP (VBZ is) (VP (VBG looking)))")
    pairs = extract_syntax_templates(long, short)
    assert pairs[0] == TemplatePair(R("VP -> VBZ ADVP VP"), R("VP -> VBZ VP"))
    assert all(p.is_identity for p in pairs[1:])


def test_alignment_failure_names_constituent():
    long = parse_syntax("(S (NP (NN a)) (VP (VB b)))")
    short = parse_syntax("(S (VP (VB c)))")
    with pytest.raises(AlignmentError, match="VB c"):
        extract_syntax_templates(long, short)


def test_alignment_backtracks():
    # leftmost NP does not contain "y", so the second must be used
    long = parse_syntax("(S (NP (NN x)) (NP (NN y)) (VP (VB z)))")
    short = parse_syntax("(S (NP (NN y)) (VP (VB z)))")
    pairs = extract_syntax_templates(long, short)
    assert pairs[0] == TemplatePair(R("S -> NP NP VP"), R("S -> NP VP"))


@pytest.mark.parametrize("seed", range(150))
def test_alignment_against_enumerator(seed):
    rng = random.Random(seed)
    long = random_syntax(rng, rng.randint(1, 8), words=("a", "b"))
    if long.word is not None:
        return
    short = random_deletion(rng, long, keep=0.6)
    options = all_alignments(long, short)
    assert options
    pairs = extract_syntax_templates(long, short)
    leftmost = min(options)

    # rebuild kept rules from the leftmost enumerated alignment, preorder
    def kept_rules(lnode, snode, positions, out):
        if lnode.word is not None:
            return
        pos = positions.pop(0)
        out.append(Rule(lnode.label, tuple(lnode.children[j].label for j in pos)))
        for j, s in zip(pos, snode.children):
            kept_rules(lnode.children[j], s, positions, out)

    want = []
    kept_rules(long, short, list(leftmost), want)
    assert [p.compressed for p in pairs] == want


def test_estimate_hand_count():
    a = TemplatePair(R("A -> B C"), R("A -> B"))
    table = estimate_expansion([a, a, a], "syntax")
    assert math.exp(table.logprob(a)) == pytest.approx(0.75, abs=1e-15)
    assert math.exp(table.logprob(TemplatePair(R("A -> B"), R("A -> B")))) == pytest.approx(0.25)
    assert table.compressions_of(R("A -> B C")) == [R("A -> B")]


def test_unseen_pairs():
    a = TemplatePair(R("A -> B C"), R("A -> B"))
    table = estimate_expansion([a], "syntax")
    unseen = TemplatePair(R("A -> B D"), R("A -> B"))
    assert table.logprob(unseen) == float("-inf")
    assert table.logprob(unseen, open_vocab=True) == table.floor_logprob
    ident = TemplatePair(R("X -> Y"), R("X -> Y"))
    assert table.logprob(ident) == 0.0
    assert score_expansion(table, [a, unseen]) == float("-inf")
    assert score_expansion(table, [a, unseen], open_vocab=True) == pytest.approx(
        math.log(0.5) + table.floor_logprob)


def test_figure2_chain():
    # two independent expansions multiply
    p1 = TemplatePair(R("S -> NP VP PP"), R("S -> NP VP"))
    p2 = TemplatePair(R("VP -> VB ADVP NP"), R("VP -> VB NP"))
    table = ExpansionTable({R("S -> NP VP"): {p1.expanded: math.log(0.3),
                                              p1.compressed: math.log(0.7)},
                            R("VP -> VB NP"): {p2.expanded: math.log(0.2),
                                               p2.compressed: math.log(0.8)}}, "syntax")
    assert math.exp(score_expansion(table, [p1, p2])) == pytest.approx(0.06)


def test_bad_pairs_rejected():
    with pytest.raises(ValueError):
        estimate_expansion([(R("A -> B C"), R("A -> C B"))], "syntax")
    with pytest.raises(ValueError):
        estimate_expansion([(R("A -> B C"), R("X -> B"))], "syntax")
    with pytest.raises(DataError):
        estimate_expansion([], "syntax")
    with pytest.raises(ValueError):
        ExpansionTable({}, "words")


@pytest.mark.parametrize("seed", range(100))
def test_rows_normalized_and_consistent(seed):
    rng = random.Random(seed)
    pairs = []
    for _ in range(rng.randint(1, 6)):
        long = random_syntax(rng, rng.randint(2, 9))
        if long.word is not None:
            continue
        short = random_deletion(rng, long)
        extracted = extract_syntax_templates(long, short)
        # every extracted kept rule is a subsequence of its full rule
        for p in extracted:
            p.check()
        pairs.extend(extracted)
    if not pairs:
        return
    table = estimate_expansion(pairs, "syntax", identity_count=rng.choice((0, 1, 2)))
    for compressed in table.table:
        assert abs(table.row_mass(compressed) - 1) < 1e-9
    text = dump_expansion(table)
    assert load_expansion(text) == table
    assert dump_expansion(load_expansion(text)) == text


def test_expansion_file_errors():
    with pytest.raises(ParseError):
        load_expansion("T A -> B | B C -1.0\n")
    with pytest.raises(ParseError):
        load_expansion("EXPAND layer=words floor=-1\n")
    with pytest.raises(ParseError) as err:
        load_expansion("EXPAND layer=syntax floor=-1\nT A -> B B C -1.0\n")
    assert err.value.line == 2


def test_stars_round_trip():
    text = "# comment\nSTAR d1 3 1\nSTAR d0 0\nSTAR d1 4\n"
    stars = load_stars(text)
    assert stars == {"d1": {1, 3, 4}, "d0": {0}}
    assert load_stars(dump_stars(stars)) == stars
    with pytest.raises(ParseError):
        load_stars("STAR d1 x\n")
    with pytest.raises(ParseError):
        load_stars("STARS d1 1\n")


def test_syntax_pairs_file():
    text = "(S (NP (NN a)) (VP (VB b)))\t(S (VP (VB b)))\n\n"
    [(long, short)] = load_syntax_pairs(text)
    assert serialize_syntax(short) == "(S (VP (VB b)))"
    with pytest.raises(ParseError):
        load_syntax_pairs("(S (NP (NN a)))\n")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_extraction_matches_deletion(seed):
    rng = random.Random(seed)
    long = random_syntax(rng, rng.randint(2, 10))
    if long.word is not None:
        return
    short = random_deletion(rng, long)
    pairs = extract_syntax_templates(long, short)
    # one pair per phrase of the short tree
    n_phrases = sum(1 for n in _phrases(short))
    assert len(pairs) == n_phrases


def _phrases(node):
    if node.word is None:
        yield node
        for c in node.children:
            yield from _phrases(c)
