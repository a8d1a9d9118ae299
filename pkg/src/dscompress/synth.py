"""Random DS-trees, annotations and models for oracle tests and fixtures."""
from __future__ import annotations

import random

from .channel import (ExpansionTable, estimate_expansion, extract_discourse_templates,
                      extract_syntax_templates, propagate_stars)
from .grammar import estimate_pcfg
from .lm import train_bigram
from .pipeline import ModelSet
from .tree import DiscourseNode, DSTree, SyntaxNode, discourse_rules, yield_words

WORDS = ("a", "b", "c", "d", "e", "f", "g")
POS = ("DT", "NN", "VB", "JJ", "IN")
PHRASES = ("NP", "VP", "PP", "S", "ADJP")
RELATIONS = ("Span", "Contrast", "Elaboration", "Background", "evaluation")


def _split(rng, n, parts):
    cuts = sorted(rng.sample(range(1, n), parts - 1))
    bounds = [0] + cuts + [n]
    return [b - a for a, b in zip(bounds, bounds[1:])]


def random_syntax(rng, n_words, words=WORDS):
    if n_words == 1:
        leaf = SyntaxNode(rng.choice(POS), (), rng.choice(words))
        if rng.random() < 0.25:
            return SyntaxNode(rng.choice(PHRASES), (leaf,))
        return leaf
    parts = rng.randint(2, min(3, n_words))
    kids = tuple(random_syntax(rng, k, words) for k in _split(rng, n_words, parts))
    return SyntaxNode(rng.choice(PHRASES), kids)


def _ensure_phrase(rng, node):
    # an EDU must be a phrase, never a bare word node
    if node.word is not None:
        return SyntaxNode(rng.choice(PHRASES), (node,))
    return node


def random_discourse(rng, edu_lengths, sentence_of, status="Root", relation="Span",
                     start=0, words=WORDS):
    n = len(edu_lengths)
    if n == 1:
        edu = _ensure_phrase(rng, random_syntax(rng, edu_lengths[0], words))
        return DiscourseNode(status, relation, (), edu, sentence_of[start])
    parts = rng.randint(2, min(3, n))
    sizes = _split(rng, n, parts)
    nuclei = {rng.randrange(parts)}
    if parts > 2 and rng.random() < 0.3:
        nuclei.add(rng.randrange(parts))
    kids = []
    offset = 0
    for i, size in enumerate(sizes):
        st = "Nuc" if i in nuclei else "Sat"
        rel = rng.choice(RELATIONS)
        kids.append(random_discourse(rng, edu_lengths[offset:offset + size], sentence_of,
                                     st, rel, start + offset, words))
        offset += size
    return DiscourseNode(status, relation, tuple(kids))


def _sentence_blocks(rng, node, p_whole):
    """Leaf groups, left to right, each forming one sentence."""
    if node.is_leaf:
        return [[node]]
    if rng.random() < p_whole:
        return [node.leaves()]
    out = []
    for child in node.children:
        out.extend(_sentence_blocks(rng, child, p_whole))
    return out


def _renumber(node, index_of):
    if node.is_leaf:
        return DiscourseNode(node.status, node.relation, (), node.edu, index_of[id(node)])
    return DiscourseNode(node.status, node.relation,
                         tuple(_renumber(c, index_of) for c in node.children))


def with_sentence_table(rng, tree, p_whole=0.35):
    """Re-assign sentences so each is a whole subtree or leaf, and add SENT parses."""
    blocks = _sentence_blocks(rng, tree.root, p_whole)
    index_of = {}
    table = []
    for i, block in enumerate(blocks):
        for leaf in block:
            index_of[id(leaf)] = i
        if len(block) == 1:
            parse = block[0].edu
        else:
            parse = SyntaxNode("S", tuple(leaf.edu for leaf in block))
        table.append((i, parse))
    return DSTree(_renumber(tree.root, index_of), tree.doc_id, tuple(table))


def random_dstree(rng, max_words=12, max_edus=4, doc_id="rand", words=WORDS):
    n_edus = rng.randint(1, max_edus)
    total = rng.randint(n_edus, max(n_edus, max_words))
    lengths = [1] * n_edus
    for _ in range(total - n_edus):
        lengths[rng.randrange(n_edus)] += 1
    sentence_of = []
    sent = 0
    for i in range(n_edus):
        if i and rng.random() < 0.5:
            sent += 1
        sentence_of.append(sent)
    root = random_discourse(rng, lengths, sentence_of, words=words)
    return DSTree(root, doc_id)


def random_deletion(rng, node, keep=0.6):
    """A random order-preserving compression of a syntax tree."""
    if node.word is not None:
        return node
    kept = [c for c in node.children if rng.random() < keep]
    if not kept:
        kept = [rng.choice(node.children)]
    return SyntaxNode(node.label, tuple(random_deletion(rng, c, keep) for c in kept))


def random_models(rng, trees, n_extra=6, max_words=12):
    """Train a ModelSet on ``trees`` plus some fresh random trees."""
    corpus = list(trees) + [random_dstree(rng, max_words, doc_id=f"extra{i}")
                            for i in range(n_extra)]
    dpairs, spairs = [], []
    for t in corpus:
        n_leaves = len(t.leaves())
        stars = {i for i in range(n_leaves) if rng.random() < 0.5} or {0}
        dpairs.extend(extract_discourse_templates(t, propagate_stars(t, stars)))
        for leaf in t.leaves():
            short = random_deletion(rng, leaf.edu)
            spairs.extend(extract_syntax_templates(leaf.edu, short))
    if not dpairs:
        # single-leaf corpora give no discourse evidence
        dpairs = [p for t in corpus for p in
                  extract_discourse_templates(t, propagate_stars(t, range(len(t.leaves()))))]
    dtable = estimate_expansion(dpairs, "discourse") if dpairs else ExpansionTable.empty(
        "discourse")
    stable = estimate_expansion(spairs, "syntax") if spairs else ExpansionTable.empty("syntax")
    dpcfg = estimate_pcfg([discourse_rules(t) for t in corpus])
    spcfg = estimate_pcfg([r for leaf in t.leaves() for r in leaf.edu.rules()]
                          for t in corpus)
    k = rng.choice((0.05, 0.1, 0.5, 1.0, 2.0))
    bigram = train_bigram([yield_words(t) for t in corpus], k=k)
    return ModelSet(bigram, spcfg, dpcfg, dtable, stable)


def random_weights(rng):
    if rng.random() < 0.5:
        return (1.0, 1.0, 1.0, 1.0)
    return tuple(round(rng.uniform(0.0, 2.0), 3) for _ in range(4))


def make_rng(seed):
    return random.Random(seed)
