"""Exact best-compression-per-length extraction from a compression forest.

Every forest node gets a table keyed by signature ``(length, first word,
last word)``.  Bigram scores across a child boundary depend only on the
boundary words, and all other score components are sums over reductions,
so keeping the single best entry per signature is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

from .channel import score_expansion
from .errors import DataError, ResourceError
from .forest import Derivation
from .grammar import score_tree
from .lm import BOS, EOS, score_bigram
from .tree import DiscourseNode, DSTree, SyntaxNode, discourse_rules, syntax_rules

DEFAULT_WEIGHTS = (1.0, 1.0, 1.0, 1.0)
DEFAULT_MAX_SIGNATURES = 2_000_000
COMPONENTS = ("bigram", "spcfg", "dpcfg", "expansion")


class Components(NamedTuple):
    bigram: float = 0.0
    spcfg: float = 0.0
    dpcfg: float = 0.0
    expansion: float = 0.0

    def __add__(self, other):
        return Components(*(a + b for a, b in zip(self, other)))

    def weighted(self, weights):
        return math.fsum(w * c for w, c in zip(weights, self))


class Signature(NamedTuple):
    length: int
    first_word: str | None
    last_word: str | None

    @property
    def is_empty(self):
        return self.length == 0


@dataclass(frozen=True)
class DecodeOptions:
    weights: tuple = DEFAULT_WEIGHTS
    per_sentence: bool = False
    max_signatures: int = DEFAULT_MAX_SIGNATURES
    keep_tables: bool = False


@dataclass(eq=False)
class _Entry:
    total: float
    comps: Components
    words: tuple
    first: tuple
    last: tuple
    node: int
    alt: int
    kids: tuple

    def beats(self, other):
        if self.total != other.total:
            return self.total > other.total
        return self.words < other.words


@dataclass(eq=False)
class Candidate:
    signature: Signature
    total_logprob: float
    components: Components
    backpointers: _Entry
    forest: object = field(repr=False)

    @property
    def length(self):
        return self.signature.length

    @property
    def words(self):
        return self.backpointers.words


@dataclass
class LengthTable:
    best: dict
    node_tables: list | None = None

    @property
    def achievable_lengths(self):
        return sorted(self.best)

    def __getitem__(self, length):
        return self.best[length]

    def __len__(self):
        return len(self.best)

    def candidates(self):
        return [self.best[n] for n in sorted(self.best)]


class _Decoder:
    def __init__(self, forest, lm, opts):
        self.forest = forest
        self.lm = lm
        self.opts = opts
        self.weights = tuple(float(w) for w in opts.weights)
        self.charged = 0

    def _charge(self, n):
        self.charged += n
        if self.charged > self.opts.max_signatures:
            raise ResourceError(
                f"decoder signature tables exceed {self.opts.max_signatures} entries for "
                f"{self.forest.tree.doc_id or 'document'}; use a shorter document")

    def boundary(self, node):
        sent = node.sentence_index if self.opts.per_sentence else None
        return (node.word, sent)

    def transition(self, left, right):
        if self.opts.per_sentence and left[1] != right[1]:
            return self.lm.logprob(EOS, left[0]) + self.lm.logprob(right[0], BOS)
        return self.lm.logprob(right[0], left[0])

    def _offer(self, table, key, entry):
        cur = table.get(key)
        if cur is None:
            self._charge(1)
            table[key] = entry
        elif entry.beats(cur):
            table[key] = entry

    def _make(self, comps, words, first, last, node, alt, kids):
        return _Entry(comps.weighted(self.weights), comps, words, first, last, node, alt, kids)

    def run(self):
        nodes = self.forest.nodes
        tables = [None] * len(nodes)
        for node in nodes:
            if node.layer == "word":
                b = self.boundary(node)
                tables[node.id] = {(1, b, b): self._make(Components(), (node.word,), b, b,
                                                         node.id, -1, ())}
                self._charge(1)
                continue
            table = {}
            for alt_idx, alt in enumerate(node.alternatives):
                partial = None
                for kid in alt.kept_children:
                    ktable = tables[kid]
                    if partial is None:
                        partial = {key: (e.comps, e.words, e.first, e.last, (e,))
                                   for key, e in ktable.items()}
                        continue
                    merged = {}
                    for (plen, _, _), (pc, pw, pf, pl, pk) in partial.items():
                        for (klen, _, _), e in ktable.items():
                            bg = self.transition(pl, e.first)
                            comps = pc + e.comps + Components(bigram=bg)
                            key = (plen + klen, pf, e.last)
                            cand = (comps, pw + e.words, pf, e.last, pk + (e,))
                            cur = merged.get(key)
                            if cur is None:
                                self._charge(1)
                                merged[key] = cand
                            else:
                                t_new = comps.weighted(self.weights)
                                t_cur = cur[0].weighted(self.weights)
                                if t_new > t_cur or (t_new == t_cur and cand[1] < cur[1]):
                                    merged[key] = cand
                    partial = merged
                if node.layer == "syntax":
                    local = Components(spcfg=alt.source_rule_logprob,
                                       expansion=alt.expansion_logprob)
                else:
                    local = Components(dpcfg=alt.source_rule_logprob,
                                       expansion=alt.expansion_logprob)
                for key, (pc, pw, pf, pl, pk) in partial.items():
                    self._offer(table, key, self._make(pc + local, pw, pf, pl, node.id,
                                                       alt_idx, pk))
            tables[node.id] = table
        return tables


def decode(forest, lm, weights=None, opts=None):
    """Best candidate per achievable length under the weighted model score.

    ``weights`` scales (bigram, syntax PCFG, discourse PCFG, expansion) log
    scores.  Ties go to the lexicographically smallest word sequence.
    """
    opts = opts or DecodeOptions()
    if weights is not None:
        opts = replace(opts, weights=tuple(weights))
    if len(opts.weights) != 4 or any(w < 0 for w in opts.weights):
        raise ValueError("weights must be four non-negative numbers")
    dec = _Decoder(forest, lm, opts)
    tables = dec.run()
    best = {}
    for (length, first, last), e in tables[forest.root].items():
        edge = lm.logprob(first[0], BOS) + lm.logprob(EOS, last[0])
        comps = e.comps + Components(bigram=edge)
        final = _Entry(comps.weighted(dec.weights), comps, e.words, first, last, e.node,
                       e.alt, e.kids)
        cur = best.get(length)
        if cur is None or final.beats(cur.backpointers):
            best[length] = Candidate(Signature(length, first[0], last[0]), final.total,
                                     comps, final, forest)
    return LengthTable(best, tables if opts.keep_tables else None)


def reconstruct(candidate):
    """Rebuild the compressed DS-tree a candidate stands for."""
    forest = candidate.forest
    dpairs, spairs = [], []

    def build(entry):
        node = forest.nodes[entry.node]
        if node.layer == "word":
            return node.source
        alt = node.alternatives[entry.alt]
        assert len(entry.kids) == len(alt.kept_children), "dangling backpointer"
        for kid, kid_id in zip(entry.kids, alt.kept_children):
            assert kid.node == kid_id, "dangling backpointer"
        src = node.source
        if node.layer == "syntax":
            spairs.append(alt.pair)
            return SyntaxNode(src.label, tuple(build(k) for k in entry.kids))
        dpairs.append(alt.pair)
        if src.is_leaf:
            return DiscourseNode(src.status, src.relation, (), build(entry.kids[0]),
                                 src.sentence_index)
        return DiscourseNode(src.status, src.relation, tuple(build(k) for k in entry.kids))

    root = build(candidate.backpointers)
    tree = DSTree(root, forest.tree.doc_id, forest.tree.sentences)
    comps = candidate.components
    return Derivation(tree, candidate.words, tuple(dpairs), tuple(spairs),
                      comps.expansion, comps.spcfg, comps.dpcfg)


def sentence_chains(tree):
    """Word lists per sentence, in order, for per-sentence bigram scoring."""
    chains = []
    last = None
    for leaf in tree.leaves():
        words = leaf.edu.leaves()
        if leaf.sentence_index != last:
            chains.append([])
            last = leaf.sentence_index
        chains[-1].extend(words)
    return chains


def score_components(derivation, lm, spcfg, dpcfg, dtable, stable, open_templates=False,
                     per_sentence=False):
    """Recompute all four components of a compression from scratch."""
    tree = derivation.tree
    if per_sentence:
        bigram = math.fsum(score_bigram(lm, chain) for chain in sentence_chains(tree))
    else:
        bigram = score_bigram(lm, derivation.words)
    expansion = (score_expansion(dtable, derivation.discourse_pairs, open_templates)
                 + score_expansion(stable, derivation.syntax_pairs, open_templates))
    return Components(bigram, score_tree(spcfg, syntax_rules(tree)),
                      score_tree(dpcfg, discourse_rules(tree)), expansion)


# ---------------------------------------------------------------------------
# CAND lines

def format_cand(length, total, comps, words):
    nums = " ".join(repr(float(x)) for x in (total, *comps))
    return f"CAND {length} {nums} " + "\t".join(words)


def candidate_line(candidate):
    return format_cand(candidate.length, candidate.total_logprob, candidate.components,
                       candidate.words)


def parse_cand(line):
    """Inverse of ``format_cand``: (length, total, Components, words)."""
    head, _, rest = line.rstrip("\n").partition(" ")
    fields = rest.split(" ", 6)
    if head != "CAND" or len(fields) != 7:
        raise DataError(f"bad CAND line {line!r}")
    try:
        length = int(fields[0])
        nums = [float(x) for x in fields[1:6]]
    except ValueError:
        raise DataError(f"bad CAND line {line!r}") from None
    words = tuple(fields[6].split("\t")) if fields[6] else ()
    if len(words) != length:
        raise DataError(f"CAND length {length} does not match {len(words)} words")
    return length, nums[0], Components(*nums[1:]), words
