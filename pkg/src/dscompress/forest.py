"""Packed AND/OR forest of every licensed compression of a DS-tree.

Each DS-tree node (discourse node, syntax phrase, or word) becomes one
forest node.  A phrase's alternatives are its licensed reductions: an
order-preserving, non-empty subsequence of its children, scored by the
channel, P(full rule | kept rule), and by the source PCFG of its layer,
P(kept rule).  Children are shared by every alternative that keeps them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .channel import TemplatePair
from .errors import DerivationLimitError, ResourceError
from .tree import DiscourseNode, DSTree, Rule, SyntaxNode

DEFAULT_MAX_SIZE = 200_000


@dataclass(frozen=True)
class ForestOptions:
    open_templates: bool = False
    max_size: int = DEFAULT_MAX_SIZE


@dataclass(frozen=True)
class Reduction:
    kept_children: tuple
    expansion_logprob: float
    source_rule_logprob: float
    pair: TemplatePair


@dataclass
class ForestNode:
    id: int
    source_path: str
    layer: str  # "discourse", "syntax" or "word"
    source: object
    sentence_index: int
    alternatives: tuple = ()
    word: str | None = None


@dataclass
class CompressionForest:
    root: int
    nodes: list
    tree: DSTree
    options: ForestOptions = field(default_factory=ForestOptions)

    def __getitem__(self, node_id):
        return self.nodes[node_id]

    @property
    def size(self):
        return len(self.nodes) + sum(len(n.alternatives) for n in self.nodes)


@dataclass(frozen=True)
class Derivation:
    """One compression: the compressed tree plus the scores it was built with."""

    tree: DSTree
    words: tuple
    discourse_pairs: tuple
    syntax_pairs: tuple
    expansion: float
    spcfg: float
    dpcfg: float


def _subsequences(labels, target):
    """Position tuples where ``labels`` spells ``target`` in order."""
    out = []

    def walk(i, j, acc):
        if i == len(target):
            out.append(tuple(acc))
            return
        for jj in range(j, len(labels) - (len(target) - i) + 1):
            if labels[jj] == target[i]:
                acc.append(jj)
                walk(i + 1, jj + 1, acc)
                acc.pop()

    walk(0, 0, [])
    return out


def licensed_positions(children, rule, table, open_templates, need_nucleus):
    """Kept-child position tuples allowed at a node; identity always first."""
    n = len(children)
    identity = tuple(range(n))
    found = {identity}
    if open_templates:
        for size in range(1, n):
            found.update(combinations(range(n), size))
    else:
        for kept in table.compressions_of(rule):
            found.update(_subsequences(rule.rhs, kept.rhs))
    if need_nucleus:
        found = {p for p in found if any(children[i].is_nucleus for i in p)}
        found.add(identity)
    rest = sorted(found - {identity})
    return [identity] + rest


class _Builder:
    def __init__(self, tree, dtable, stable, dpcfg, spcfg, opts):
        self.tree = tree
        self.dtable, self.stable = dtable, stable
        self.dpcfg, self.spcfg = dpcfg, spcfg
        self.opts = opts
        self.nodes = []
        self.size = 0

    def _new(self, path, layer, source, sentence, word=None):
        node = ForestNode(len(self.nodes), path, layer, source, sentence, (), word)
        self.nodes.append(node)
        self._charge(1)
        return node

    def _charge(self, n):
        self.size += n
        if self.size > self.opts.max_size:
            raise ResourceError(
                f"forest for {self.tree.doc_id or 'document'} exceeds {self.opts.max_size} "
                f"entries; try a shorter document or raise --forest-cap")

    def _reductions(self, node_children, rule, child_ids, table, pcfg, need_nucleus):
        alts = []
        for positions in licensed_positions(node_children, rule, table,
                                            self.opts.open_templates, need_nucleus):
            kept = Rule(rule.lhs, tuple(rule.rhs[i] for i in positions))
            pair = TemplatePair(rule, kept)
            exp = table.logprob(pair, self.opts.open_templates)
            alts.append(Reduction(tuple(child_ids[i] for i in positions), exp,
                                  pcfg.logprob(kept), pair))
        self._charge(len(alts))
        return tuple(alts)

    def syntax(self, node, path, sentence):
        if node.word is not None:
            return self._new(path, "word", node, sentence, node.word)
        kids = [self.syntax(c, f"{path}.{i}", sentence) for i, c in enumerate(node.children)]
        fnode = self._new(path, "syntax", node, sentence)
        fnode.alternatives = self._reductions(node.children, node.rule(),
                                              [k.id for k in kids], self.stable,
                                              self.spcfg, False)
        return fnode

    def discourse(self, node, path):
        dpath = "d" + ".".join(map(str, path))
        if node.is_leaf:
            edu = self.syntax(node.edu, dpath + "/s", node.sentence_index)
            fnode = self._new(dpath, "discourse", node, node.sentence_index)
            rule = node.rule()
            pair = TemplatePair(rule, rule)
            fnode.alternatives = (Reduction((edu.id,), self.dtable.logprob(pair),
                                            self.dpcfg.logprob(rule), pair),)
            self._charge(1)
            return fnode
        kids = [self.discourse(c, path + (i,)) for i, c in enumerate(node.children)]
        fnode = self._new(dpath, "discourse", node, kids[0].sentence_index)
        fnode.alternatives = self._reductions(node.children, node.rule(),
                                              [k.id for k in kids], self.dtable,
                                              self.dpcfg, True)
        return fnode


def build_forest(tree, dtable, stable, dpcfg, spcfg, opts=None):
    """Pack all compressions reachable by licensed reductions.

    In closed mode a node may keep child subsequence ``K`` only if the
    template table has seen ``K`` compressed from the node's full rule;
    open mode licenses any subsequence, scoring unseen templates at the
    table floor.  Discourse reductions must keep a nucleus.
    """
    opts = opts or ForestOptions()
    builder = _Builder(tree, dtable, stable, dpcfg, spcfg, opts)
    root = builder.discourse(tree.root, ())
    return CompressionForest(root.id, builder.nodes, tree, opts)


def count_derivations(forest):
    counts = [0] * len(forest.nodes)
    # children are always created before their parents
    for node in forest.nodes:
        if node.layer == "word":
            counts[node.id] = 1
            continue
        total = 0
        for alt in node.alternatives:
            prod = 1
            for kid in alt.kept_children:
                prod *= counts[kid]
            total += prod
        counts[node.id] = total
    return counts[forest.root]


def _product(lists):
    out = [()]
    for options in lists:
        out = [acc + (o,) for acc in out for o in options]
    return out


def enumerate_derivations(forest, limit=10_000):
    """Every derivation of the forest with its score components.

    Refuses (DerivationLimitError) when there are more than ``limit``.
    """
    count = count_derivations(forest)
    if count > limit:
        raise DerivationLimitError(count, limit)
    memo = {}

    def expand(node_id):
        if node_id in memo:
            return memo[node_id]
        node = forest.nodes[node_id]
        if node.layer == "word":
            result = [(node.source, (node.word,), (), (), 0.0, 0.0, 0.0)]
            memo[node_id] = result
            return result
        result = []
        for alt in node.alternatives:
            for combo in _product([expand(k) for k in alt.kept_children]):
                words = sum((c[1] for c in combo), ())
                dpairs = sum((c[2] for c in combo), ())
                spairs = sum((c[3] for c in combo), ())
                exp = alt.expansion_logprob + sum(c[4] for c in combo)
                sp = sum(c[5] for c in combo)
                dp = sum(c[6] for c in combo)
                src = node.source
                if node.layer == "syntax":
                    built = SyntaxNode(src.label, tuple(c[0] for c in combo))
                    spairs = (alt.pair,) + spairs
                    sp += alt.source_rule_logprob
                else:
                    if src.is_leaf:
                        built = DiscourseNode(src.status, src.relation, (), combo[0][0],
                                              src.sentence_index)
                    else:
                        built = DiscourseNode(src.status, src.relation,
                                              tuple(c[0] for c in combo))
                    dpairs = (alt.pair,) + dpairs
                    dp += alt.source_rule_logprob
                result.append((built, words, dpairs, spairs, exp, sp, dp))
        memo[node_id] = result
        return result

    tree = forest.tree
    return [Derivation(DSTree(r[0], tree.doc_id, tree.sentences), r[1], r[2], r[3],
                       r[4], r[5], r[6]) for r in expand(forest.root)]


def dump_forest(forest):
    lines = []
    for node in forest.nodes:
        lines.append(f"NODE {node.id} {node.source_path}")
        if node.layer == "word":
            lines.append(f"LEAF {node.id} {node.word}")
        for alt in node.alternatives:
            kids = " ".join(map(str, alt.kept_children))
            lines.append(f"ALT {node.id} {kids} exp={alt.expansion_logprob!r} "
                         f"src={alt.source_rule_logprob!r}")
    lines.append(f"ROOT {forest.root}")
    return "\n".join(lines) + "\n"
