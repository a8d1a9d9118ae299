"""Channel model: expansion-template probabilities P(full rule | kept rule).

Templates are counted from two kinds of evidence:

* discourse: human importance stars on EDUs, propagated up the tree; every
  starred internal node yields (full rule, rule over its starred children);
* syntax: aligned (long, short) parse pairs; every aligned phrase yields
  (long rule, rule over the children that survive in the short parse).
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import AlignmentError, DataError, ParseError
from .grammar import DEFAULT_FLOOR
from .tree import DSTree, Rule, SyntaxNode, serialize_syntax

LAYERS = ("discourse", "syntax")
UNLICENSED = float("-inf")


class TemplatePair(NamedTuple):
    expanded: Rule
    compressed: Rule

    @property
    def is_identity(self):
        return self.expanded == self.compressed

    def check(self):
        if self.compressed.lhs != self.expanded.lhs:
            raise ValueError(f"lhs mismatch in template {self}")
        if not self.compressed.rhs or not is_subsequence(self.compressed.rhs,
                                                         self.expanded.rhs):
            raise ValueError(f"{self.compressed} is not a compression of {self.expanded}")
        return self

    def __str__(self):
        return f"{self.expanded} | {self.compressed}"


def is_subsequence(short, long):
    it = iter(long)
    return all(any(x == y for y in it) for x in short)


@dataclass(frozen=True)
class ExpansionTable:
    """``table[compressed][expanded] = log P(expanded | compressed)``."""

    table: dict
    layer: str = "discourse"
    floor_logprob: float = DEFAULT_FLOOR
    _by_expanded: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.layer not in LAYERS:
            raise ValueError(f"unknown layer {self.layer!r}")
        index = defaultdict(list)
        for compressed in sorted(self.table):
            for expanded in self.table[compressed]:
                if expanded != compressed:
                    index[expanded].append(compressed)
        self._by_expanded.update(index)

    @classmethod
    def empty(cls, layer):
        return cls({}, layer)

    def compressions_of(self, expanded):
        """Kept rules observed as compressions of ``expanded`` (identity excluded)."""
        return self._by_expanded.get(expanded, [])

    def logprob(self, pair, open_vocab=False):
        row = self.table.get(pair.compressed)
        if row is not None and pair.expanded in row:
            return row[pair.expanded]
        if row is None and pair.is_identity:
            # a rule never seen compressed only ever expands to itself
            return 0.0
        return self.floor_logprob if open_vocab else UNLICENSED

    def row_mass(self, compressed):
        return math.fsum(math.exp(lp) for lp in self.table[compressed].values())


# ---------------------------------------------------------------------------
# discourse evidence

def propagate_stars(tree, starred):
    """Paths of every discourse node with a starred EDU at or below it."""
    leaves = list(tree.root.iter_nodes())
    leaf_paths = [path for path, node in leaves if node.is_leaf]
    starred = set(starred)
    for idx in starred:
        if not 0 <= idx < len(leaf_paths):
            raise DataError(f"{tree.doc_id or 'document'}: starred EDU {idx} out of range "
                            f"(tree has {len(leaf_paths)} leaves)")
    marked = set()
    for idx in starred:
        path = leaf_paths[idx]
        for depth in range(len(path) + 1):
            marked.add(path[:depth])
    return marked


def extract_discourse_templates(tree, starred_nodes):
    """One pair per starred internal node: full rule, rule over starred children."""
    pairs = []
    for path, node in tree.root.iter_nodes():
        if node.is_leaf or path not in starred_nodes:
            continue
        kept = tuple(c.label for i, c in enumerate(node.children)
                     if path + (i,) in starred_nodes)
        if not kept:
            continue
        pairs.append(TemplatePair(node.rule(), Rule(node.label, kept)))
    return pairs


# ---------------------------------------------------------------------------
# syntax evidence

class _Aligner:
    def __init__(self):
        self.memo = {}
        self.failure = None

    def align(self, long, short):
        key = (id(long), id(short))
        if key not in self.memo:
            self.memo[key] = self._align(long, short)
        return self.memo[key]

    def _align(self, long, short):
        if long.label != short.label:
            return None
        if long.word is not None or short.word is not None:
            return [] if long.word == short.word else None
        placed = self._place(long.children, short.children, 0, 0)
        if placed is None:
            return None
        positions, child_pairs = placed
        kept = Rule(long.label, tuple(long.children[j].label for j in positions))
        return [TemplatePair(long.rule(), kept)] + child_pairs

    def _place(self, lkids, skids, i, j):
        if i == len(skids):
            return [], []
        for jj in range(j, len(lkids) - (len(skids) - i) + 1):
            sub = self.align(lkids[jj], skids[i])
            if sub is None:
                continue
            rest = self._place(lkids, skids, i + 1, jj + 1)
            if rest is not None:
                return [jj] + rest[0], sub + rest[1]
        if self.failure is None:
            self.failure = skids[i]
        return None


def extract_syntax_templates(long, short):
    """Align ``short`` inside ``long`` (leftmost first) and read off templates.

    Pairs come out in preorder of the long tree's aligned phrases.
    """
    aligner = _Aligner()
    pairs = aligner.align(long, short)
    if pairs is None:
        bad = aligner.failure if aligner.failure is not None else short
        raise AlignmentError(f"cannot align constituent {serialize_syntax(bad)} "
                             f"inside {long.label} tree")
    return pairs


# ---------------------------------------------------------------------------
# estimation and scoring

def estimate_expansion(pairs, layer, identity_count=1, floor=DEFAULT_FLOOR):
    """Relative frequency count(pair) / count(kept rule).

    Rows lacking an identity expansion get ``identity_count`` extra
    observations of it, so keeping material is never impossible.
    """
    counts = Counter(TemplatePair(*p).check() for p in pairs)
    if not counts:
        raise DataError(f"no {layer} templates to estimate from")
    rows = defaultdict(Counter)
    for pair, n in counts.items():
        rows[pair.compressed][pair.expanded] += n
    for compressed, row in rows.items():
        if compressed not in row and identity_count:
            row[compressed] += identity_count
    table = {}
    for compressed, row in rows.items():
        total = sum(row.values())
        table[compressed] = {exp: math.log(n / total) for exp, n in row.items()}
    return ExpansionTable(table, layer, floor)


def score_expansion(table, pairs, open_vocab=False):
    lps = [table.logprob(TemplatePair(*p), open_vocab) for p in pairs]
    if any(lp == UNLICENSED for lp in lps):
        return UNLICENSED
    return math.fsum(lps)


# ---------------------------------------------------------------------------
# files

def dump_expansion(table):
    lines = [f"EXPAND layer={table.layer} floor={table.floor_logprob!r}"]
    for compressed in sorted(table.table):
        row = table.table[compressed]
        for expanded in sorted(row):
            lines.append(f"T {compressed.lhs} -> {' '.join(compressed.rhs)} | "
                         f"{' '.join(expanded.rhs)} {row[expanded]!r}")
    return "\n".join(lines) + "\n"


def load_expansion(text, source=None):
    lines = text.splitlines()
    head = lines[0].split() if lines else []
    if (len(head) != 3 or head[0] != "EXPAND" or not head[1].startswith("layer=")
            or not head[2].startswith("floor=")):
        raise ParseError("missing 'EXPAND layer=<layer> floor=<float>' header", 1, 1, source)
    layer = head[1][len("layer="):]
    if layer not in LAYERS:
        raise ParseError(f"unknown layer {layer!r}", 1, 8, source)
    try:
        floor = float(head[2][len("floor="):])
    except ValueError:
        raise ParseError("bad floor value", 1, 1, source) from None
    table = defaultdict(dict)
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        try:
            if parts[0] != "T" or parts[2] != "->" or "|" not in parts:
                raise ValueError
            bar = parts.index("|")
            lhs = parts[1]
            compressed = Rule(lhs, tuple(parts[3:bar]))
            expanded = Rule(lhs, tuple(parts[bar + 1:-1]))
            lp = float(parts[-1])
            if not compressed.rhs or not expanded.rhs:
                raise ValueError
        except (ValueError, IndexError):
            raise ParseError(f"bad template line {line!r}", lineno, 1, source) from None
        table[compressed][expanded] = lp
    return ExpansionTable(dict(table), layer, floor)


def load_stars(text, source=None):
    """``STAR <doc_id> <idx> ...`` lines -> {doc_id: set of leaf indices}."""
    stars = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] != "STAR" or len(parts) < 3:
            raise ParseError(f"bad star line {line!r}", lineno, 1, source)
        try:
            idxs = {int(p) for p in parts[2:]}
        except ValueError:
            raise ParseError(f"non-integer EDU index in {line!r}", lineno, 1, source) from None
        stars.setdefault(parts[1], set()).update(idxs)
    return stars


def dump_stars(stars):
    return "".join(f"STAR {doc} {' '.join(map(str, sorted(idx)))}\n"
                   for doc, idx in sorted(stars.items()))


def load_syntax_pairs(text, source=None):
    """Tab-separated ``<long syntree>\\t<short syntree>`` lines."""
    from .tree import parse_syntax
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.count("\t") != 1:
            raise ParseError("expected '<long>\\t<short>'", lineno, 1, source)
        long_text, short_text = line.split("\t")
        try:
            out.append((parse_syntax(long_text), parse_syntax(short_text)))
        except ParseError as exc:
            raise ParseError(f"in pair: {exc}", lineno, 1, source) from None
    return out
