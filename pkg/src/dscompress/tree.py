"""DS-trees: a discourse tree whose leaves carry syntax trees.

Text format (one s-expression for the discourse layer, Penn-style brackets
inside each EDU)::

    (Root=Span
      (Sat=Background (EDU 0 (S (NP (DT The) (NN mayor)) ...)))
      (Nuc=Span ...))

A document file may follow the tree with a sentence table, one line per
sentence: ``SENT <index> <syntree>``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

from .errors import DataError, ParseError, ValidationError

STATUSES = ("Root", "Nuc", "Sat")
EDU = "EDU"
_LABEL_RE = re.compile(r"^[^\s()]+$")
_DLABEL_RE = re.compile(r"^(Root|Nuc|Sat)=([^\s()=]+)$")


class Rule(NamedTuple):
    """A context-free rule ``lhs -> rhs``; used for both tree layers."""

    lhs: str
    rhs: tuple

    def __str__(self):
        return f"{self.lhs} -> {' '.join(self.rhs)}"

    @classmethod
    def parse(cls, text):
        lhs, _, rhs = text.partition("->")
        return cls(lhs.strip(), tuple(rhs.split()))


@dataclass(frozen=True)
class SyntaxNode:
    label: str
    children: tuple = ()
    word: str | None = None

    @property
    def is_leaf(self):
        return not self.children

    def leaves(self):
        if self.word is not None:
            return [self.word]
        out = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def rules(self):
        """Phrase-level rules in preorder; ``POS -> word`` is not a rule."""
        out = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node.word is not None:
                continue
            out.append(Rule(node.label, tuple(c.label for c in node.children)))
            stack.extend(reversed(node.children))
        return out

    def rule(self):
        return Rule(self.label, tuple(c.label for c in self.children))

    def __str__(self):
        return serialize_syntax(self)


@dataclass(frozen=True)
class DiscourseNode:
    status: str
    relation: str
    children: tuple = ()
    edu: SyntaxNode | None = None
    sentence_index: int | None = None

    @property
    def label(self):
        return f"{self.status}={self.relation}"

    @property
    def is_leaf(self):
        return self.edu is not None

    @property
    def is_nucleus(self):
        return self.status == "Nuc"

    def rule(self):
        if self.is_leaf:
            return Rule(self.label, (EDU,))
        return Rule(self.label, tuple(c.label for c in self.children))

    def leaves(self):
        if self.is_leaf:
            return [self]
        out = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def iter_nodes(self, path=()):
        """Yield ``(path, node)`` pairs in preorder."""
        yield path, self
        for i, child in enumerate(self.children):
            yield from child.iter_nodes(path + (i,))


@dataclass(frozen=True)
class DSTree:
    root: DiscourseNode
    doc_id: str = ""
    # sentence table: sorted (sentence_index, parse) pairs
    sentences: tuple = field(default=(), compare=True)

    def sentence_parse(self, index):
        for i, parse in self.sentences:
            if i == index:
                return parse
        return None

    def leaves(self):
        return self.root.leaves()

    def __len__(self):
        return len(yield_words(self))


# ---------------------------------------------------------------------------
# tokenizing and reading

class _Tok(NamedTuple):
    text: str
    line: int
    col: int


def _tokenize(text, source=None):
    toks = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch.isspace():
            col += 1
            i += 1
        elif ch in "()":
            toks.append(_Tok(ch, line, col))
            col += 1
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            toks.append(_Tok(text[i:j], line, col))
            col += j - i
            i = j
    return toks


def _read_sexpr(toks, pos, source):
    """Read one bracketed expression starting at ``toks[pos]``.

    Returns ``(expr, pos)``; an expr is a list whose items are tokens or
    nested lists, and whose first element is the opening-paren token.
    """
    if pos >= len(toks):
        raise ParseError("unexpected end of input", *(_eof(toks)), source)
    tok = toks[pos]
    if tok.text != "(":
        raise ParseError(f"expected '(' but found {tok.text!r}", tok.line, tok.col, source)
    expr = [tok]
    pos += 1
    while True:
        if pos >= len(toks):
            raise ParseError("unbalanced '('", tok.line, tok.col, source)
        cur = toks[pos]
        if cur.text == ")":
            return expr, pos + 1
        if cur.text == "(":
            sub, pos = _read_sexpr(toks, pos, source)
            expr.append(sub)
        else:
            expr.append(cur)
            pos += 1


def _eof(toks):
    if toks:
        return toks[-1].line, toks[-1].col + len(toks[-1].text)
    return 1, 1


def _build_syntax(expr, source):
    open_tok = expr[0]
    items = expr[1:]
    if not items or isinstance(items[0], list):
        raise ParseError("syntax node needs a label", open_tok.line, open_tok.col, source)
    label = items[0].text
    rest = items[1:]
    if not rest:
        raise ParseError(f"syntax node {label!r} has no children", open_tok.line,
                         open_tok.col, source)
    if len(rest) == 1 and not isinstance(rest[0], list):
        return SyntaxNode(label, (), rest[0].text)
    children = []
    for item in rest:
        if not isinstance(item, list):
            raise ParseError(f"unexpected word {item.text!r} inside phrase {label!r}",
                             item.line, item.col, source)
        children.append(_build_syntax(item, source))
    return SyntaxNode(label, tuple(children))


def _build_discourse(expr, source):
    open_tok = expr[0]
    items = expr[1:]
    if not items or isinstance(items[0], list):
        raise ParseError("discourse node needs a Status=Relation label",
                         open_tok.line, open_tok.col, source)
    lab = items[0]
    m = _DLABEL_RE.match(lab.text)
    if not m:
        raise ParseError(f"bad discourse label {lab.text!r}", lab.line, lab.col, source)
    status, relation = m.groups()
    kids = items[1:]
    if not kids:
        raise ParseError(f"discourse node {lab.text} has no children", lab.line, lab.col,
                         source)
    edus = [k for k in kids if isinstance(k, list) and len(k) > 1
            and not isinstance(k[1], list) and k[1].text == EDU]
    if edus:
        if len(kids) != 1:
            raise ParseError(f"{lab.text}: an EDU leaf must be the only child",
                             lab.line, lab.col, source)
        leaf = edus[0]
        if len(leaf) != 4 or isinstance(leaf[2], list) or not isinstance(leaf[3], list):
            raise ParseError("EDU leaf must be (EDU <int> <syntree>)", leaf[0].line,
                             leaf[0].col, source)
        try:
            idx = int(leaf[2].text)
        except ValueError:
            raise ParseError(f"sentence index {leaf[2].text!r} is not an integer",
                             leaf[2].line, leaf[2].col, source) from None
        if idx < 0:
            raise ParseError("sentence index must be non-negative", leaf[2].line,
                             leaf[2].col, source)
        return DiscourseNode(status, relation, (), _build_syntax(leaf[3], source), idx)
    children = []
    for k in kids:
        if not isinstance(k, list):
            raise ParseError(f"unexpected token {k.text!r}", k.line, k.col, source)
        children.append(_build_discourse(k, source))
    return DiscourseNode(status, relation, tuple(children))


def parse_syntax(text, source=None):
    toks = _tokenize(text, source)
    expr, pos = _read_sexpr(toks, 0, source)
    if pos != len(toks):
        t = toks[pos]
        raise ParseError(f"trailing input {t.text!r}", t.line, t.col, source)
    return _build_syntax(expr, source)


def parse_dstree(text, doc_id="", source=None, validate=True):
    """Parse a document: one DS-tree plus an optional ``SENT`` table."""
    toks = _tokenize(text, source)
    if not toks:
        raise ParseError("empty document", 1, 1, source)
    expr, pos = _read_sexpr(toks, 0, source)
    root = _build_discourse(expr, source)
    sentences = {}
    while pos < len(toks):
        t = toks[pos]
        if t.text != "SENT":
            raise ParseError(f"expected SENT line, found {t.text!r}", t.line, t.col, source)
        if pos + 1 >= len(toks):
            raise ParseError("SENT needs an index", t.line, t.col, source)
        idx_tok = toks[pos + 1]
        try:
            idx = int(idx_tok.text)
        except ValueError:
            raise ParseError(f"bad sentence index {idx_tok.text!r}", idx_tok.line,
                             idx_tok.col, source) from None
        sub, pos = _read_sexpr(toks, pos + 2, source)
        if idx in sentences:
            raise ParseError(f"duplicate SENT {idx}", t.line, t.col, source)
        sentences[idx] = _build_syntax(sub, source)
    tree = DSTree(root, doc_id, tuple(sorted(sentences.items())))
    if validate:
        validate_dstree(tree)
    return tree


def read_dstree(path, validate=True):
    from pathlib import Path
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_dstree(text, doc_id=path.stem, source=str(path), validate=validate)


# ---------------------------------------------------------------------------
# writing

def serialize_syntax(node):
    if node.word is not None:
        return f"({node.label} {node.word})"
    return f"({node.label} {' '.join(serialize_syntax(c) for c in node.children)})"


def _serialize_discourse(node, indent, depth):
    if node.is_leaf:
        return f"({node.label} ({EDU} {node.sentence_index} {serialize_syntax(node.edu)}))"
    if indent:
        pad = "\n" + "  " * (depth + 1)
        inner = pad.join(_serialize_discourse(c, indent, depth + 1) for c in node.children)
        return f"({node.label}{pad}{inner})"
    inner = " ".join(_serialize_discourse(c, indent, depth) for c in node.children)
    return f"({node.label} {inner})"


def serialize_dstree(tree, indent=False):
    """Canonical text for a document; ``indent`` puts discourse nodes on own lines."""
    lines = [_serialize_discourse(tree.root, indent, 0)]
    for idx, parse in tree.sentences:
        lines.append(f"SENT {idx} {serialize_syntax(parse)}")
    return "\n".join(lines) + "\n"


def canonical_whitespace(text):
    """Collapse whitespace in bracketed text to the serializer's spacing."""
    out = []
    prev = None
    for tok in _tokenize(text):
        t = tok.text
        if out and not (prev == "(" or t == ")"):
            out.append(" ")
        out.append(t)
        prev = t
    return "".join(out)


# ---------------------------------------------------------------------------
# validation

def _validate_syntax(node, path):
    if not _LABEL_RE.match(node.label or ""):
        raise ValidationError(f"bad syntax label {node.label!r}", path)
    if (node.word is None) == (not node.children):
        raise ValidationError("a syntax node has a word iff it has no children", path)
    if node.word is not None and not _LABEL_RE.match(node.word):
        raise ValidationError(f"bad word {node.word!r}", path)
    for i, child in enumerate(node.children):
        _validate_syntax(child, path + (i,))


def validate_dstree(tree):
    """Raise ValidationError naming the offending node path."""
    root = tree.root
    if root.status != "Root" or root.relation != "Span":
        raise ValidationError(f"root must be Root=Span, not {root.label}", ())
    last_sentence = -1
    for path, node in root.iter_nodes():
        if node.status not in STATUSES:
            raise ValidationError(f"unknown status {node.status!r}", path)
        if not _LABEL_RE.match(node.relation) or "=" in node.relation:
            raise ValidationError(f"bad relation {node.relation!r}", path)
        if path and node.status == "Root":
            raise ValidationError("status Root is only allowed at the tree root", path)
        if node.is_leaf == bool(node.children):
            raise ValidationError("node must have either children or an EDU", path)
        if node.is_leaf:
            if node.sentence_index is None or node.sentence_index < 0:
                raise ValidationError("leaf needs a non-negative sentence index", path)
            if node.sentence_index < last_sentence:
                raise ValidationError(
                    f"sentence index {node.sentence_index} follows {last_sentence}", path)
            last_sentence = node.sentence_index
            _validate_syntax(node.edu, path + ("edu",))
        elif not any(c.is_nucleus for c in node.children):
            raise ValidationError(f"{node.label} has no Nuc child", path)
    for idx, parse in tree.sentences:
        _validate_syntax(parse, ("SENT", idx))
    if not yield_words(tree):
        raise ValidationError("empty yield", ())
    return tree


# ---------------------------------------------------------------------------
# queries

def yield_words(tree):
    root = tree.root if isinstance(tree, DSTree) else tree
    words = []
    for leaf in root.leaves():
        words.extend(leaf.edu.leaves())
    return words


def discourse_rules(tree):
    """One rule per discourse node, preorder; leaves give ``X -> EDU``."""
    root = tree.root if isinstance(tree, DSTree) else tree
    return [node.rule() for _, node in root.iter_nodes()]


def syntax_rules(tree):
    root = tree.root if isinstance(tree, DSTree) else tree
    out = []
    for leaf in root.leaves():
        out.extend(leaf.edu.rules())
    return out


def iter_syntax_trees(trees):
    """EDU syntax trees of every document, left to right."""
    for tree in trees:
        for leaf in tree.leaves():
            yield leaf.edu


# ---------------------------------------------------------------------------
# EDU -> sentence merge

def _sentence_span(node):
    return {leaf.sentence_index for leaf in node.leaves()}


def _merged_leaf(tree, label_node, sentence, path):
    parse = tree.sentence_parse(sentence)
    if parse is None:
        raise DataError(f"{tree.doc_id or 'document'}: no SENT parse for sentence "
                        f"{sentence} (needed at discourse node {'/'.join(map(str, path)) or 'root'})")
    return DiscourseNode(label_node.status, label_node.relation, (), parse, sentence)


def _merge(tree, node, path):
    span = _sentence_span(node)
    if node.is_leaf:
        return node
    if len(span) == 1:
        return _merged_leaf(tree, node, next(iter(span)), path)
    # group consecutive single-sentence children by sentence
    groups = []
    for i, child in enumerate(node.children):
        cspan = _sentence_span(child)
        key = next(iter(cspan)) if len(cspan) == 1 else None
        if key is not None and groups and groups[-1][0] == key:
            groups[-1][1].append(i)
        else:
            groups.append((key, [i]))
    owners = {}
    for gi, (key, idxs) in enumerate(groups):
        for s in _sentence_span(node.children[idxs[0]]) if key is None else [key]:
            if s in owners:
                raise DataError(f"{tree.doc_id or 'document'}: sentence {s} crosses a "
                                f"discourse boundary under node "
                                f"{'/'.join(map(str, path)) or 'root'}")
            owners[s] = gi
    new_children = []
    for key, idxs in groups:
        if key is None:
            i = idxs[0]
            new_children.append(_merge(tree, node.children[i], path + (i,)))
            continue
        members = [node.children[i] for i in idxs]
        if len(members) == 1 and members[0].is_leaf:
            new_children.append(members[0])
            continue
        nuclei = [m for m in members if m.is_nucleus]
        label_node = nuclei[0] if nuclei else members[0]
        new_children.append(_merged_leaf(tree, label_node, key, path + (idxs[0],)))
    return DiscourseNode(node.status, node.relation, tuple(new_children))


def merge_to_sentences(tree):
    """Collapse each multi-EDU sentence into a single leaf holding its parse."""
    validate_dstree(tree)
    merged = DSTree(_merge(tree, tree.root, ()), tree.doc_id, tree.sentences)
    before, after = yield_words(tree), yield_words(merged)
    if before != after:
        raise DataError(f"{tree.doc_id or 'document'}: SENT parses do not match the EDU "
                        f"words ({len(before)} vs {len(after)} tokens)")
    return validate_dstree(merged)


def sentence_trees(tree):
    """One syntax tree per sentence, in order; prefers the SENT table."""
    by_sentence = {}
    for leaf in tree.leaves():
        by_sentence.setdefault(leaf.sentence_index, []).append(leaf)
    out = []
    for idx in sorted(by_sentence):
        parse = tree.sentence_parse(idx)
        if parse is None:
            leaves = by_sentence[idx]
            if len(leaves) != 1:
                raise DataError(f"{tree.doc_id or 'document'}: sentence {idx} spans "
                                f"{len(leaves)} EDUs but has no SENT parse")
            parse = leaves[0].edu
        out.append((idx, parse))
    return out
