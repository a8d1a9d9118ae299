"""Maximum-likelihood PCFG estimation and scoring of rule multisets.

The same class serves the syntax layer (phrase rules of EDU parses) and the
discourse layer (``Status=Relation`` rules of the discourse tree).
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .errors import DataError, ParseError
from .tree import Rule

DEFAULT_FLOOR = math.log(1e-6)


@dataclass(frozen=True)
class Pcfg:
    rule_logprob: dict
    floor_logprob: float = DEFAULT_FLOOR
    lhs_index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.lhs_index:
            index = defaultdict(set)
            for rule in self.rule_logprob:
                index[rule.lhs].add(rule)
            self.lhs_index.update(index)

    def logprob(self, rule):
        return self.rule_logprob.get(rule, self.floor_logprob)

    def lhs_mass(self, lhs):
        return math.fsum(math.exp(self.rule_logprob[r]) for r in self.lhs_index.get(lhs, ()))


def estimate_pcfg(rule_sources, floor=DEFAULT_FLOOR):
    """ML estimate: count(rule) / count(lhs).

    ``rule_sources`` is a sequence whose items are rule lists, e.g. the
    output of ``discourse_rules`` or ``SyntaxNode.rules`` for each tree.
    """
    counts = Counter()
    n_sources = 0
    for rules in rule_sources:
        n_sources += 1
        counts.update(Rule(r.lhs, tuple(r.rhs)) for r in rules)
    if not n_sources:
        raise DataError("cannot estimate a PCFG from zero trees")
    lhs_totals = Counter()
    for rule, n in counts.items():
        lhs_totals[rule.lhs] += n
    table = {rule: math.log(n / lhs_totals[rule.lhs]) for rule, n in counts.items()}
    if table:
        # unseen rules must score below every observed rule
        floor = min(floor, min(table.values()) - 1.0)
    return Pcfg(table, floor)


def score_tree(pcfg, rules):
    return math.fsum(pcfg.logprob(r) for r in rules)


def dump_pcfg(pcfg):
    lines = [f"PCFG floor={pcfg.floor_logprob!r}"]
    for rule in sorted(pcfg.rule_logprob):
        lines.append(f"RULE {rule.lhs} -> {' '.join(rule.rhs)} {pcfg.rule_logprob[rule]!r}")
    return "\n".join(lines) + "\n"


def load_pcfg(text, source=None):
    lines = text.splitlines()
    if not lines or not lines[0].startswith("PCFG floor="):
        raise ParseError("missing 'PCFG floor=<float>' header", 1, 1, source)
    try:
        floor = float(lines[0][len("PCFG floor="):])
    except ValueError:
        raise ParseError("bad floor value", 1, 12, source) from None
    table = {}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        if parts[0] != "RULE" or len(parts) < 5 or parts[2] != "->":
            raise ParseError(f"bad rule line {line!r}", lineno, 1, source)
        try:
            lp = float(parts[-1])
        except ValueError:
            raise ParseError(f"bad log-probability in {line!r}", lineno, 1, source) from None
        table[Rule(parts[1], tuple(parts[3:-1]))] = lp
    return Pcfg(table, floor)
