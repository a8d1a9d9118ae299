"""Length chooser: pick one compression by log-probability / n**alpha."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DataError

DEFAULT_ALPHA = 1.2


@dataclass(frozen=True)
class SelectionPolicy:
    alpha: float = DEFAULT_ALPHA
    raw_argmax: bool = False

    def __post_init__(self):
        if self.alpha < 0 or (self.alpha == 0 and not self.raw_argmax):
            raise ValueError("alpha must be positive (alpha=0 needs raw_argmax)")

    def normalize(self, logprob, length):
        if length < 1:
            raise DataError("cannot normalize an empty compression")
        if self.alpha == 0:
            return logprob
        return logprob / math.exp(self.alpha * math.log(length))


def normalized_rows(rows, policy):
    """``[(length, logprob)] -> [(length, logprob, normalized)]`` sorted by length."""
    return [(n, lp, policy.normalize(lp, n)) for n, lp in sorted(rows)]


def choose_length(rows, policy=SelectionPolicy()):
    """Argmax of the normalized score over ``(length, logprob)`` rows.

    Ties go to the shorter length.
    """
    table = normalized_rows(rows, policy)
    if not table:
        raise DataError("no candidates to choose from")
    best = table[0]
    for row in table[1:]:
        if row[2] > best[2]:
            best = row
    return best


def choose(candidates, policy=SelectionPolicy()):
    """Return ``(length, candidate, normalized_score)`` for a LengthTable."""
    best = candidates.best if hasattr(candidates, "best") else dict(candidates)
    if not best:
        raise DataError("empty length table")
    n, _, score = choose_length([(n, c.total_logprob) for n, c in best.items()], policy)
    return n, best[n], score


def format_table(rows, chosen, policy):
    """Tab-separated len / log prob / normalized / chosen-marker lines."""
    lines = ["#len\tlog_prob\tnormalized\tchosen"]
    for n, lp, score in normalized_rows(rows, policy):
        mark = "*" if n == chosen else "."
        lines.append(f"{n}\t{lp:.6f}\t{score:.6f}\t{mark}")
    return lines
