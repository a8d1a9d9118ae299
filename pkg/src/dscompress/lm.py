"""Add-k smoothed word bigram model (natural-log scores)."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .errors import DataError, ParseError

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"


@dataclass(frozen=True)
class BigramModel:
    """Counts plus add-k smoothing.

    ``unigram_counts`` holds every token occurrence including ``BOS`` and
    ``EOS``; the count of a context ``c`` is its unigram count, since every
    non-final token is followed by exactly one other.
    """

    vocabulary: frozenset
    unigram_counts: dict
    bigram_counts: dict
    smoothing_k: float = 0.1
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.smoothing_k > 0:
            raise ValueError("smoothing_k must be positive")

    @property
    def outcomes(self):
        """Number of predictable symbols: vocabulary (with UNK) plus EOS."""
        return len(self.vocabulary) + 1

    def map_word(self, word):
        if word in (BOS, EOS) or word in self.vocabulary:
            return word
        return UNK

    def logprob(self, word, context):
        key = (context, word)
        lp = self._cache.get(key)
        if lp is None:
            c = self.map_word(context)
            w = self.map_word(word)
            ctx_count = self.unigram_counts.get(c, 0) if c != EOS else 0
            num = self.bigram_counts.get((c, w), 0) + self.smoothing_k
            den = ctx_count + self.smoothing_k * self.outcomes
            lp = math.log(num / den)
            self._cache[key] = lp
        return lp

    def prob(self, word, context):
        return math.exp(self.logprob(word, context))

    def row_sum(self, context):
        """Total probability mass of a context over vocabulary and EOS."""
        symbols = sorted(self.vocabulary) + [EOS]
        return math.fsum(self.prob(w, context) for w in symbols)


def train_bigram(corpus, k=0.1, unk_min_count=None):
    """Train on a sequence of token lists; one BOS...EOS chain per document.

    With ``unk_min_count`` set, words seen fewer times are counted as UNK.
    """
    docs = [list(doc) for doc in corpus]
    if not docs:
        raise DataError("cannot train a bigram model on an empty corpus")
    if not k > 0:
        raise ValueError("k must be positive")
    raw = Counter(w for doc in docs for w in doc)
    if unk_min_count:
        vocab = {w for w, n in raw.items() if n >= unk_min_count}
    else:
        vocab = set(raw)
    vocab.add(UNK)
    uni = Counter()
    bi = Counter()
    for doc in docs:
        chain = [BOS] + [w if w in vocab else UNK for w in doc] + [EOS]
        uni.update(chain)
        bi.update(zip(chain, chain[1:]))
    return BigramModel(frozenset(vocab), dict(uni), dict(bi), float(k))


def score_bigram(model, words):
    """Natural-log probability of ``BOS words EOS``."""
    chain = [BOS] + list(words) + [EOS]
    return math.fsum(model.logprob(w, c) for c, w in zip(chain, chain[1:]))


# ---------------------------------------------------------------------------
# model files

def dump_bigram(model):
    lines = [f"BIGRAM k={model.smoothing_k!r}"]
    # words that never occur (UNK without unk mapping) still need a UNI line
    uni = dict(model.unigram_counts)
    for w in model.vocabulary:
        uni.setdefault(w, 0)
    for w in sorted(uni):
        lines.append(f"UNI {w} {uni[w]}")
    for (a, b) in sorted(model.bigram_counts):
        lines.append(f"BI {a} {b} {model.bigram_counts[a, b]}")
    return "\n".join(lines) + "\n"


def load_bigram(text, source=None):
    lines = text.splitlines()
    if not lines or not lines[0].startswith("BIGRAM k="):
        raise ParseError("missing 'BIGRAM k=<float>' header", 1, 1, source)
    try:
        k = float(lines[0][len("BIGRAM k="):])
    except ValueError:
        raise ParseError("bad smoothing constant", 1, 10, source) from None
    uni, bi = {}, {}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        try:
            if parts[0] == "UNI" and len(parts) == 3:
                uni[parts[1]] = int(parts[2])
            elif parts[0] == "BI" and len(parts) == 4:
                bi[parts[1], parts[2]] = int(parts[3])
            else:
                raise ValueError
        except ValueError:
            raise ParseError(f"bad model line {line!r}", lineno, 1, source) from None
    vocab = frozenset(w for w in uni if w not in (BOS, EOS))
    uni = {w: n for w, n in uni.items() if n > 0}
    return BigramModel(vocab, uni, bi, k)
