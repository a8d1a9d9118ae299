"""Comparison harness: Random, Concat, EDU and Sent systems and the Cmp metric."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .errors import DataError, DSCompressError
from .pipeline import CompressConfig, compress_tree
from .tree import yield_words

log = logging.getLogger(__name__)

SYSTEMS = ("random", "concat", "edu", "sent")
SYSTEM_NAMES = {"random": "Random", "concat": "Concat", "edu": "EDU", "sent": "Sent"}


@dataclass(frozen=True)
class EvalRecord:
    doc_id: str
    system_name: str
    original_length: int
    compressed_length: int
    cmp: Fraction
    output_text: str
    error: str | None = None


def compression_rate(original, compressed):
    """Exact ratio of compressed to original token counts."""
    if not len(original):
        raise DataError("original document is empty")
    return Fraction(len(compressed), len(original))


def format_ratio(value, places=2):
    """Round half away from zero to ``places`` decimals, exactly."""
    frac = Fraction(value)
    sign = "-" if frac < 0 else ""
    scale = 10 ** places
    scaled = abs(frac) * scale
    q = (scaled.numerator * 2 + scaled.denominator) // (2 * scaled.denominator)
    if not q:
        sign = ""
    return f"{sign}{q // scale}.{q % scale:0{places}d}"


def random_baseline(doc, p=0.5, seed=0):
    """Drop each word independently with probability ``p``.

    An all-dropped draw is redrawn, so at least one word survives.
    ``seed`` is anything ``numpy.random.default_rng`` accepts.
    """
    if not 0 < p < 1:
        raise ValueError("p must be in (0, 1)")
    words = list(doc)
    if not words:
        return []
    rng = np.random.default_rng(seed)
    while True:
        keep = rng.random(len(words)) >= p
        if keep.any():
            return [w for w, k in zip(words, keep) if k]


def concat_compress(tree, models, policy=None, config=None):
    """Compress every sentence on its own, then concatenate in order."""
    config = config or CompressConfig()
    config = replace(config, mode="concat", target_length=None)
    if policy is not None:
        config = replace(config, policy=policy)
    return compress_tree(tree, models, config).words


@dataclass(frozen=True)
class SuiteConfig:
    systems: tuple = ("random", "concat", "edu", "sent")
    p: float = 0.5
    seed: int = 0
    compress: CompressConfig = CompressConfig()
    jobs: int = 1


def _run_one(args):
    index, tree, models, cfg = args
    original = yield_words(tree)
    records = []
    for system in cfg.systems:
        name = SYSTEM_NAMES[system]
        try:
            if system == "random":
                out = random_baseline(original, cfg.p, seed=[cfg.seed, index])
            elif system == "concat":
                out = concat_compress(tree, models, config=cfg.compress)
            else:
                out = compress_tree(tree, models, replace(cfg.compress, mode=system)).words
        except DSCompressError as exc:
            log.warning("%s failed on %s: %s", name, tree.doc_id, exc)
            records.append(EvalRecord(tree.doc_id, name, len(original), 0, Fraction(0),
                                      "", str(exc)))
            continue
        records.append(EvalRecord(tree.doc_id, name, len(original), len(out),
                                  compression_rate(original, out), " ".join(out)))
    return records


def run_suite(corpus, models, config=SuiteConfig()):
    """One record per (document, system) plus per-system summaries.

    Failed documents are recorded with ``error`` set and left out of the
    means.  Output order follows the corpus regardless of ``jobs``.
    """
    corpus = list(corpus)
    if not corpus:
        raise DataError("empty evaluation corpus")
    for system in config.systems:
        if system not in SYSTEMS:
            raise ValueError(f"unknown system {system!r}")
    work = [(i, tree, models, config) for i, tree in enumerate(corpus)]
    if config.jobs > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            per_doc = list(pool.map(_run_one, work))
    else:
        per_doc = [_run_one(w) for w in work]
    records = [r for recs in per_doc for r in recs]
    return records, summarize(records, config.systems)


@dataclass(frozen=True)
class SystemSummary:
    system: str
    cmp: Fraction
    docs: int
    mean_len_in: Fraction
    mean_len_out: Fraction
    failures: int = 0


def summarize(records, systems):
    out = []
    for system in systems:
        name = SYSTEM_NAMES[system]
        mine = [r for r in records if r.system_name == name]
        ok = [r for r in mine if r.error is None]
        n = len(ok)
        if n:
            cmp = sum((r.cmp for r in ok), Fraction(0)) / n
            lin = Fraction(sum(r.original_length for r in ok), n)
            lout = Fraction(sum(r.compressed_length for r in ok), n)
        else:
            cmp = lin = lout = Fraction(0)
        out.append(SystemSummary(name, cmp, n, lin, lout, len(mine) - n))
    return out


def format_report(summaries):
    lines = ["system\tCmp\tdocs\tmean_len_in\tmean_len_out"]
    for s in summaries:
        lines.append(f"{s.system}\t{format_ratio(s.cmp)}\t{s.docs}\t"
                     f"{format_ratio(s.mean_len_in)}\t{format_ratio(s.mean_len_out)}")
    return "\n".join(lines) + "\n"


def format_records(records):
    lines = ["doc_id\tsystem\tlen_in\tlen_out\tCmp\toutput"]
    for r in records:
        text = r.output_text if r.error is None else f"ERROR: {r.error}"
        lines.append(f"{r.doc_id}\t{r.system_name}\t{r.original_length}\t"
                     f"{r.compressed_length}\t{format_ratio(r.cmp)}\t{text}")
    return "\n".join(lines) + "\n"
