"""End-to-end compression of one document with a fixed set of models."""
from __future__ import annotations

from dataclasses import dataclass, field

from .channel import ExpansionTable
from .chooser import SelectionPolicy, choose
from .decoder import DecodeOptions, decode, reconstruct
from .errors import DataError
from .forest import ForestOptions, build_forest
from .grammar import Pcfg
from .lm import BigramModel, train_bigram
from .tree import DiscourseNode, DSTree, merge_to_sentences, sentence_trees, yield_words

MODES = ("edu", "sent", "concat")


@dataclass(frozen=True)
class ModelSet:
    bigram: BigramModel
    spcfg: Pcfg
    dpcfg: Pcfg
    dtable: ExpansionTable
    stable: ExpansionTable

    @classmethod
    def identity(cls, corpus):
        """Models that license no deletions, with a bigram trained on ``corpus``."""
        return cls(train_bigram(corpus), Pcfg({}), Pcfg({}),
                   ExpansionTable.empty("discourse"), ExpansionTable.empty("syntax"))


@dataclass(frozen=True)
class CompressConfig:
    mode: str = "edu"
    policy: SelectionPolicy = SelectionPolicy()
    forest: ForestOptions = ForestOptions()
    decode: DecodeOptions = DecodeOptions()
    target_length: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class Section:
    """Decoding of one forest: the whole document, or one sentence in concat mode."""

    label: str
    table: object
    chosen_length: int
    chosen: object
    normalized: float | None

    @property
    def rows(self):
        return [(c.length, c.total_logprob) for c in self.table.candidates()]


@dataclass
class CompressionResult:
    doc_id: str
    mode: str
    original: list
    sections: list = field(default_factory=list)

    @property
    def words(self):
        out = []
        for sec in self.sections:
            out.extend(sec.chosen.words)
        return out


def _decode_tree(tree, models, config, label):
    forest = build_forest(tree, models.dtable, models.stable, models.dpcfg, models.spcfg,
                          config.forest)
    table = decode(forest, models.bigram, opts=config.decode)
    if config.target_length is not None:
        if config.target_length not in table.best:
            lengths = ", ".join(map(str, table.achievable_lengths))
            raise DataError(f"length {config.target_length} is not achievable for "
                            f"{tree.doc_id or 'document'}; achievable lengths: {lengths}")
        return Section(label, table, config.target_length, table[config.target_length], None)
    n, cand, score = choose(table, config.policy)
    return Section(label, table, n, cand, score)


def single_leaf_tree(parse, sentence_index, doc_id=""):
    """Wrap one syntax tree as a discourse tree with a single EDU."""
    return DSTree(DiscourseNode("Root", "Span", (), parse, sentence_index), doc_id)


def compress_tree(tree, models, config=CompressConfig()):
    result = CompressionResult(tree.doc_id, config.mode, yield_words(tree))
    if config.mode == "edu":
        result.sections.append(_decode_tree(tree, models, config, "document"))
    elif config.mode == "sent":
        result.sections.append(_decode_tree(merge_to_sentences(tree), models, config,
                                            "document"))
    else:
        if config.target_length is not None:
            raise DataError("--target-length does not apply to concat mode")
        for idx, parse in sentence_trees(tree):
            sub = single_leaf_tree(parse, idx, tree.doc_id)
            result.sections.append(_decode_tree(sub, models, config, f"sentence {idx}"))
    return result


def best_derivation(section):
    return reconstruct(section.chosen)
