from importlib import resources

import pytest

from dscompress.channel import (ExpansionTable, estimate_expansion,
                                extract_discourse_templates, propagate_stars)
from dscompress.grammar import estimate_pcfg
from dscompress.lm import train_bigram
from dscompress.pipeline import ModelSet
from dscompress.tree import discourse_rules, parse_dstree, syntax_rules, yield_words

DATA = resources.files("dscompress") / "data"


def figure1_text():
    return (DATA / "figure1.ds").read_text(encoding="utf-8")


@pytest.fixture
def fig1_text():
    return figure1_text()


@pytest.fixture
def fig1():
    return parse_dstree(figure1_text(), doc_id="figure1")


@pytest.fixture
def fig1_models(fig1):
    """Three discourse templates from stars on the second and fifth EDUs."""
    pairs = extract_discourse_templates(fig1, propagate_stars(fig1, {1, 4}))
    return ModelSet(
        train_bigram([yield_words(fig1)], k=0.1),
        estimate_pcfg([syntax_rules(fig1)]),
        estimate_pcfg([discourse_rules(fig1)]),
        estimate_expansion(pairs, "discourse"),
        ExpansionTable.empty("syntax"),
    )


@pytest.fixture
def tiny():
    return parse_dstree("(Root=Span (EDU 0 (S (NP (NNP John)) (VP (VBD slept)))))",
                        doc_id="tiny")
