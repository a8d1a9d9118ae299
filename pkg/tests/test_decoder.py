import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dscompress.decoder import (Components, DecodeOptions, candidate_line, decode,
                                format_cand, parse_cand, reconstruct, score_components)
from dscompress.errors import DataError
from dscompress.forest import ForestOptions, build_forest, enumerate_derivations
from dscompress.lm import score_bigram
from dscompress.tree import serialize_dstree, yield_words

from oracles import brute_force_best, random_instance, rescore


def _fig1_forest(fig1, models):
    return build_forest(fig1, models.dtable, models.stable, models.dpcfg, models.spcfg)


@pytest.mark.parametrize("seed", range(150))
def test_oracle_equivalence(seed):
    tree, models, forest, dopts = random_instance(seed)
    table = decode(forest, models.bigram, opts=dopts)
    derivs = enumerate_derivations(forest, limit=200)
    want = brute_force_best(derivs, lambda d: rescore(d, models, forest, dopts))
    assert set(table.best) == set(want)
    for n, (top, near, exact) in want.items():
        cand = table[n]
        assert abs(cand.total_logprob - top) <= 1e-9
        assert cand.words in near
        assert cand.components.weighted(dopts.weights) == pytest.approx(cand.total_logprob,
                                                                        abs=1e-12)


@pytest.mark.parametrize("seed", range(60))
def test_backpointers_and_reconstruct(seed):
    tree, models, forest, dopts = random_instance(seed)
    table = decode(forest, models.bigram, opts=DecodeOptions(
        dopts.weights, dopts.per_sentence, keep_tables=True))
    assert table.node_tables is not None
    by_text = {serialize_dstree(d.tree): d for d in enumerate_derivations(forest, 200)}
    for cand in table.candidates():
        d = reconstruct(cand)
        assert d.words == cand.words
        # reconstructed tree is a real derivation of the forest
        assert serialize_dstree(d.tree) in by_text
        comps = score_components(d, models.bigram, models.spcfg, models.dpcfg, models.dtable,
                                 models.stable, forest.options.open_templates,
                                 dopts.per_sentence)
        for a, b in zip(comps, cand.components):
            assert a == pytest.approx(b, abs=1e-9)


def test_bigram_only_weights(fig1, fig1_models):
    forest = _fig1_forest(fig1, fig1_models)
    table = decode(forest, fig1_models.bigram, weights=(1, 0, 0, 0))
    for cand in table.candidates():
        assert cand.total_logprob == pytest.approx(
            score_bigram(fig1_models.bigram, cand.words), abs=1e-9)


@pytest.mark.parametrize("scale", [0.5, 2.0, 7.0])
def test_scale_invariance(fig1, fig1_models, scale):
    forest = _fig1_forest(fig1, fig1_models)
    base = decode(forest, fig1_models.bigram)
    scaled = decode(forest, fig1_models.bigram, weights=(scale,) * 4)
    assert base.achievable_lengths == scaled.achievable_lengths == [21, 29, 37, 45]
    for n in base.best:
        assert scaled[n].words == base[n].words
        assert scaled[n].total_logprob == pytest.approx(scale * base[n].total_logprob)


def test_figure1_full_length_is_original(fig1, fig1_models):
    table = decode(_fig1_forest(fig1, fig1_models), fig1_models.bigram)
    assert list(table[45].words) == yield_words(fig1)
    assert table[45].signature.first_word == "The"
    assert table[21].words[0] == "John"


def test_bad_weights(fig1, fig1_models):
    forest = _fig1_forest(fig1, fig1_models)
    with pytest.raises(ValueError):
        decode(forest, fig1_models.bigram, weights=(1, 1, 1))
    with pytest.raises(ValueError):
        decode(forest, fig1_models.bigram, weights=(1, -1, 1, 1))


def test_signature_limit(fig1, fig1_models):
    from dscompress.errors import ResourceError
    forest = _fig1_forest(fig1, fig1_models)
    with pytest.raises(ResourceError):
        decode(forest, fig1_models.bigram, opts=DecodeOptions(max_signatures=5))


def test_open_mode_lengths(tiny):
    from dscompress.pipeline import ModelSet
    models = ModelSet.identity([yield_words(tiny)])
    forest = build_forest(tiny, models.dtable, models.stable, models.dpcfg, models.spcfg,
                          ForestOptions(open_templates=True))
    table = decode(forest, models.bigram)
    assert table.achievable_lengths == [1, 2]
    # exact tie on everything but the bigram; both one-word outputs are scored
    assert table[1].words in {("John",), ("slept",)}


def test_cand_line_round_trip(fig1, fig1_models):
    table = decode(_fig1_forest(fig1, fig1_models), fig1_models.bigram)
    for cand in table.candidates():
        line = candidate_line(cand)
        n, total, comps, words = parse_cand(line)
        assert (n, total, comps, words) == (cand.length, cand.total_logprob,
                                            cand.components, cand.words)
        assert format_cand(n, total, comps, words) == line


words_st = st.lists(st.text(st.characters(blacklist_categories=("Zs", "Cc", "Zl", "Zp")),
                             min_size=1, max_size=6), min_size=1, max_size=8)
float_st = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=300)
@given(words_st, float_st, st.tuples(float_st, float_st, float_st, float_st))
def test_cand_round_trip_property(words, total, comps):
    comps = Components(*comps)
    line = format_cand(len(words), total, comps, words)
    assert parse_cand(line) == (len(words), total, comps, tuple(words))
    assert format_cand(*parse_cand(line)) == line


def test_parse_cand_errors():
    with pytest.raises(DataError):
        parse_cand("CAND 2 0.0 0.0 0.0 0.0 0.0 a")
    with pytest.raises(DataError):
        parse_cand("CANDY 1 0.0 0.0 0.0 0.0 0.0 a")
    with pytest.raises(DataError):
        parse_cand("CAND x 0.0 0.0 0.0 0.0 0.0 a")


def test_components_sum():
    a = Components(1.0, 2.0, 3.0, 4.0)
    assert a + a == Components(2.0, 4.0, 6.0, 8.0)
    assert a.weighted((1, 0, 0, 1)) == 5.0
    assert math.isclose(a.weighted((0.5,) * 4), 5.0)
