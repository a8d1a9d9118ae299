import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dscompress.chooser import SelectionPolicy
from dscompress.errors import DataError
from dscompress.evaluation import (EvalRecord, SuiteConfig, compression_rate,
                                   concat_compress, format_ratio, format_records,
                                   format_report, random_baseline, run_suite, summarize)
from dscompress.pipeline import ModelSet
from dscompress.synth import random_dstree, random_models, with_sentence_table
from dscompress.tree import yield_words


@pytest.mark.parametrize("num,den,text", [
    (22, 41, "0.54"), (41, 41, "1.00"), (1, 8, "0.13"), (1, 200, "0.01"),
    (1, 3, "0.33"), (2, 3, "0.67"), (5, 8, "0.63"), (3, 8, "0.38"), (1, 400, "0.00"),
])
def test_cmp_hand_counted(num, den, text):
    assert format_ratio(compression_rate(["w"] * den, ["w"] * num)) == text


def test_half_up_is_exact():
    # 0.125 and 0.135 are not representable; the exact value decides
    assert format_ratio(Fraction(1, 8)) == "0.13"
    assert format_ratio(Fraction(27, 200)) == "0.14"
    assert format_ratio(Fraction(-1, 8)) == "-0.13"
    assert format_ratio(Fraction(1, 3), 4) == "0.3333"


def test_empty_original():
    with pytest.raises(DataError):
        compression_rate([], [])


def test_random_baseline_properties():
    doc = [f"w{i}" for i in range(100)]
    assert random_baseline(doc, 0.5, seed=3) == random_baseline(doc, 0.5, seed=3)
    out = random_baseline(doc, 0.5, seed=3)
    it = iter(doc)
    assert all(w in it for w in out)
    # a p close to 1 on a single word forces redraws but still keeps it
    assert random_baseline(["x"], 0.99, seed=0) == ["x"]
    assert random_baseline([], 0.5) == []
    with pytest.raises(ValueError):
        random_baseline(doc, 1.0)


def test_random_baseline_rate():
    doc = [f"w{i}" for i in range(100)]
    rates = [len(random_baseline(doc, 0.5, seed=s)) / 100 for s in range(1000)]
    assert 0.45 <= float(np.mean(rates)) <= 0.55


@given(st.integers(1, 60), st.floats(0.05, 0.95), st.integers(0, 2 ** 32))
def test_random_baseline_never_empty(n, p, seed):
    out = random_baseline(list(range(n)), p, seed)
    assert 1 <= len(out) <= n


def test_identity_compression_is_one(fig1):
    models = ModelSet.identity([yield_words(fig1)])
    records, summaries = run_suite([fig1], models, SuiteConfig(("edu", "sent", "concat")))
    assert all(r.cmp == 1 for r in records)
    assert all(format_ratio(s.cmp) == "1.00" for s in summaries)


def _corpus(seed, n=6):
    rng = random.Random(seed)
    trees = [with_sentence_table(rng, random_dstree(rng, doc_id=f"d{i}")) for i in range(n)]
    return trees, random_models(rng, trees)


def test_suite_and_report():
    trees, models = _corpus(1)
    records, summaries = run_suite(trees, models, SuiteConfig(seed=5))
    assert len(records) == 4 * len(trees)
    for r in records:
        assert r.error is None
        assert 0 < r.cmp <= 1
        assert r.cmp == Fraction(r.compressed_length, r.original_length)
    assert [s.system for s in summaries] == ["Random", "Concat", "EDU", "Sent"]
    report = format_report(summaries)
    assert report.splitlines()[0] == "system\tCmp\tdocs\tmean_len_in\tmean_len_out"
    assert len(report.splitlines()) == 5
    assert format_records(records).count("\n") == len(records) + 1
    # same inputs, same output
    again = run_suite(trees, models, SuiteConfig(seed=5))
    assert again == (records, summaries)


def test_parallel_matches_serial():
    trees, models = _corpus(2, n=4)
    serial = run_suite(trees, models, SuiteConfig(seed=9))
    parallel = run_suite(trees, models, SuiteConfig(seed=9, jobs=2))
    assert serial == parallel


def test_concat_matches_per_sentence(fig1, fig1_models):
    out = concat_compress(fig1, fig1_models, SelectionPolicy())
    assert 0 < len(out) <= len(yield_words(fig1))


def test_failed_document_is_recorded(fig1, fig1_models):
    # a sentence parse that disagrees with the EDU words breaks Sent mode only
    from dscompress.tree import DSTree, parse_syntax
    bad = DSTree(fig1.root, "bad", ((0, fig1.sentences[0][1]),
                                    (1, parse_syntax("(S (NN oops))")),
                                    fig1.sentences[2]))
    records, summaries = run_suite([bad, fig1], fig1_models, SuiteConfig(("edu", "sent")))
    sent_bad = [r for r in records if r.doc_id == "bad" and r.system_name == "Sent"]
    assert sent_bad and sent_bad[0].error
    by_name = {s.system: s for s in summaries}
    assert by_name["Sent"].failures == 1 and by_name["Sent"].docs == 1
    assert by_name["EDU"].docs == 2


def test_summarize_means():
    recs = [EvalRecord("a", "EDU", 10, 5, Fraction(1, 2), "x"),
            EvalRecord("b", "EDU", 20, 5, Fraction(1, 4), "y")]
    [s] = summarize(recs, ("edu",))
    assert s.cmp == Fraction(3, 8)
    assert s.mean_len_in == 15 and s.mean_len_out == 5


def test_bad_suite_inputs(fig1, fig1_models):
    with pytest.raises(DataError):
        run_suite([], fig1_models)
    with pytest.raises(ValueError):
        run_suite([fig1], fig1_models, SuiteConfig(("oracle",)))
