from __future__ import annotations

import pytest

from taylorad.corpus import corpus, load_case, open_function
from taylorad.evaluator import evaluate
from taylorad.selftest import run_selftest
from taylorad.syntax import ast as A
from taylorad.syntax import parse_type


def test_corpus_shapes():
    sizes = {c.name: c.n_inputs for c in corpus()}
    # network: 2 inputs, two hidden layers of 2 neurons and an output neuron,
    # each neuron with 2 weights and a bias: 2 + 5 * 3
    assert sizes == {"network": 17, "inner_product2": 4, "inner_product3": 6,
                     "sum_squares": 4, "missing_data": 5}


def test_open_function_names_leaves_in_order():
    ctx, t = open_function(A.Var("f"), parse_type("(real * (real * real))"))
    assert [x for x, _ in ctx] == ["a0", "a1", "a2"]
    assert t == A.App(A.Var("f"), A.Tuple((A.Var("a0"), A.Tuple((A.Var("a1"), A.Var("a2"))))))


def test_open_function_rejects_non_real_leaves():
    with pytest.raises(TypeError):
        open_function(A.Var("f"), parse_type("list real"))


def test_values():
    env = lambda case, xs: dict(zip((x for x, _ in case.ctx), xs))
    assert evaluate(env(load_case("inner_product3"), [1, 2, 3, 4, 5, 6]),
                    load_case("inner_product3").program) == 32.0
    assert evaluate(env(load_case("sum_squares"), [1, 2, 3, 4]),
                    load_case("sum_squares").program) == 30.0


def test_selftest_passes():
    report = run_selftest()
    assert report.passed, [r.to_json() for r in report.results if not r.passed]
    assert {r.check for r in report.results} == {
        "macro-vs-fd", "macro-vs-iterated", "restricted22-vs-full", "mixed-partial-recovery"}
    assert report.to_json()["n_failed"] == 0
