from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from taylorad.evaluator import (
    Closure,
    ListVal,
    VariantVal,
    eval_jet_program,
    evaluate,
    type_of_json,
    value_from_json,
    value_to_json,
)
from taylorad.jetalgebra import JetShape, JetVector
from taylorad.macro import MacroConfig
from taylorad.syntax import ast as A
from taylorad.syntax import parse
from taylorad.testing import LAWS, TermGenerator, law_instance, same_float
from taylorad.typecheck import infer

R = A.REAL


@pytest.mark.parametrize(
    "src, value",
    [
        ("sigmoid(0)", 0.5),
        ("fold (a, acc -> a + acc) over cons(1, cons(2, nil)) from 0", 3.0),
        ("match <<1, 2>, <3, 4>> with <t, u> -> match t with <z1, z2> -> "
         "match u with <y1, y2> -> z1 * y1 + z2 * y2", 11.0),
        ("fold (a, acc -> a + 10 * acc) over cons(1, cons(2, cons(3, nil))) from 0", 321.0),
        ("case inj [[N : unit | J : real]] N <> of N u -> 7 | J v -> v", 7.0),
        ("let f = fun x : real -> x * x in f 3", 9.0),
    ],
)
def test_eval(src, value):
    assert evaluate({}, parse(src)) == value


def test_closures_capture_environment():
    t = parse("let y = 2 in let f = fun x : real -> x * y in let y = 5 in f 3")
    assert evaluate({}, t) == 6.0
    assert isinstance(evaluate({}, parse("fun x : real -> x")), Closure)


@pytest.mark.parametrize(
    "src, seeds, jet",
    [
        ("x1 * x2", [(3.0, 1.0), (5.0, 0.0)], (15.0, 5.0)),
        ("sigmoid(x1)", [(0.0, 1.0)], (0.5, 0.25)),
    ],
)
def test_jet_examples(src, seeds, jet):
    cfg = MacroConfig(1, 1)
    ctx = [(f"x{i + 1}", R) for i in range(len(seeds))]
    out = eval_jet_program(cfg, parse(src), ctx, [JetVector(cfg.shape, s) for s in seeds])
    assert out.coeffs == jet


@pytest.mark.parametrize("a", [-2.0, 0.5, 3.0])
def test_square_triple(a):
    cfg = MacroConfig(1, 2)
    out = eval_jet_program(cfg, parse("x * x"), [("x", R)], [JetVector(cfg.shape, (a, 1.0, 0.0))])
    assert out.coeffs == (a * a, 2 * a, 2.0)


def test_shape_mismatch():
    with pytest.raises(ValueError, match="shape"):
        eval_jet_program(MacroConfig(1, 2), parse("x"), [("x", R)],
                         [JetVector(JetShape(1, 1), (1.0, 0.0))])
    with pytest.raises(ValueError):
        eval_jet_program(MacroConfig(1, 1), parse("x"), [("x", A.Prod((R,)))],
                         [JetVector(JetShape(1, 1), (1.0, 0.0))])


def test_json_values():
    v = (1.0, ListVal((VariantVal("J", 2.0),)))
    obj = value_to_json(v)
    assert obj == [1.0, {"list": [{"ctor": "J", "value": 2.0}]}]
    assert value_from_json(obj) == v
    assert type_of_json([1, [2, 3]]) == A.Prod((R, A.Prod((R, R))))
    with pytest.raises(ValueError):
        value_from_json(True)


def test_deep_fold_does_not_overflow():
    lst = A.Nil(R)
    for i in range(3000):
        lst = A.Cons(A.Const(1.0), lst)
    assert evaluate({}, A.Fold("a", "b", parse("a + b"), lst, A.Const(0.0))) == 3000.0
    assert math.isfinite(evaluate({}, parse("sigmoid(-1000)")))


@given(st.integers(0, 2**32), st.sampled_from(LAWS))
def test_beta_laws(seed, law):
    inst = law_instance(TermGenerator(seed), law)
    assert infer({}, inst.lhs) == infer({}, inst.rhs) == R
    assert same_float(evaluate({}, inst.lhs), evaluate({}, inst.rhs))


@given(st.integers(0, 2**32))
def test_evaluation_is_deterministic(seed):
    t = TermGenerator(seed).term({}, R, 6)
    assert same_float(evaluate({}, t), evaluate({}, t))
