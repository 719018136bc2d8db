from __future__ import annotations

import pytest

from taylorad.corpus import load_case
from taylorad.syntax import ast as A
from taylorad.syntax import parse, parse_type
from taylorad.typecheck import TypeCheckError, check_program, infer

R = A.REAL
XY = {"x": R, "y": R}


@pytest.mark.parametrize(
    "src, ty",
    [
        ("x * y", "real"),
        ("fun z : real -> sigmoid(z)", "real -> real"),
        ("<x, <y, x>>", "(real * (real * real))"),
        ("match <x, y> with <a, b> -> a + b", "real"),
        ("fold (a, acc -> a + acc) over cons(x, cons(y, nil)) from 0", "real"),
        ("case inj [[N : unit | J : real]] J x of N u -> y | J v -> v", "real"),
        ("let f = fun z : real -> z * z in f (f x)", "real"),
        ("(nil : list (real * real))", "list (real * real)"),
        ("<>", "unit"),
    ],
)
def test_infer(src, ty):
    assert infer(XY, parse(src)) == parse_type(ty)


def test_network_type():
    p = "((real * real) * real)"
    p1 = f"({p} * {p})"
    expected = parse_type(f"((real * real) * ({p1} * ({p1} * {p}))) -> real")
    assert load_case("network").type == expected


def test_nil_checked_against_known_list_type():
    t = parse("fun l : list real -> l")
    check_program({}, A.App(t, A.Nil()), A.ListT(R))


@pytest.mark.parametrize(
    "src, kind, path",
    [
        ("z", "unbound-variable", ()),
        ("x y", "non-function-application", ()),
        ("sigmoid(<x, y>)", "type-mismatch", ("args[0]",)),
        ("match <x, y> with <a, b, c> -> a", "arity-mismatch", ()),
        ("case inj [[N : unit | J : real]] J x of J v -> v", "bad-constructor", ()),
        ("case inj [[N : unit | J : real]] J x of N u -> u | J v -> v",
         "branch-type-disagreement", ("branches[J]",)),
        ("nil", "missing-annotation", ()),
        ("fold (a, acc -> a) over x from 0", "type-mismatch", ("list",)),
    ],
)
def test_errors(src, kind, path):
    with pytest.raises(TypeCheckError) as info:
        infer(XY, parse(src))
    assert info.value.kind == kind
    assert info.value.path == path


def test_unknown_operation_in_ast():
    with pytest.raises(TypeCheckError) as info:
        infer(XY, A.Op("tanh", (A.Var("x"),)))
    assert info.value.kind == "unknown-operation"


def test_arity_mismatch_in_ast():
    with pytest.raises(TypeCheckError) as info:
        infer(XY, A.Op("sigmoid", (A.Var("x"), A.Var("y"))))
    assert info.value.kind == "arity-mismatch"


def test_mismatch_reports_types():
    with pytest.raises(TypeCheckError) as info:
        check_program(XY, parse("<x, y>"), R)
    assert info.value.expected == R
    assert info.value.actual == A.Prod((R, R))
