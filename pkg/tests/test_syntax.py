from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from taylorad.corpus import CORPUS_NAMES, program_source
from taylorad.syntax import ast as A
from taylorad.syntax import ParseError, parse, parse_type, pretty, pretty_type
from taylorad.testing import TermGenerator

R = A.REAL


class TestParse:
    def test_precedence(self):
        assert parse("x + y * z") == A.Op("+", (A.Var("x"), A.Op("*", (A.Var("y"), A.Var("z")))))

    def test_subtraction_desugars(self):
        assert parse("x - y") == A.Op("+", (A.Var("x"), A.Op("*", (A.Const(-1.0), A.Var("y")))))

    def test_negative_literal(self):
        assert parse("-2.5") == A.Const(-2.5)

    def test_application_left_assoc(self):
        assert parse("f x y") == A.App(A.App(A.Var("f"), A.Var("x")), A.Var("y"))

    def test_op_call(self):
        assert parse("sigmoid(x)") == A.Op("sigmoid", (A.Var("x"),))

    def test_let_is_applied_lambda(self):
        t = parse("let y = x in y")
        assert t == A.App(A.Lam("y", None, A.Var("y")), A.Var("x"))

    def test_pattern_lambda(self):
        t = parse("fun <a, b> : (real * real) -> a")
        assert isinstance(t, A.Lam) and t.ty == A.Prod((R, R))
        assert isinstance(t.body, A.TupleMatch) and t.body.names == ("a", "b")

    def test_fold(self):
        t = parse("fold (a, acc -> a + acc) over cons(1, cons(2, nil)) from 0")
        assert isinstance(t, A.Fold) and (t.elem, t.acc) == ("a", "acc")
        assert t.lst == A.Cons(A.Const(1.0), A.Cons(A.Const(2.0), A.Nil()))

    def test_annotated_nil(self):
        assert parse("(nil : list real)") == A.Nil(R)

    def test_inj_and_case(self):
        t = parse("case inj [[N : unit | J : real]] J 1.0 of N u -> 0 | J v -> v")
        assert isinstance(t, A.Case) and [c for c, _, _ in t.branches] == ["N", "J"]

    def test_comments(self):
        assert parse("-- a comment\nx -- another\n") == A.Var("x")

    @pytest.mark.parametrize(
        "src, line, col",
        [("x +", 1, 4), ("fun x -> x", 1, 7), ("let = 1 in x", 1, 5), ("foo(1, 2)", 1, 1)],
    )
    def test_errors_carry_position(self, src, line, col):
        with pytest.raises(ParseError) as info:
            parse(src)
        assert (info.value.line, info.value.col) == (line, col)

    def test_unknown_constructor(self):
        with pytest.raises(ParseError, match="constructor"):
            parse("inj [[A : real]] B 1.0")

    def test_op_arity(self):
        with pytest.raises(ParseError, match="argument"):
            parse("sigmoid(x, y)")

    def test_types(self):
        assert parse_type("real -> real -> real") == A.Fun(R, A.Fun(R, R))
        assert parse_type("(real *)") == A.Prod((R,))
        assert parse_type("unit") == A.UNIT
        assert parse_type("list (real * real)") == A.ListT(A.Prod((R, R)))
        assert parse_type("[A : real | B : unit]").ctor_type("B") == A.UNIT


class TestPretty:
    @pytest.mark.parametrize("ty", ["real -> real -> real", "(real -> real) -> real",
                                    "(real *)", "list [A : real | B : (real * unit)]"])
    def test_type_roundtrip(self, ty):
        assert parse_type(pretty_type(parse_type(ty))) == parse_type(ty)

    @pytest.mark.parametrize("name", CORPUS_NAMES)
    def test_corpus_roundtrip(self, name):
        t = parse(program_source(name))
        assert A.alpha_eq(parse(pretty(t)), t)

    def test_generated_names_become_legal(self):
        t = A.Lam(A.fresh("x%"), R, A.Var("y"))
        out = pretty(t)
        assert "%" not in out and A.alpha_eq(parse(out), t)

    def test_negative_constant_parenthesised(self):
        assert pretty(A.App(A.Var("f"), A.Const(-1.0))) == "f (-1.0)"

    @given(st.integers(0, 2**32))
    def test_random_roundtrip(self, seed):
        ctx, t, _ = TermGenerator(seed).typed_term()
        assert A.alpha_eq(parse(pretty(t)), t)


class TestSubstitution:
    def test_capture_avoided(self):
        # (fun y. x + y)[y/x] must not capture the free y
        t = A.Lam("y", R, A.Op("+", (A.Var("x"), A.Var("y"))))
        out = A.substitute(t, "x", A.Var("y"))
        assert out.name != "y"
        assert A.free_vars(out) == {"y"}

    def test_shadowing_stops_substitution(self):
        t = A.Lam("x", R, A.Var("x"))
        assert A.substitute(t, "x", A.Const(1.0)) == t

    def test_simultaneous(self):
        t = A.Tuple((A.Var("x"), A.Var("y")))
        out = A.substitute_many(t, {"x": A.Var("y"), "y": A.Var("x")})
        assert out == A.Tuple((A.Var("y"), A.Var("x")))

    def test_fold_binders(self):
        t = A.Fold("a", "b", A.Var("x"), A.Nil(R), A.Var("a"))
        out = A.substitute(t, "a", A.Const(2.0))
        assert out.init == A.Const(2.0) and out.step == A.Var("x")

    def test_alpha_eq(self):
        assert A.alpha_eq(parse("fun x : real -> x"), parse("fun y : real -> y"))
        assert not A.alpha_eq(parse("fun x : real -> y"), parse("fun y : real -> y"))
        assert not A.alpha_eq(parse("fun x : real -> x"), parse("fun x : unit -> x"))

    @given(st.integers(0, 2**32))
    def test_substitution_preserves_types(self, seed):
        from taylorad.typecheck import infer

        ctx, x, sigma, t, u, ty = TermGenerator(seed).substitution_triple()
        assert infer(ctx, A.substitute(t, x, u)) == ty
        assert x not in A.free_vars(A.substitute(t, x, u)) or x in A.free_vars(u)
