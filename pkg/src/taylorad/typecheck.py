"""Type synthesis for the object language.

Lambdas and injections carry their types, so synthesis is enough except for
``nil``: an unannotated ``nil`` is accepted only where a list type is already
known (the tail of a ``cons``, a function argument, a tuple component checked
against a product, and so on).
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Union

from .syntax import ast as A
from .syntax.printer import pretty_type

KINDS = (
    "unbound-variable",
    "arity-mismatch",
    "type-mismatch",
    "non-function-application",
    "bad-constructor",
    "branch-type-disagreement",
    "unknown-operation",
    "missing-annotation",
)

Context = Union[Mapping[str, A.Type], Iterable[tuple[str, A.Type]]]


class TypeCheckError(Exception):
    def __init__(
        self,
        kind: str,
        path: tuple[str, ...],
        message: str,
        expected: Optional[A.Type] = None,
        actual: Optional[A.Type] = None,
    ):
        where = "/".join(path) or "<root>"
        super().__init__(f"{kind} at {where}: {message}")
        self.kind = kind
        self.path = path
        self.message = message
        self.expected = expected
        self.actual = actual


def _env(ctx: Context) -> dict[str, A.Type]:
    if isinstance(ctx, Mapping):
        return dict(ctx)
    return dict(ctx)


def infer(ctx: Context, t: A.Term, registry=None) -> A.Type:
    """The type of ``t`` under ``ctx``, or raise TypeCheckError."""
    if registry is None:
        from .primops import builtin_registry

        registry = builtin_registry()
    return _Checker(registry).infer(_env(ctx), t, ())


def check_program(ctx: Context, t: A.Term, expected: A.Type, registry=None) -> None:
    if registry is None:
        from .primops import builtin_registry

        registry = builtin_registry()
    _Checker(registry).check(_env(ctx), t, expected, ())


class _Checker:
    def __init__(self, registry):
        self.registry = registry

    def fail(self, kind, path, message, expected=None, actual=None):
        raise TypeCheckError(kind, path, message, expected, actual)

    def mismatch(self, path, expected, actual):
        self.fail(
            "type-mismatch",
            path,
            f"expected {pretty_type(expected)}, got {pretty_type(actual)}",
            expected,
            actual,
        )

    def check(self, env, t, expected, path):
        match t:
            case A.Nil(None):
                if not isinstance(expected, A.ListT):
                    self.fail("type-mismatch", path, f"nil cannot have type {pretty_type(expected)}",
                              expected)
                return
            case A.Tuple(items) if isinstance(expected, A.Prod):
                if len(items) != len(expected.items):
                    self.fail("arity-mismatch", path,
                              f"tuple of {len(items)} checked against {pretty_type(expected)}",
                              expected)
                for i, (item, ty) in enumerate(zip(items, expected.items)):
                    self.check(env, item, ty, path + (f"items[{i}]",))
                return
            case A.Cons(h, tl) if isinstance(expected, A.ListT):
                self.check(env, h, expected.elem, path + ("head",))
                self.check(env, tl, expected, path + ("tail",))
                return
            case A.TupleMatch(s, names, body):
                env2 = self._match_env(env, s, names, path)
                self.check(env2, body, expected, path + ("body",))
                return
            case A.App(A.Lam(x, None, body), bound):
                ty = self.infer(env, bound, path + ("bound",))
                self.check({**env, x: ty}, body, expected, path + ("body",))
                return
            case A.Case(s, branches):
                for x, body, ty, p in self._branches(env, s, branches, path):
                    self.check({**env, x: ty}, body, expected, p)
                return
        actual = self.infer(env, t, path)
        if actual != expected:
            self.mismatch(path, expected, actual)

    def infer(self, env, t, path) -> A.Type:
        match t:
            case A.Var(name):
                try:
                    return env[name]
                except KeyError:
                    self.fail("unbound-variable", path, f"unbound variable {name!r}")
            case A.Const():
                return A.REAL
            case A.Op(name, args):
                if name not in self.registry:
                    self.fail("unknown-operation", path, f"unknown operation {name!r}")
                arity = self.registry[name].arity
                if len(args) != arity:
                    self.fail("arity-mismatch", path,
                              f"{name!r} takes {arity} argument(s), got {len(args)}")
                for i, a in enumerate(args):
                    self.check(env, a, A.REAL, path + (f"args[{i}]",))
                return A.REAL
            case A.Tuple(items):
                return A.Prod(
                    tuple(self.infer(env, a, path + (f"items[{i}]",)) for i, a in enumerate(items))
                )
            case A.TupleMatch(s, names, body):
                env2 = self._match_env(env, s, names, path)
                return self.infer(env2, body, path + ("body",))
            case A.Lam(x, None, _):
                self.fail("missing-annotation", path, f"binder {x!r} needs a type annotation")
            case A.Lam(x, ty, body):
                return A.Fun(ty, self.infer({**env, x: ty}, body, path + ("body",)))
            case A.App(A.Lam(x, None, body), bound):
                ty = self.infer(env, bound, path + ("bound",))
                return self.infer({**env, x: ty}, body, path + ("body",))
            case A.App(f, a):
                fty = self.infer(env, f, path + ("fn",))
                if not isinstance(fty, A.Fun):
                    self.fail("non-function-application", path,
                              f"applying a term of type {pretty_type(fty)}", actual=fty)
                self.check(env, a, fty.dom, path + ("arg",))
                return fty.cod
            case A.Inj(ty, c, p):
                payload_ty = ty.ctor_type(c)
                if payload_ty is None:
                    self.fail("bad-constructor", path, f"{c!r} is not a constructor of "
                              f"{pretty_type(ty)}", expected=ty)
                self.check(env, p, payload_ty, path + ("payload",))
                return ty
            case A.Case(s, branches):
                result = None
                for x, body, ty, p in self._branches(env, s, branches, path):
                    if result is None:
                        result = self.infer({**env, x: ty}, body, p)
                        continue
                    try:
                        self.check({**env, x: ty}, body, result, p)
                    except TypeCheckError as exc:
                        if exc.kind != "type-mismatch" or exc.path != p:
                            raise
                        self.fail("branch-type-disagreement", p,
                                  f"branch has type {pretty_type(exc.actual)}, earlier branches "
                                  f"have {pretty_type(result)}", result, exc.actual)
                return result
            case A.Nil(None):
                self.fail("missing-annotation", path,
                          "cannot infer the type of nil here; write (nil : list T)")
            case A.Nil(elem):
                return A.ListT(elem)
            case A.Cons(h, tl):
                hty = self.infer(env, h, path + ("head",))
                self.check(env, tl, A.ListT(hty), path + ("tail",))
                return A.ListT(hty)
            case A.Fold(x1, x2, step, lst, init):
                lty = self.infer(env, lst, path + ("list",))
                if not isinstance(lty, A.ListT):
                    self.fail("type-mismatch", path + ("list",),
                              f"fold over a non-list of type {pretty_type(lty)}", actual=lty)
                sigma = self.infer(env, init, path + ("init",))
                self.check({**env, x1: lty.elem, x2: sigma}, step, sigma, path + ("step",))
                return sigma
        raise TypeError(f"not a term: {t!r}")

    def _match_env(self, env, s, names, path):
        sty = self.infer(env, s, path + ("scrutinee",))
        if not isinstance(sty, A.Prod):
            self.fail("type-mismatch", path + ("scrutinee",),
                      f"matching a tuple pattern against {pretty_type(sty)}", actual=sty)
        if len(sty.items) != len(names):
            self.fail("arity-mismatch", path,
                      f"pattern binds {len(names)} names but the tuple has {len(sty.items)} "
                      "components", actual=sty)
        return {**env, **dict(zip(names, sty.items))}

    def _branches(self, env, s, branches, path):
        sty = self.infer(env, s, path + ("scrutinee",))
        if not isinstance(sty, A.Variant):
            self.fail("type-mismatch", path + ("scrutinee",),
                      f"case analysis on non-variant type {pretty_type(sty)}", actual=sty)
        ctors = [c for c, _, _ in branches]
        if sorted(ctors) != sorted(c for c, _ in sty.cases):
            self.fail("bad-constructor", path,
                      f"branches {ctors} do not match the constructors of {pretty_type(sty)}",
                      expected=sty)
        for c, x, body in branches:
            yield x, body, sty.ctor_type(c), path + (f"branches[{c}]",)
