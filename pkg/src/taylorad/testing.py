"""Random generation of well-typed types and terms, for property tests of the
macro and the evaluator.

Generation is type-directed: ``TermGenerator.term(ctx, ty, depth)`` returns a
term of exactly type ``ty`` under ``ctx`` whose nesting depth is at most
``depth`` (when ``ty`` admits such a term at all). A small pool of variable
names is reused on purpose so that shadowing and capture situations come up
often.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

from .syntax import ast as A

NAMES = ("x", "y", "z", "f", "u")
CTORS = ("A", "B", "C")
OPS = (("+", 2), ("*", 2), ("sigmoid", 1))

Ctx = dict[str, A.Type]


def min_depth(ty: A.Type) -> int:
    """Depth of the shallowest closed term of type ``ty``."""
    match ty:
        case A.Real() | A.ListT():
            return 1
        case A.Prod(items):
            return 1 + max((min_depth(t) for t in items), default=0)
        case A.Fun(_, cod):
            return 1 + min_depth(cod)
        case A.Variant(cases):
            return 1 + min(min_depth(t) for _, t in cases)
    raise TypeError(f"not a type: {ty!r}")


def type_formers(ty: A.Type) -> set[str]:
    match ty:
        case A.Real():
            return {"real"}
        case A.Prod(items):
            return {"prod"}.union(*(type_formers(t) for t in items))
        case A.Fun(d, c):
            return {"fun"} | type_formers(d) | type_formers(c)
        case A.Variant(cases):
            return {"variant"}.union(*(type_formers(t) for _, t in cases))
        case A.ListT(e):
            return {"list"} | type_formers(e)
    raise TypeError(f"not a type: {ty!r}")


def term_formers(t: A.Term) -> set[str]:
    """Names of the term constructors occurring in ``t``."""
    out = {type(t).__name__}
    match t:
        case A.Op(_, xs) | A.Tuple(xs):
            for x in xs:
                out |= term_formers(x)
        case A.TupleMatch(a, _, b) | A.App(a, b) | A.Cons(a, b):
            out |= term_formers(a) | term_formers(b)
        case A.Lam(_, _, b) | A.Inj(_, _, b):
            out |= term_formers(b)
        case A.Case(s, branches):
            out |= term_formers(s)
            for _, _, b in branches:
                out |= term_formers(b)
        case A.Fold(_, _, s, l, i):
            out |= term_formers(s) | term_formers(l) | term_formers(i)
    return out


class TermGenerator:
    def __init__(self, seed: int | random.Random = 0, max_type_depth: int = 2):
        self.rng = seed if isinstance(seed, random.Random) else random.Random(seed)
        self.max_type_depth = max_type_depth

    # -- types ------------------------------------------------------------

    def type(self, depth: Optional[int] = None) -> A.Type:
        depth = self.max_type_depth if depth is None else depth
        r = self.rng.random()
        if depth <= 0 or r < 0.35:
            return A.REAL if self.rng.random() < 0.9 else A.UNIT
        if r < 0.55:
            return A.Prod(tuple(self.type(depth - 1) for _ in range(self.rng.randint(0, 3))))
        if r < 0.7:
            return A.Fun(self.type(depth - 1), self.type(depth - 1))
        if r < 0.85:
            ctors = self.rng.sample(CTORS, self.rng.randint(1, 3))
            return A.Variant(tuple((c, self.type(depth - 1)) for c in sorted(ctors)))
        return A.ListT(self.type(depth - 1))

    def context(self, size: Optional[int] = None) -> Ctx:
        size = self.rng.randint(0, 3) if size is None else size
        return {x: self.type() for x in self.rng.sample(NAMES, size)}

    # -- terms ------------------------------------------------------------

    def term(self, ctx: Ctx, ty: A.Type, depth: int) -> A.Term:
        rng = self.rng
        vars_ = [x for x, t in ctx.items() if t == ty]
        if vars_ and (depth <= min_depth(ty) or rng.random() < 0.2):
            return A.Var(rng.choice(vars_))
        if depth >= 3 and rng.random() < 0.45:
            elim = self._elim(ctx, ty, depth)
            if elim is not None:
                return elim
        return self._intro(ctx, ty, depth)

    def _intro(self, ctx: Ctx, ty: A.Type, depth: int) -> A.Term:
        rng = self.rng
        sub = depth - 1
        match ty:
            case A.Real():
                if sub >= 1 and rng.random() < 0.6:
                    name, arity = rng.choice(OPS)
                    return A.Op(name, tuple(self.term(ctx, A.REAL, sub) for _ in range(arity)))
                return A.Const(float(rng.choice([-2.0, -1.0, -0.5, 0.0, 0.25, 1.0, 1.5, 3.0])))
            case A.Prod(items):
                return A.Tuple(tuple(self.term(ctx, t, sub) for t in items))
            case A.Fun(dom, cod):
                x = rng.choice(NAMES)
                return A.Lam(x, dom, self.term({**ctx, x: dom}, cod, sub))
            case A.Variant(cases):
                ok = [(c, t) for c, t in cases if min_depth(t) <= sub] or [
                    min(cases, key=lambda ct: min_depth(ct[1]))
                ]
                c, t = rng.choice(ok)
                return A.Inj(ty, c, self.term(ctx, t, sub))
            case A.ListT(elem):
                if sub >= 1 and min_depth(elem) <= sub and rng.random() < 0.6:
                    head = self.term(ctx, elem, sub)
                    if rng.random() < 0.4:
                        return A.Cons(head, A.Nil())
                    return A.Cons(head, self.term(ctx, ty, sub))
                return A.Nil(elem)
        raise TypeError(f"not a type: {ty!r}")

    def _elim(self, ctx: Ctx, ty: A.Type, depth: int) -> Optional[A.Term]:
        rng = self.rng
        sub = depth - 1
        kind = rng.choice(("let", "app", "match", "case", "fold"))
        if kind == "let":
            sigma = self.type(1)
            x = rng.choice(NAMES)
            bound = self.term(ctx, sigma, sub)
            return A.let(x, bound, self.term({**ctx, x: sigma}, ty, sub))
        if kind == "app":
            sigma = self.type(1)
            if 1 + min_depth(ty) > sub:
                return None
            return A.App(self.term(ctx, A.Fun(sigma, ty), sub), self.term(ctx, sigma, sub))
        if kind == "match":
            n = rng.randint(1, 3)
            sigma = A.Prod(tuple(self.type(1) for _ in range(n)))
            names = tuple(rng.sample(NAMES, n))
            body = self.term({**ctx, **dict(zip(names, sigma.items))}, ty, sub)
            return A.TupleMatch(self.term(ctx, sigma, sub), names, body)
        if kind == "case":
            ctors = sorted(rng.sample(CTORS, rng.randint(1, 3)))
            sigma = A.Variant(tuple((c, self.type(1)) for c in ctors))
            branches = []
            for c, t in sigma.cases:
                x = rng.choice(NAMES)
                branches.append((c, x, self.term({**ctx, x: t}, ty, sub)))
            rng.shuffle(branches)
            return A.Case(self.term(ctx, sigma, sub), tuple(branches))
        elem = self.type(1)
        x1, x2 = rng.sample(NAMES, 2)
        step = self.term({**ctx, x1: elem, x2: ty}, ty, sub)
        return A.Fold(x1, x2, step, self.term(ctx, A.ListT(elem), sub), self.term(ctx, ty, sub))

    # -- samples ----------------------------------------------------------

    def typed_term(self, max_depth: int = 6, tries: int = 100) -> tuple[Ctx, A.Term, A.Type]:
        """A random context, type and term of that type of depth <= max_depth."""
        for _ in range(tries):
            ctx = self.context()
            ty = self.type()
            t = self.term(ctx, ty, self.rng.randint(3, max_depth))
            if A.term_depth(t) <= max_depth:
                return ctx, t, ty
        raise RuntimeError("could not generate a term within the depth bound")

    def substitution_triple(self, max_depth: int = 6):
        """(ctx, x, sigma, t, u, ty) with ctx, x:sigma |- t : ty and ctx |- u : sigma."""
        for _ in range(1000):
            x = self.rng.choice(NAMES)
            ctx = {k: v for k, v in self.context().items() if k != x}
            sigma = self.type()
            ty = self.type()
            t = self.term({**ctx, x: sigma}, ty, self.rng.randint(2, max_depth))
            u = self.term(ctx, sigma, self.rng.randint(1, max_depth - 2))
            if x not in A.free_vars(t):
                continue
            if A.term_depth(t) <= max_depth and A.term_depth(u) <= max_depth:
                return ctx, x, sigma, t, u, ty
        raise RuntimeError("could not generate a term within the depth bound")


# --------------------------------------------------------------------------
# Instances of the beta/eta laws at ground type


@dataclass(frozen=True)
class LawInstance:
    law: str
    lhs: A.Term
    rhs: A.Term


LAWS = ("tuple-beta", "case-beta", "fold-nil", "fold-cons", "fun-beta")


def law_instance(gen: TermGenerator, law: str, depth: int = 4) -> LawInstance:
    """Closed terms lhs, rhs of type real related by one beta law."""
    rng = gen.rng
    term = gen.term
    if law == "tuple-beta":
        n = rng.randint(1, 3)
        tys = [gen.type(1) for _ in range(n)]
        names = tuple(rng.sample(NAMES, n))
        parts = [term({}, t, depth) for t in tys]
        body = term(dict(zip(names, tys)), A.REAL, depth)
        return LawInstance(law, A.TupleMatch(A.Tuple(tuple(parts)), names, body),
                           A.substitute_many(body, dict(zip(names, parts))))
    if law == "case-beta":
        ctors = sorted(rng.sample(CTORS, rng.randint(1, 3)))
        v = A.Variant(tuple((c, gen.type(1)) for c in ctors))
        branches = []
        for c, t in v.cases:
            x = rng.choice(NAMES)
            branches.append((c, x, term({x: t}, A.REAL, depth)))
        c, x, body = rng.choice(branches)
        payload = term({}, v.ctor_type(c), depth)
        return LawInstance(law, A.Case(A.Inj(v, c, payload), tuple(branches)),
                           A.substitute(body, x, payload))
    if law in ("fold-nil", "fold-cons"):
        elem = gen.type(1)
        x1, x2 = rng.sample(NAMES, 2)
        step = term({x1: elem, x2: A.REAL}, A.REAL, depth)
        init = term({}, A.REAL, depth)
        if law == "fold-nil":
            return LawInstance(law, A.Fold(x1, x2, step, A.Nil(elem), init), init)
        head = term({}, elem, depth)
        tail = term({}, A.ListT(elem), depth)
        rest = A.Fold(x1, x2, step, tail, init)
        return LawInstance(law, A.Fold(x1, x2, step, A.Cons(head, tail), init),
                           A.substitute_many(step, {x1: head, x2: rest}))
    if law == "fun-beta":
        sigma = gen.type(1)
        x = rng.choice(NAMES)
        body = term({x: sigma}, A.REAL, depth)
        arg = term({}, sigma, depth)
        return LawInstance(law, A.App(A.Lam(x, sigma, body), arg), A.substitute(body, x, arg))
    raise ValueError(f"unknown law {law!r}")


def eta_instance(gen: TermGenerator, depth: int = 4) -> tuple[A.Term, A.Term]:
    """A closed f : real -> real and its eta-expansion."""
    f = gen.term({}, A.Fun(A.REAL, A.REAL), depth)
    z = A.fresh("eta")
    return f, A.Lam(z, A.REAL, A.App(f, A.Var(z)))


def same_float(a: float, b: float) -> bool:
    """Bitwise agreement, treating every NaN as equal."""
    if math.isnan(a) and math.isnan(b):
        return True
    return a == b and math.copysign(1.0, a) == math.copysign(1.0, b)

