"""Pretty-printer producing re-parsable surface syntax.

Machine-generated binders (names containing ``%``) are renamed to fresh
legal identifiers, so ``parse(pretty(t))`` is alpha-equivalent to ``t``.
"""

from __future__ import annotations

import re

from . import ast as A

# precedence levels of the position a term is printed in
TOP, SUM, PROD, APP, ATOM = range(5)


def pretty_type(ty: A.Type, level: int = 0) -> str:
    match ty:
        case A.Real():
            return "real"
        case A.Prod(()):
            return "unit"
        case A.Prod((item,)):
            return f"({pretty_type(item, 1)} *)"
        case A.Prod(items):
            return "(" + " * ".join(pretty_type(i, 1) for i in items) + ")"
        case A.Fun(dom, cod):
            s = f"{pretty_type(dom, 1)} -> {pretty_type(cod, 0)}"
            return f"({s})" if level > 0 else s
        case A.Variant(cases):
            return "[" + " | ".join(f"{c}: {pretty_type(t)}" for c, t in cases) + "]"
        case A.ListT(elem):
            return f"list {pretty_type(elem, 1)}"
    raise TypeError(f"not a type: {ty!r}")


def pretty(t: A.Term) -> str:
    names = A.all_names(t)
    generated = sorted(n for n in names if A.is_generated(n))
    if generated:
        t = _rename(t, _legal_names(generated, names))
    return _Printer().term(t, TOP)


def _legal_names(generated, taken) -> dict[str, str]:
    used = {n for n in taken if not A.is_generated(n)}
    out = {}
    for g in generated:
        stem = g.rsplit("%", 1)[0] if g.count("%") > 1 else g.split("%", 1)[0]
        stem = re.sub(r"[^A-Za-z0-9_']", "", stem.replace("%", "")) or "v"
        if not (stem[0].isalpha() or stem[0] == "_"):
            stem = "v" + stem
        cand, i = stem, 1
        while cand in used or cand in _RESERVED:
            i += 1
            cand = f"{stem}_{i}"
        used.add(cand)
        out[g] = cand
    return out


def _rename(t: A.Term, m: dict[str, str]) -> A.Term:
    r = lambda n: m.get(n, n)  # noqa: E731
    match t:
        case A.Var(n):
            return A.Var(r(n))
        case A.Const() | A.Nil():
            return t
        case A.Op(name, args):
            return A.Op(name, tuple(_rename(a, m) for a in args))
        case A.Tuple(items):
            return A.Tuple(tuple(_rename(a, m) for a in items))
        case A.TupleMatch(s, ns, b):
            return A.TupleMatch(_rename(s, m), tuple(map(r, ns)), _rename(b, m))
        case A.Lam(n, ty, b):
            return A.Lam(r(n), ty, _rename(b, m))
        case A.App(f, a):
            return A.App(_rename(f, m), _rename(a, m))
        case A.Inj(ty, c, p):
            return A.Inj(ty, c, _rename(p, m))
        case A.Case(s, branches):
            return A.Case(_rename(s, m), tuple((c, r(x), _rename(b, m)) for c, x, b in branches))
        case A.Cons(h, tl):
            return A.Cons(_rename(h, m), _rename(tl, m))
        case A.Fold(x1, x2, step, lst, init):
            return A.Fold(r(x1), r(x2), _rename(step, m), _rename(lst, m), _rename(init, m))
    raise TypeError(f"not a term: {t!r}")


_RESERVED = frozenset(
    "fun let in match with case of fold over from nil cons inj real unit list".split()
)


def format_float(x: float) -> str:
    s = repr(float(x))
    if x < 0 or s.startswith("-"):
        return f"({s})"
    return s


class _Printer:
    def term(self, t: A.Term, level: int) -> str:
        match t:
            case A.Var(n):
                return n
            case A.Const(v):
                return format_float(v)
            case A.Op("+", (a, b)):
                return self._wrap(f"{self.term(a, SUM)} + {self.term(b, PROD)}", level > SUM)
            case A.Op("*", (a, b)):
                return self._wrap(f"{self.term(a, PROD)} * {self.term(b, APP)}", level > PROD)
            case A.Op(name, args):
                return f"{name}(" + ", ".join(self.term(a, TOP) for a in args) + ")"
            case A.Tuple(items):
                return "<" + ", ".join(self.term(a, TOP) for a in items) + ">"
            case A.TupleMatch(s, names, body):
                text = (
                    f"match {self.term(s, TOP)} with <{', '.join(names)}> -> "
                    f"{self.term(body, TOP)}"
                )
                return self._wrap(text, level > TOP)
            case A.App(A.Lam(x, ty, body), bound):
                ann = "" if ty is None else f" : {pretty_type(ty, 1)}"
                text = f"let {x}{ann} = {self.term(bound, TOP)} in {self.term(body, TOP)}"
                return self._wrap(text, level > TOP)
            case A.Lam(x, ty, body):
                if ty is None:
                    raise ValueError(f"cannot print unannotated lambda binder {x!r} outside a let")
                text = f"fun {x}: {pretty_type(ty, 1)} -> {self.term(body, TOP)}"
                return self._wrap(text, level > TOP)
            case A.App(f, a):
                return self._wrap(f"{self.term(f, APP)} {self.term(a, ATOM)}", level > APP)
            case A.Inj(ty, c, p):
                return self._wrap(f"inj [{pretty_type(ty)}] {c} {self.term(p, ATOM)}", level > APP)
            case A.Case(s, branches):
                parts = []
                for i, (c, x, b) in enumerate(branches):
                    last = i == len(branches) - 1
                    parts.append(f"{c} {x} -> {self.term(b, TOP if last else SUM)}")
                text = f"case {self.term(s, TOP)} of " + " | ".join(parts)
                return self._wrap(text, level > TOP)
            case A.Nil(None):
                return "nil"
            case A.Nil(elem):
                return f"(nil : list {pretty_type(elem, 1)})"
            case A.Cons(h, tl):
                return f"cons({self.term(h, TOP)}, {self.term(tl, TOP)})"
            case A.Fold(x1, x2, step, lst, init):
                text = (
                    f"fold ({x1}, {x2} -> {self.term(step, TOP)}) over {self.term(lst, SUM)} "
                    f"from {self.term(init, TOP)}"
                )
                return self._wrap(text, level > TOP)
        raise TypeError(f"not a term: {t!r}")

    @staticmethod
    def _wrap(text: str, parens: bool) -> str:
        return f"({text})" if parens else text
