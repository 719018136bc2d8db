"""Types and terms of the object language, plus the binding-aware operations
(free variables, capture-avoiding substitution, alpha-equivalence).

All nodes are frozen dataclasses. Binders carry explicit names; names that
contain ``%`` are reserved for machine-generated binders and cannot be
written in surface syntax.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Optional, Union

# --------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Real:
    def __str__(self) -> str:
        from .printer import pretty_type

        return pretty_type(self)


@dataclass(frozen=True)
class Prod:
    items: tuple[Type, ...]

    def __str__(self) -> str:
        from .printer import pretty_type

        return pretty_type(self)


@dataclass(frozen=True)
class Fun:
    dom: Type
    cod: Type

    def __str__(self) -> str:
        from .printer import pretty_type

        return pretty_type(self)


@dataclass(frozen=True)
class Variant:
    cases: tuple[tuple[str, Type], ...]

    def __post_init__(self):
        names = [c for c, _ in self.cases]
        if not names:
            raise ValueError("variant type needs at least one constructor")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate constructor in variant: {names}")

    def ctor_type(self, ctor: str) -> Optional[Type]:
        for c, ty in self.cases:
            if c == ctor:
                return ty
        return None

    def __str__(self) -> str:
        from .printer import pretty_type

        return pretty_type(self)


@dataclass(frozen=True)
class ListT:
    elem: Type

    def __str__(self) -> str:
        from .printer import pretty_type

        return pretty_type(self)


Type = Union[Real, Prod, Fun, Variant, ListT]

REAL = Real()
UNIT = Prod(())


def real_power(n: int) -> Prod:
    return Prod((REAL,) * n)


# --------------------------------------------------------------------------
# Terms


class _Term:
    __slots__ = ()

    def __str__(self) -> str:
        from .printer import pretty

        return pretty(self)


@dataclass(frozen=True, repr=False)
class Var(_Term):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class Const(_Term):
    """A real literal; semantically a 0-ary operation."""

    value: float

    def __repr__(self):
        return f"Const({self.value!r})"


@dataclass(frozen=True, repr=False)
class Op(_Term):
    name: str
    args: tuple[Term, ...]

    def __repr__(self):
        return f"Op({self.name!r}, {list(self.args)!r})"


@dataclass(frozen=True, repr=False)
class Tuple(_Term):
    items: tuple[Term, ...]

    def __repr__(self):
        return f"Tuple({list(self.items)!r})"


@dataclass(frozen=True, repr=False)
class TupleMatch(_Term):
    scrutinee: Term
    names: tuple[str, ...]
    body: Term

    def __repr__(self):
        return f"TupleMatch({self.scrutinee!r}, {self.names!r}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class Lam(_Term):
    """``fun name: ty -> body``.

    ``ty`` is None only for the binder of a desugared ``let`` (the type is
    then taken from the bound term).
    """

    name: str
    ty: Optional[Type]
    body: Term

    def __repr__(self):
        return f"Lam({self.name!r}, {self.ty!r}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class App(_Term):
    fn: Term
    arg: Term

    def __repr__(self):
        return f"App({self.fn!r}, {self.arg!r})"


@dataclass(frozen=True, repr=False)
class Inj(_Term):
    ty: Variant
    ctor: str
    payload: Term

    def __repr__(self):
        return f"Inj({self.ty!r}, {self.ctor!r}, {self.payload!r})"


@dataclass(frozen=True, repr=False)
class Case(_Term):
    scrutinee: Term
    branches: tuple[tuple[str, str, Term], ...]

    def __repr__(self):
        return f"Case({self.scrutinee!r}, {list(self.branches)!r})"


@dataclass(frozen=True, repr=False)
class Nil(_Term):
    """Empty list; ``elem`` is the element type when annotated."""

    elem: Optional[Type] = None

    def __repr__(self):
        return f"Nil({self.elem!r})"


@dataclass(frozen=True, repr=False)
class Cons(_Term):
    head: Term
    tail: Term

    def __repr__(self):
        return f"Cons({self.head!r}, {self.tail!r})"


@dataclass(frozen=True, repr=False)
class Fold(_Term):
    """``fold (elem, acc -> step) over lst from init`` (a right fold)."""

    elem: str
    acc: str
    step: Term
    lst: Term
    init: Term

    def __repr__(self):
        return f"Fold({self.elem!r}, {self.acc!r}, {self.step!r}, {self.lst!r}, {self.init!r})"


Term = Union[Var, Const, Op, Tuple, TupleMatch, Lam, App, Inj, Case, Nil, Cons, Fold]


def let(name: str, bound: Term, body: Term, ty: Optional[Type] = None) -> App:
    return App(Lam(name, ty, body), bound)


def add(*terms: Term) -> Term:
    """Left-nested sum; the empty sum is the literal 0."""
    if not terms:
        return Const(0.0)
    acc = terms[0]
    for t in terms[1:]:
        acc = Op("+", (acc, t))
    return acc


def mul(*terms: Term) -> Term:
    if not terms:
        return Const(1.0)
    acc = terms[0]
    for t in terms[1:]:
        acc = Op("*", (acc, t))
    return acc


# --------------------------------------------------------------------------
# Fresh names

_counter = itertools.count()


def fresh(base: str = "v") -> str:
    """A name in the reserved ``%`` namespace, never produced by the parser."""
    base = base.split("%", 1)[0] or "v"
    return f"{base}%{next(_counter)}"


def fresh_stem(stem: str) -> str:
    """``stem%N``; unlike :func:`fresh` the stem may itself contain ``%``."""
    return f"{stem}%{next(_counter)}"


def is_generated(name: str) -> bool:
    return "%" in name


# --------------------------------------------------------------------------
# Free variables


def free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(name):
            return frozenset((name,))
        case Const() | Nil():
            return frozenset()
        case Op(_, args):
            return frozenset().union(*map(free_vars, args))
        case Tuple(items):
            return frozenset().union(*map(free_vars, items))
        case TupleMatch(s, names, body):
            return free_vars(s) | (free_vars(body) - set(names))
        case Lam(name, _, body):
            return free_vars(body) - {name}
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Inj(_, _, p):
            return free_vars(p)
        case Case(s, branches):
            out = free_vars(s)
            for _, x, body in branches:
                out |= free_vars(body) - {x}
            return out
        case Cons(h, tl):
            return free_vars(h) | free_vars(tl)
        case Fold(x1, x2, step, lst, init):
            return (free_vars(step) - {x1, x2}) | free_vars(lst) | free_vars(init)
    raise TypeError(f"not a term: {t!r}")


def all_names(t: Term) -> set[str]:
    """Every variable name occurring in ``t``, bound or free."""
    out: set[str] = set()

    def go(t):
        match t:
            case Var(name):
                out.add(name)
            case Const() | Nil():
                pass
            case Op(_, args) | Tuple(args):
                for a in args:
                    go(a)
            case TupleMatch(s, names, body):
                out.update(names)
                go(s)
                go(body)
            case Lam(name, _, body):
                out.add(name)
                go(body)
            case App(f, a):
                go(f)
                go(a)
            case Inj(_, _, p):
                go(p)
            case Case(s, branches):
                go(s)
                for _, x, body in branches:
                    out.add(x)
                    go(body)
            case Cons(h, tl):
                go(h)
                go(tl)
            case Fold(x1, x2, step, lst, init):
                out.update((x1, x2))
                go(step)
                go(lst)
                go(init)

    go(t)
    return out


# --------------------------------------------------------------------------
# Substitution


def substitute(body: Term, var: str, replacement: Term) -> Term:
    """``body[replacement/var]``, renaming binders that would capture."""
    return substitute_many(body, {var: replacement})


def substitute_many(body: Term, mapping: Mapping[str, Term]) -> Term:
    """Simultaneous capture-avoiding substitution."""
    if not mapping:
        return body
    danger = frozenset().union(*(free_vars(u) for u in mapping.values()))
    return _subst(body, dict(mapping), danger)


def _bind(names, mapping, danger):
    """Drop shadowed keys from ``mapping``; rename binders that would capture.

    Returns the new binder names, the mapping to use in the body, and the
    renaming (old -> Var(new)) that must also be applied to the body.
    """
    inner = {k: v for k, v in mapping.items() if k not in names}
    new_names = []
    for n in names:
        if n in danger and inner:
            m = fresh(n)
            inner[n] = Var(m)
            new_names.append(m)
        else:
            new_names.append(n)
    return tuple(new_names), inner


def _subst(t: Term, mapping: dict, danger: frozenset) -> Term:
    match t:
        case Var(name):
            return mapping.get(name, t)
        case Const() | Nil():
            return t
        case Op(name, args):
            return Op(name, tuple(_subst(a, mapping, danger) for a in args))
        case Tuple(items):
            return Tuple(tuple(_subst(a, mapping, danger) for a in items))
        case TupleMatch(s, names, b):
            s2 = _subst(s, mapping, danger)
            names2, inner = _bind(names, mapping, danger)
            b2 = _subst(b, inner, danger) if inner else b
            return TupleMatch(s2, names2, b2)
        case Lam(name, ty, b):
            (name2,), inner = _bind((name,), mapping, danger)
            b2 = _subst(b, inner, danger) if inner else b
            return Lam(name2, ty, b2)
        case App(f, a):
            return App(_subst(f, mapping, danger), _subst(a, mapping, danger))
        case Inj(ty, c, p):
            return Inj(ty, c, _subst(p, mapping, danger))
        case Case(s, branches):
            out = []
            for c, x, b in branches:
                (x2,), inner = _bind((x,), mapping, danger)
                out.append((c, x2, _subst(b, inner, danger) if inner else b))
            return Case(_subst(s, mapping, danger), tuple(out))
        case Cons(h, tl):
            return Cons(_subst(h, mapping, danger), _subst(tl, mapping, danger))
        case Fold(x1, x2, step, lst, init):
            (y1, y2), inner = _bind((x1, x2), mapping, danger)
            step2 = _subst(step, inner, danger) if inner else step
            return Fold(y1, y2, step2, _subst(lst, mapping, danger), _subst(init, mapping, danger))
    raise TypeError(f"not a term: {t!r}")


# --------------------------------------------------------------------------
# Alpha-equivalence


def alpha_eq(a: Term, b: Term) -> bool:
    return _aeq(a, b, {}, {}, 0)


def _aeq(a, b, env_a: dict, env_b: dict, depth: int) -> bool:
    match a, b:
        case Var(x), Var(y):
            la, lb = env_a.get(x), env_b.get(y)
            if la is None and lb is None:
                return x == y
            return la == lb
        case Const(u), Const(v):
            return u == v
        case Op(f, xs), Op(g, ys):
            return f == g and len(xs) == len(ys) and all(
                _aeq(x, y, env_a, env_b, depth) for x, y in zip(xs, ys)
            )
        case Tuple(xs), Tuple(ys):
            return len(xs) == len(ys) and all(
                _aeq(x, y, env_a, env_b, depth) for x, y in zip(xs, ys)
            )
        case TupleMatch(s1, n1, b1), TupleMatch(s2, n2, b2):
            if len(n1) != len(n2) or not _aeq(s1, s2, env_a, env_b, depth):
                return False
            ea, eb = _extend(env_a, n1, depth), _extend(env_b, n2, depth)
            return _aeq(b1, b2, ea, eb, depth + len(n1))
        case Lam(x, t1, b1), Lam(y, t2, b2):
            if t1 != t2:
                return False
            return _aeq(b1, b2, {**env_a, x: depth}, {**env_b, y: depth}, depth + 1)
        case App(f1, a1), App(f2, a2):
            return _aeq(f1, f2, env_a, env_b, depth) and _aeq(a1, a2, env_a, env_b, depth)
        case Inj(t1, c1, p1), Inj(t2, c2, p2):
            return t1 == t2 and c1 == c2 and _aeq(p1, p2, env_a, env_b, depth)
        case Case(s1, br1), Case(s2, br2):
            if len(br1) != len(br2) or not _aeq(s1, s2, env_a, env_b, depth):
                return False
            for (c1, x, t1), (c2, y, t2) in zip(br1, br2):
                if c1 != c2:
                    return False
                if not _aeq(t1, t2, {**env_a, x: depth}, {**env_b, y: depth}, depth + 1):
                    return False
            return True
        case Nil(e1), Nil(e2):
            return e1 == e2
        case Cons(h1, t1), Cons(h2, t2):
            return _aeq(h1, h2, env_a, env_b, depth) and _aeq(t1, t2, env_a, env_b, depth)
        case Fold(x1, x2, s1, l1, i1), Fold(y1, y2, s2, l2, i2):
            if not (_aeq(l1, l2, env_a, env_b, depth) and _aeq(i1, i2, env_a, env_b, depth)):
                return False
            ea = _extend(env_a, (x1, x2), depth)
            eb = _extend(env_b, (y1, y2), depth)
            return _aeq(s1, s2, ea, eb, depth + 2)
    return False


def _extend(env: dict, names, depth: int) -> dict:
    out = dict(env)
    for i, n in enumerate(names):
        out[n] = depth + i
    return out


def term_size(t: Term) -> int:
    match t:
        case Var() | Const() | Nil():
            return 1
        case Op(_, args) | Tuple(args):
            return 1 + sum(map(term_size, args))
        case TupleMatch(s, _, b):
            return 1 + term_size(s) + term_size(b)
        case Lam(_, _, b):
            return 1 + term_size(b)
        case App(f, a) | Cons(f, a):
            return 1 + term_size(f) + term_size(a)
        case Inj(_, _, p):
            return 1 + term_size(p)
        case Case(s, branches):
            return 1 + term_size(s) + sum(term_size(b) for _, _, b in branches)
        case Fold(_, _, step, lst, init):
            return 1 + term_size(step) + term_size(lst) + term_size(init)
    raise TypeError(f"not a term: {t!r}")


def term_depth(t: Term) -> int:
    """Nesting depth of term formers; variables and constants have depth 1."""
    match t:
        case Var() | Const() | Nil():
            return 1
        case Op(_, args) | Tuple(args):
            return 1 + max(map(term_depth, args), default=0)
        case TupleMatch(s, _, b) | App(s, b) | Cons(s, b):
            return 1 + max(term_depth(s), term_depth(b))
        case Lam(_, _, b) | Inj(_, _, b):
            return 1 + term_depth(b)
        case Case(s, branches):
            return 1 + max([term_depth(s)] + [term_depth(b) for _, _, b in branches])
        case Fold(_, _, step, lst, init):
            return 1 + max(term_depth(step), term_depth(lst), term_depth(init))
    raise TypeError(f"not a term: {t!r}")
