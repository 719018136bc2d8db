"""The (k, R) forward-mode Taylor differentiation macro on types, contexts
and terms, and an optional beta-normalisation pass for readable output.

Every real becomes a tuple of C(R+k, k) reals holding its partial
derivatives in lexicographic multi-index order. The translation is
homomorphic on every term former except primitive operations, which are
replaced by their Faà di Bruno expansion built from the registry's
derivative terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .jetalgebra import JetShape, MultiIndex, enumerate_fdb, mi_key, one_hot
from .primops import Registry, RegistryError, builtin_registry
from .syntax import ast as A

FULL = "full"
RESTRICTED22 = "restricted22"

# coordinate order of the restricted (2,2) representation
RESTRICTED22_COORDS: tuple[MultiIndex, ...] = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class MacroConfig:
    k: int
    r: int
    mode: str = FULL
    registry: Optional[Registry] = None

    def __post_init__(self):
        if self.k < 1 or self.r < 1:
            raise ValueError(f"need k >= 1 and R >= 1, got k={self.k}, R={self.r}")
        if self.mode not in (FULL, RESTRICTED22):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == RESTRICTED22 and (self.k, self.r) != (2, 2):
            raise ValueError("restricted22 mode requires (k, R) = (2, 2)")
        if self.registry is None:
            object.__setattr__(self, "registry", builtin_registry(min(self.r, 2)))
        if self.registry.r_max < self.r:
            raise RegistryError(
                f"registry provides derivatives up to order {self.registry.r_max}, "
                f"macro needs order {self.r}"
            )

    @property
    def shape(self) -> JetShape:
        return JetShape(self.k, self.r)

    @property
    def coords(self) -> tuple[MultiIndex, ...]:
        if self.mode == RESTRICTED22:
            return RESTRICTED22_COORDS
        return self.shape.coords

    @property
    def width(self) -> int:
        """Number of reals representing one real."""
        return len(self.coords)


def d_type(cfg: MacroConfig, ty: Optional[A.Type]) -> Optional[A.Type]:
    match ty:
        case None:
            return None
        case A.Real():
            return A.real_power(cfg.width)
        case A.Prod(items):
            return A.Prod(tuple(d_type(cfg, i) for i in items))
        case A.Fun(dom, cod):
            return A.Fun(d_type(cfg, dom), d_type(cfg, cod))
        case A.Variant(cases):
            return A.Variant(tuple((c, d_type(cfg, t)) for c, t in cases))
        case A.ListT(elem):
            return A.ListT(d_type(cfg, elem))
    raise TypeError(f"not a type: {ty!r}")


def d_context(cfg: MacroConfig, ctx) -> list[tuple[str, A.Type]]:
    items = ctx.items() if hasattr(ctx, "items") else ctx
    return [(x, d_type(cfg, ty)) for x, ty in items]


def d_term(cfg: MacroConfig, t: A.Term) -> A.Term:
    match t:
        case A.Var():
            return t
        case A.Const():
            return A.Tuple((t,) + (A.Const(0.0),) * (cfg.width - 1))
        case A.Op(name, args):
            return _d_op(cfg, name, tuple(d_term(cfg, a) for a in args))
        case A.Tuple(items):
            return A.Tuple(tuple(d_term(cfg, i) for i in items))
        case A.TupleMatch(s, names, body):
            return A.TupleMatch(d_term(cfg, s), names, d_term(cfg, body))
        case A.Lam(x, ty, body):
            return A.Lam(x, d_type(cfg, ty), d_term(cfg, body))
        case A.App(f, a):
            return A.App(d_term(cfg, f), d_term(cfg, a))
        case A.Inj(ty, c, p):
            return A.Inj(d_type(cfg, ty), c, d_term(cfg, p))
        case A.Case(s, branches):
            return A.Case(
                d_term(cfg, s), tuple((c, x, d_term(cfg, b)) for c, x, b in branches)
            )
        case A.Nil(elem):
            return A.Nil(d_type(cfg, elem))
        case A.Cons(h, tl):
            return A.Cons(d_term(cfg, h), d_term(cfg, tl))
        case A.Fold(x1, x2, step, lst, init):
            return A.Fold(x1, x2, d_term(cfg, step), d_term(cfg, lst), d_term(cfg, init))
    raise TypeError(f"not a term: {t!r}")


def d_term_restricted22(cfg: MacroConfig, t: A.Term) -> A.Term:
    if cfg.mode != RESTRICTED22:
        raise ValueError("d_term_restricted22 needs a restricted22 configuration")
    return d_term(cfg, t)


def _d_op(cfg: MacroConfig, name: str, dargs: tuple[A.Term, ...]) -> A.Term:
    try:
        spec = cfg.registry[name]
    except KeyError:
        raise RegistryError(f"unregistered operation {name!r}") from None
    n = spec.arity
    if len(dargs) != n:
        raise RegistryError(f"{name!r} takes {n} argument(s), got {len(dargs)}")
    coords = cfg.coords
    if n == 0:
        return A.Tuple((A.Op(name, ()),) + (A.Const(0.0),) * (len(coords) - 1))
    zero = coords[0]
    # slot[j][alpha]: variable bound to component alpha of argument j
    slot = [
        {a: A.fresh_stem(f"x%{j + 1}_{mi_key(a)}") for a in coords} for j in range(n)
    ]
    values = tuple(A.Var(slot[j][zero]) for j in range(n))

    def x(j: int, alpha: MultiIndex) -> A.Term:
        return A.Var(slot[j][alpha])

    def d(beta: MultiIndex) -> A.Term:
        return spec.deriv(beta, values)

    components = [A.Op(name, values)]
    if cfg.mode == RESTRICTED22:
        components += _restricted22_components(n, x, d)
    else:
        components += [_fdb_term(alpha, n, x, d) for alpha in coords[1:]]

    body: A.Term = A.Tuple(tuple(components))
    for j in reversed(range(n)):
        body = A.TupleMatch(dargs[j], tuple(slot[j][a] for a in coords), body)
    return body


def _fdb_term(alpha: MultiIndex, n: int, x, d) -> A.Term:
    summands = []
    for term in enumerate_fdb(alpha, n):
        factors: list[A.Term] = []
        if term.integer != 1:
            factors.append(A.Const(float(term.integer)))
        for j, alpha_r, e in term.factors():
            factors.extend([x(j, alpha_r)] * e)
        factors.append(d(term.beta))
        summands.append(A.mul(*factors))
    return A.add(*summands)


def _restricted22_components(n: int, x, d) -> list[A.Term]:
    """Slots 01, 10 and 11 of the (2,2) representation without the pure
    second derivatives."""
    d01 = A.add(*(A.mul(x(i, (0, 1)), d(one_hot(i, n))) for i in range(n)))
    d10 = A.add(*(A.mul(x(i, (1, 0)), d(one_hot(i, n))) for i in range(n)))
    mixed = [A.mul(x(i, (1, 1)), d(one_hot(i, n))) for i in range(n)]
    for i in range(n):
        for i2 in range(n):
            two_hot = tuple((j == i) + (j == i2) for j in range(n))
            mixed.append(A.mul(x(i, (1, 0)), x(i2, (0, 1)), d(two_hot)))
    return [d01, d10, A.add(*mixed)]


# --------------------------------------------------------------------------
# Normalisation


def normalize(t: A.Term) -> A.Term:
    """Contract every beta-redex: applied lambdas, matches on literal tuples,
    case analysis of injections and folds over literal lists.

    The language has no recursion, so this terminates; it can duplicate
    work, since arguments are substituted unevaluated.
    """
    match t:
        case A.Var() | A.Const() | A.Nil():
            return t
        case A.Op(name, args):
            return A.Op(name, tuple(map(normalize, args)))
        case A.Tuple(items):
            return A.Tuple(tuple(map(normalize, items)))
        case A.TupleMatch(s, names, body):
            s = normalize(s)
            if isinstance(s, A.Tuple) and len(s.items) == len(names):
                return normalize(A.substitute_many(body, dict(zip(names, s.items))))
            return A.TupleMatch(s, names, normalize(body))
        case A.Lam(x, ty, body):
            return A.Lam(x, ty, normalize(body))
        case A.App(f, a):
            f, a = normalize(f), normalize(a)
            if isinstance(f, A.Lam):
                return normalize(A.substitute(f.body, f.name, a))
            return A.App(f, a)
        case A.Inj(ty, c, p):
            return A.Inj(ty, c, normalize(p))
        case A.Case(s, branches):
            s = normalize(s)
            if isinstance(s, A.Inj):
                for c, x, body in branches:
                    if c == s.ctor:
                        return normalize(A.substitute(body, x, s.payload))
            return A.Case(s, tuple((c, x, normalize(b)) for c, x, b in branches))
        case A.Cons(h, tl):
            return A.Cons(normalize(h), normalize(tl))
        case A.Fold(x1, x2, step, lst, init):
            lst, init = normalize(lst), normalize(init)
            if isinstance(lst, A.Nil):
                return init
            if isinstance(lst, A.Cons):
                rest = A.Fold(x1, x2, step, lst.tail, init)
                return normalize(A.substitute_many(step, {x1: lst.head, x2: rest}))
            return A.Fold(x1, x2, normalize(step), lst, init)
    raise TypeError(f"not a term: {t!r}")
