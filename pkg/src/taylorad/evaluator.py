"""Call-by-value, environment-based interpreter.

Values are plain Python data: floats for reals, tuples for products,
:class:`Closure`, :class:`VariantVal` and :class:`ListVal`. Environments are
dicts that are copied, never mutated, when extended.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .jetalgebra import JetVector
from .macro import RESTRICTED22, MacroConfig, d_term
from .primops import Registry, builtin_registry
from .syntax import ast as A


@dataclass(frozen=True)
class Closure:
    name: str
    body: A.Term
    env: Mapping[str, Value]

    def __repr__(self):
        return f"<closure {self.name}>"


@dataclass(frozen=True)
class VariantVal:
    ctor: str
    value: Value


@dataclass(frozen=True)
class ListVal:
    items: tuple[Value, ...]


Value = Union[float, tuple, Closure, VariantVal, ListVal]


class EvalError(RuntimeError):
    """Evaluation reached a state a well-typed term cannot reach."""


# Evaluation, substitution and the macro all recurse on term structure, and
# long literal lists nest deeply.
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


class Evaluator:
    def __init__(self, registry: Optional[Registry] = None):
        self.registry = registry if registry is not None else builtin_registry()

    def eval(self, env: Mapping[str, Value], t: A.Term) -> Value:
        match t:
            case A.Var(name):
                try:
                    return env[name]
                except KeyError:
                    raise EvalError(f"unbound variable {name!r}") from None
            case A.Const(v):
                return v
            case A.Op(name, args):
                vals = [self.eval(env, a) for a in args]
                return float(self.registry[name].fn(*vals))
            case A.Tuple(items):
                return tuple(self.eval(env, i) for i in items)
            case A.TupleMatch(s, names, body):
                v = self.eval(env, s)
                if not isinstance(v, tuple) or len(v) != len(names):
                    raise EvalError(f"cannot match {v!r} against {len(names)}-tuple")
                return self.eval({**env, **dict(zip(names, v))}, body)
            case A.Lam(x, _, body):
                return Closure(x, body, env)
            case A.App(f, a):
                fv = self.eval(env, f)
                av = self.eval(env, a)
                return self.apply(fv, av)
            case A.Inj(_, c, p):
                return VariantVal(c, self.eval(env, p))
            case A.Case(s, branches):
                v = self.eval(env, s)
                for c, x, body in branches:
                    if c == v.ctor:
                        return self.eval({**env, x: v.value}, body)
                raise EvalError(f"no branch for constructor {v.ctor!r}")
            case A.Nil():
                return ListVal(())
            case A.Cons(h, tl):
                hv = self.eval(env, h)
                tv = self.eval(env, tl)
                return ListVal((hv,) + tv.items)
            case A.Fold(x1, x2, step, lst, init):
                items = self.eval(env, lst).items
                acc = self.eval(env, init)
                for item in reversed(items):
                    acc = self.eval({**env, x1: item, x2: acc}, step)
                return acc
        raise EvalError(f"not a term: {t!r}")

    def apply(self, fv: Value, av: Value) -> Value:
        if not isinstance(fv, Closure):
            raise EvalError(f"applying a non-function {fv!r}")
        return self.eval({**fv.env, fv.name: av}, fv.body)


def evaluate(env: Mapping[str, Value], t: A.Term, registry: Optional[Registry] = None) -> Value:
    return Evaluator(registry).eval(env, t)


def eval_jet_program(
    cfg: MacroConfig,
    program: A.Term,
    ctx: Sequence[tuple[str, A.Type]],
    seeds: Sequence[JetVector],
) -> JetVector:
    """Run the derivative program of ``program`` on input jets.

    ``ctx`` must bind real variables only. In restricted22 mode the seeds are
    full (2,2) jets whose pure second-order slots are ignored, and those slots
    of the result are NaN.
    """
    names = [x for x, _ in ctx]
    if any(ty != A.REAL for _, ty in ctx):
        raise ValueError("eval_jet_program needs a context of real variables")
    if len(seeds) != len(names):
        raise ValueError(f"{len(names)} variables but {len(seeds)} seed jets")
    for s in seeds:
        if s.shape != cfg.shape:
            raise ValueError(f"seed has shape {s.shape}, macro works on {cfg.shape}")
    env = {x: tuple(s[a] for a in cfg.coords) for x, s in zip(names, seeds)}
    out = evaluate(env, d_term(cfg, program), cfg.registry)
    if not isinstance(out, tuple) or len(out) != cfg.width:
        raise EvalError(f"derivative program returned {out!r}, expected a {cfg.width}-tuple")
    by_coord = dict(zip(cfg.coords, out))
    if cfg.mode == RESTRICTED22:
        return JetVector(cfg.shape, tuple(by_coord.get(a, math.nan) for a in cfg.shape.coords))
    return JetVector(cfg.shape, tuple(out))


# --------------------------------------------------------------------------
# JSON encoding of values
#
#   real     -> number
#   tuple    -> array
#   list     -> {"list": [...]}
#   variant  -> {"ctor": name, "value": v}
#   closure  -> {"closure": binder}


def value_to_json(v: Value):
    match v:
        case float() | int():
            return v
        case tuple():
            return [value_to_json(x) for x in v]
        case ListVal(items):
            return {"list": [value_to_json(x) for x in items]}
        case VariantVal(c, x):
            return {"ctor": c, "value": value_to_json(x)}
        case Closure(name, _, _):
            return {"closure": name}
    raise TypeError(f"not a value: {v!r}")


def value_from_json(obj) -> Value:
    match obj:
        case bool():
            raise ValueError("booleans are not values of the language")
        case int() | float():
            return float(obj)
        case list():
            return tuple(value_from_json(x) for x in obj)
        case {"list": items}:
            return ListVal(tuple(value_from_json(x) for x in items))
        case {"ctor": c, "value": x}:
            return VariantVal(c, value_from_json(x))
    raise ValueError(f"cannot decode {obj!r} as a value")


def type_of_json(obj) -> A.Type:
    """Best-effort type of a JSON-encoded input value (variants need --context)."""
    match obj:
        case bool():
            raise ValueError("booleans are not values of the language")
        case int() | float():
            return A.REAL
        case list():
            return A.Prod(tuple(type_of_json(x) for x in obj))
        case {"list": [first, *_]}:
            return A.ListT(type_of_json(first))
    raise ValueError(f"cannot infer a type for {obj!r}; declare it with --context")
